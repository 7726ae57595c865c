#include "clipcs/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace clipcs {

ChannelModel ChannelModel::awgn(std::size_t N, double N0) {
    if (N0 < 0.0) {
        throw std::invalid_argument("channel: N0 must be non-negative");
    }
    return ChannelModel{CVec(N, cplx{1.0, 0.0}), N0};
}

CVec transmit(std::span<const cplx> X_bar, const ChannelModel& ch, Rng& rng) {
    if (ch.H.size() != X_bar.size()) {
        throw std::invalid_argument("transmit: channel length does not match symbol length");
    }
    CVec Y(X_bar.size());
    if (ch.N0 == 0.0) {
        for (std::size_t k = 0; k < Y.size(); ++k) {
            Y[k] = ch.H[k] * X_bar[k];
        }
        return Y;
    }
    std::normal_distribution<double> gauss(0.0, std::sqrt(0.5 * ch.N0));
    for (std::size_t k = 0; k < Y.size(); ++k) {
        const double re = gauss(rng);
        const double im = gauss(rng);
        Y[k] = ch.H[k] * X_bar[k] + cplx{re, im};
    }
    return Y;
}

CVec equalize(std::span<const cplx> Y, const ChannelModel& ch) {
    if (ch.H.size() != Y.size()) {
        throw std::invalid_argument("equalize: channel length does not match symbol length");
    }
    CVec out(Y.size());
    for (std::size_t k = 0; k < Y.size(); ++k) {
        if (ch.H[k] == cplx{}) {
            throw std::invalid_argument("equalize: singular channel (H(k) = 0 at k = " + std::to_string(k) + ")");
        }
        out[k] = Y[k] / ch.H[k];
    }
    return out;
}

double ebno_to_n0(double ebno_db, const Constellation& c) {
    return c.Es / (static_cast<double>(c.bits_per_symbol) * std::pow(10.0, ebno_db / 10.0));
}

}  // namespace clipcs
