#include "clipcs/signal_core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace clipcs {

namespace {

// Per-dimension Gray labels: index is the bit pattern, value the PAM level.
constexpr double kPam2[2] = {1.0, -1.0};
constexpr double kPam4[4] = {3.0, 1.0, -3.0, -1.0};  // 00 01 10 11

double pam_level(const Constellation& c, unsigned label) {
    return c.V == 2 ? kPam2[label] : kPam4[label];
}

unsigned pam_label(const Constellation& c, double level) {
    const unsigned n = static_cast<unsigned>(c.V);
    for (unsigned i = 0; i < n; ++i) {
        if (pam_level(c, i) == level) {
            return i;
        }
    }
    throw std::logic_error("level not in constellation");
}

double decide_level(double y, const std::vector<double>& levels) {
    double best = levels.front();
    double best_dist = std::abs(y - best);
    for (std::size_t i = 1; i < levels.size(); ++i) {
        const double d = std::abs(y - levels[i]);
        if (d < best_dist) {
            best = levels[i];
            best_dist = d;
        }
    }
    return best;
}

void naive_dft(std::span<cplx> data, int sign) {
    const std::size_t n = data.size();
    CVec out(n);
    for (std::size_t k = 0; k < n; ++k) {
        cplx acc = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            const double ph = sign * 2.0 * std::numbers::pi * static_cast<double>((k * t) % n) /
                              static_cast<double>(n);
            acc += data[t] * std::polar(1.0, ph);
        }
        out[k] = acc;
    }
    std::copy(out.begin(), out.end(), data.begin());
}

void transform_any(std::span<cplx> data, int sign) {
    if (is_power_of_two(data.size())) {
        fft_inplace(data, sign);
    } else {
        naive_dft(data, sign);
    }
}

}  // namespace

Constellation Constellation::qpsk() {
    Constellation c;
    c.scheme = Scheme::QPSK;
    c.bits_per_symbol = 2;
    c.V = 2;
    c.levels = {-1.0, 1.0};
    c.Es = 2.0;
    c.points.resize(4);
    for (unsigned label = 0; label < 4; ++label) {
        c.points[label] = {kPam2[label >> 1], kPam2[label & 1u]};
    }
    return c;
}

Constellation Constellation::qam16() {
    Constellation c;
    c.scheme = Scheme::QAM16;
    c.bits_per_symbol = 4;
    c.V = 4;
    c.levels = {-3.0, -1.0, 1.0, 3.0};
    c.Es = 10.0;
    c.points.resize(16);
    for (unsigned label = 0; label < 16; ++label) {
        c.points[label] = {kPam4[label >> 2], kPam4[label & 3u]};
    }
    return c;
}

Constellation Constellation::from_name(std::string_view name) {
    if (name == "qpsk" || name == "QPSK") {
        return qpsk();
    }
    if (name == "16qam" || name == "qam16" || name == "16QAM" || name == "QAM16") {
        return qam16();
    }
    throw std::invalid_argument("unknown modulation: " + std::string(name));
}

std::string Constellation::name() const { return scheme == Scheme::QPSK ? "qpsk" : "16qam"; }

std::vector<double> Constellation::boundaries() const {
    std::vector<double> b;
    for (std::size_t i = 0; i + 1 < levels.size(); ++i) {
        b.push_back(0.5 * (levels[i] + levels[i + 1]));
    }
    return b;
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

CVec map_bits(std::span<const std::uint8_t> bits, const Constellation& c, std::size_t N) {
    const auto bps = static_cast<std::size_t>(c.bits_per_symbol);
    if (bits.size() != N * bps) {
        throw std::invalid_argument("map_bits: expected " + std::to_string(N * bps) + " bits, got " +
                                    std::to_string(bits.size()));
    }
    const std::size_t half = bps / 2;
    CVec out(N);
    for (std::size_t k = 0; k < N; ++k) {
        unsigned re = 0;
        unsigned im = 0;
        for (std::size_t b = 0; b < half; ++b) {
            re = (re << 1) | (bits[k * bps + b] & 1u);
            im = (im << 1) | (bits[k * bps + half + b] & 1u);
        }
        out[k] = {pam_level(c, re), pam_level(c, im)};
    }
    return out;
}

cplx decide_point(cplx y, const Constellation& c) {
    return {decide_level(y.real(), c.levels), decide_level(y.imag(), c.levels)};
}

void append_bits(cplx point, const Constellation& c, Bits& out) {
    const int half = c.bits_per_symbol / 2;
    const unsigned re = pam_label(c, point.real());
    const unsigned im = pam_label(c, point.imag());
    for (int b = half - 1; b >= 0; --b) {
        out.push_back(static_cast<std::uint8_t>((re >> b) & 1u));
    }
    for (int b = half - 1; b >= 0; --b) {
        out.push_back(static_cast<std::uint8_t>((im >> b) & 1u));
    }
}

Decision hard_decide(cplx y, const Constellation& c) {
    Decision d;
    d.point = decide_point(y, c);
    d.bits.reserve(static_cast<std::size_t>(c.bits_per_symbol));
    append_bits(d.point, c, d.bits);
    return d;
}

void fft_inplace(std::span<cplx> data, int sign) {
    const std::size_t n = data.size();
    if (!is_power_of_two(n)) {
        throw std::invalid_argument("fft: length must be a power of two");
    }
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) {
            j ^= bit;
        }
        j ^= bit;
        if (i < j) {
            std::swap(data[i], data[j]);
        }
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * std::numbers::pi / static_cast<double>(len);
        const std::size_t half = len / 2;
        for (std::size_t k = 0; k < half; ++k) {
            // Exact twiddles per index keep round-off independent of N.
            const cplx w = std::polar(1.0, ang * static_cast<double>(k));
            for (std::size_t s = 0; s < n; s += len) {
                const cplx u = data[s + k];
                const cplx v = data[s + k + half] * w;
                data[s + k] = u + v;
                data[s + k + half] = u - v;
            }
        }
    }
}

CVec unitary_dft(std::span<const cplx> v) {
    CVec out(v.begin(), v.end());
    fft_inplace(out, -1);
    const double scale = 1.0 / std::sqrt(static_cast<double>(out.size()));
    for (auto& z : out) {
        z *= scale;
    }
    return out;
}

CVec unitary_idft(std::span<const cplx> v) {
    CVec out(v.begin(), v.end());
    fft_inplace(out, +1);
    const double scale = 1.0 / std::sqrt(static_cast<double>(out.size()));
    for (auto& z : out) {
        z *= scale;
    }
    return out;
}

TimeSignal ofdm_modulate(std::span<const cplx> X, int L) {
    if (L < 1) {
        throw std::invalid_argument("ofdm_modulate: oversampling factor must be >= 1");
    }
    const std::size_t N = X.size();
    TimeSignal x;
    x.oversample = L;
    x.n_subcarriers = N;
    x.values.assign(N * static_cast<std::size_t>(L), cplx{});
    std::copy(X.begin(), X.end(), x.values.begin());
    transform_any(x.values, +1);
    const double scale = 1.0 / std::sqrt(static_cast<double>(N));
    for (auto& z : x.values) {
        z *= scale;
    }
    return x;
}

CVec ofdm_demodulate_inband(const TimeSignal& x) {
    const std::size_t N = x.n_subcarriers;
    CVec spectrum = x.values;
    transform_any(spectrum, -1);
    const double scale = 1.0 / (static_cast<double>(x.oversample) * std::sqrt(static_cast<double>(N)));
    CVec out(N);
    for (std::size_t k = 0; k < N; ++k) {
        out[k] = spectrum[k] * scale;
    }
    return out;
}

double papr_db(const TimeSignal& x) {
    double peak = 0.0;
    double total = 0.0;
    for (const auto& z : x.values) {
        const double p = std::norm(z);
        peak = std::max(peak, p);
        total += p;
    }
    if (total == 0.0) {
        throw std::invalid_argument("papr_db: signal is identically zero");
    }
    const double mean = total / static_cast<double>(x.values.size());
    return 10.0 * std::log10(peak / mean);
}

}  // namespace clipcs
