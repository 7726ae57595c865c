#include "clipcs/clipper.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace clipcs {

ClipParams ClipParams::from_cr(double cr_db, double Es, int L) {
    ClipParams p;
    p.cr_db = cr_db;
    p.sigma = std::sqrt(Es);
    p.threshold_A = clip_threshold(cr_db, p.sigma);
    p.oversample_L = L;
    return p;
}

double clip_threshold(double cr_db, double sigma) { return sigma * std::pow(10.0, cr_db / 20.0); }

TimeSignal clip(const TimeSignal& x, double A) {
    if (!(A > 0.0)) {
        throw std::invalid_argument("clip: threshold must be positive");
    }
    TimeSignal out = x;
    for (auto& z : out.values) {
        const double mag = std::abs(z);
        if (mag > A) {
            z *= A / mag;
            // Rounding can leave |z| one ulp above A; shrink until a second
            // pass would leave it untouched.
            while (std::abs(z) > A) {
                z *= 1.0 - std::numeric_limits<double>::epsilon();
            }
        }
    }
    return out;
}

double attenuation_alpha(double cr_db) {
    if (std::isinf(cr_db)) {
        return cr_db > 0 ? 1.0 : 0.0;
    }
    const double g2 = std::pow(10.0, cr_db / 10.0);
    const double g = std::sqrt(g2);
    return 1.0 - std::exp(-g2) + 0.5 * std::sqrt(std::numbers::pi) * g * std::erfc(g);
}

double d_variance(double cr_db, double Es) {
    if (std::isinf(cr_db) && cr_db > 0) {
        return 0.0;
    }
    const double g2 = std::pow(10.0, cr_db / 10.0);
    const double a = attenuation_alpha(cr_db);
    return (1.0 - std::exp(-g2) - a * a) * Es;
}

namespace {

ClippedFrame assemble(const TimeSignal& unclipped, TimeSignal clipped, std::span<const cplx> X) {
    ClippedFrame f;
    f.clip_count = 0;
    for (std::size_t n = 0; n < clipped.values.size(); ++n) {
        if (clipped.values[n] != unclipped.values[n]) {
            ++f.clip_count;
        }
    }
    f.X_bar = ofdm_demodulate_inband(clipped);
    f.C_freq.resize(X.size());
    for (std::size_t k = 0; k < X.size(); ++k) {
        f.C_freq[k] = f.X_bar[k] - X[k];
    }
    f.c_time = unitary_idft(f.C_freq);
    f.x_clipped = std::move(clipped);
    return f;
}

}  // namespace

ClippedFrame filter_inband(const TimeSignal& x_clipped, std::span<const cplx> X) {
    const TimeSignal unclipped = ofdm_modulate(X, x_clipped.oversample);
    return assemble(unclipped, x_clipped, X);
}

ClippedFrame clip_and_filter(std::span<const cplx> X, const ClipParams& params) {
    const TimeSignal x = ofdm_modulate(X, params.oversample_L);
    return assemble(x, clip(x, params.threshold_A), X);
}

TimeSignal transmit_filtered_signal(const ClippedFrame& frame) {
    return ofdm_modulate(frame.X_bar, frame.x_clipped.oversample);
}

PeakReduction k_peak_reduction(const TimeSignal& x, std::size_t K) {
    if (x.oversample != 1) {
        throw std::invalid_argument("k_peak_reduction: requires Nyquist-rate signal (L = 1)");
    }
    const std::size_t n = x.values.size();
    if (K < 1 || K >= n) {
        throw std::invalid_argument("k_peak_reduction: K must satisfy 1 <= K < N");
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> mag(n);
    for (std::size_t i = 0; i < n; ++i) {
        mag[i] = std::abs(x.values[i]);
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return mag[a] > mag[b]; });

    const double target = 0.8 * mag[order[K]];
    PeakReduction out{x, 0};
    for (std::size_t r = 0; r < K; ++r) {
        const std::size_t i = order[r];
        if (mag[i] == 0.0) {
            continue;
        }
        const cplx scaled = x.values[i] * (target / mag[i]);
        if (scaled != x.values[i]) {
            out.signal.values[i] = scaled;
            ++out.sparsity;
        }
    }
    return out;
}

}  // namespace clipcs
