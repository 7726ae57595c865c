#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "clipcs/clipper.hpp"
#include "oracles.hpp"

using namespace clipcs;

namespace {

// Independent evaluation of the attenuation factor and distortion variance.
double alpha_oracle(double cr_db) {
    const double g2 = std::pow(10.0, cr_db / 10.0);
    const double g = std::sqrt(g2);
    return 1.0 - std::exp(-g2) + std::sqrt(std::numbers::pi) * g / 2.0 * oracle::erfc(g);
}

double dvar_oracle(double cr_db, double Es) {
    const double a = alpha_oracle(cr_db);
    return (1.0 - std::exp(-std::pow(10.0, cr_db / 10.0)) - a * a) * Es;
}

CVec random_qpsk(std::size_t N, std::mt19937_64& rng) {
    return map_bits(oracle::random_bits(2 * N, rng), Constellation::qpsk(), N);
}

TimeSignal real_signal(std::initializer_list<double> v) {
    TimeSignal x;
    for (double s : v) {
        x.values.emplace_back(s, 0.0);
    }
    x.oversample = 1;
    x.n_subcarriers = x.values.size();
    return x;
}

}  // namespace

TEST_SUITE("clipper") {

TEST_CASE("clip parameters invert the clipping-ratio definition") {
    for (double cr : {-3.0, 0.0, 2.0, 6.0}) {
        const ClipParams p = ClipParams::from_cr(cr, 2.0, 1);
        CHECK(p.sigma == doctest::Approx(std::sqrt(2.0)));
        CHECK(std::abs(20.0 * std::log10(p.threshold_A / p.sigma) - cr) < 1e-12);
        CHECK(p.threshold_A == doctest::Approx(clip_threshold(cr, p.sigma)));
    }
}

TEST_CASE("clip examples") {
    TimeSignal x;
    x.values = {std::polar(0.5, std::numbers::pi / 3), std::polar(2.0, std::numbers::pi / 4), cplx{}};
    const TimeSignal y = clip(x, 1.0);
    CHECK(y.values[0] == x.values[0]);
    CHECK(std::abs(y.values[1] - std::polar(1.0, std::numbers::pi / 4)) < 1e-15);
    CHECK(y.values[2] == cplx{});
    CHECK_THROWS_AS(clip(x, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(clip(x, -1.0), std::invalid_argument);
}

TEST_CASE("clip is idempotent and never increases magnitudes") {
    std::mt19937_64 rng(21);
    for (int t = 0; t < 50; ++t) {
        const TimeSignal x = ofdm_modulate(random_qpsk(64, rng), 4);
        const double A = 1.2;
        const TimeSignal once = clip(x, A);
        const TimeSignal twice = clip(once, A);
        CHECK(once.values == twice.values);
        for (std::size_t n = 0; n < x.values.size(); ++n) {
            CHECK(std::abs(once.values[n]) <= std::abs(x.values[n]));
            CHECK(std::abs(once.values[n]) <= A * (1.0 + 1e-15));
            if (std::abs(x.values[n]) > A) {
                CHECK(std::abs(std::arg(once.values[n]) - std::arg(x.values[n])) < 1e-12);
            }
        }
        CHECK(oracle::norm2(once.values) <= oracle::norm2(x.values));
    }
}

TEST_CASE("attenuation factor limits and closed form") {
    CHECK(attenuation_alpha(std::numeric_limits<double>::infinity()) == 1.0);
    CHECK(attenuation_alpha(-std::numeric_limits<double>::infinity()) == 0.0);
    CHECK(attenuation_alpha(80.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(attenuation_alpha(-80.0) < 1e-3);
    CHECK(attenuation_alpha(0.0) == doctest::Approx(0.77151).epsilon(1e-5));
    double prev = 0.0;
    for (double cr = -20.0; cr <= 20.0; cr += 0.5) {
        const double a = attenuation_alpha(cr);
        CHECK(a >= 0.0);
        CHECK(a <= 1.0);
        CHECK(a >= prev);
        CHECK(std::abs(a - alpha_oracle(cr)) < 1e-10);
        prev = a;
    }
}

TEST_CASE("library erfc agrees with series and continued-fraction oracle") {
    for (double g : {0.5, 1.0, 2.0}) {
        CHECK(std::abs(std::erfc(g) / oracle::erfc(g) - 1.0) < 1e-10);
    }
}

TEST_CASE("attenuation factor matches a Monte Carlo correlation estimate") {
    std::mt19937_64 rng(22);
    const CVec x = oracle::random_gaussian(1'000'000, rng);
    TimeSignal s;
    s.values = x;
    const double sigma = std::sqrt(2.0);
    const TimeSignal y = clip(s, clip_threshold(0.0, sigma));
    cplx cross{};
    double power = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        cross += y.values[i] * std::conj(x[i]);
        power += std::norm(x[i]);
    }
    const double est = cross.real() / power;
    CHECK(std::abs(est - attenuation_alpha(0.0)) / attenuation_alpha(0.0) < 0.005);
}

TEST_CASE("distortion variance examples") {
    CHECK(d_variance(std::numeric_limits<double>::infinity(), 2.0) == 0.0);
    CHECK(d_variance(80.0, 2.0) == doctest::Approx(0.0));
    CHECK(d_variance(0.0, 2.0) == doctest::Approx(0.07377).epsilon(1e-4));
    CHECK(std::abs(d_variance(0.0, 2.0) - dvar_oracle(0.0, 2.0)) < 1e-12);
    CHECK(std::abs(d_variance(3.0, 2.0) - dvar_oracle(3.0, 2.0)) < 1e-12);
    CHECK(d_variance(3.0, 2.0) == doctest::Approx(0.0304503).epsilon(1e-5));
}

TEST_CASE("Nyquist-rate distortion statistics match the Gaussian model") {
    std::mt19937_64 rng(23);
    const std::size_t N = 512;
    const auto params = ClipParams::from_cr(0.0, 2.0, 1);
    const double a = attenuation_alpha(0.0);
    double d_energy = 0.0;
    double xbar_energy = 0.0;
    double ax_energy = 0.0;
    double x_energy = 0.0;
    double c_energy = 0.0;
    for (int f = 0; f < 1000; ++f) {
        const CVec X = random_qpsk(N, rng);
        const ClippedFrame fr = clip_and_filter(X, params);
        for (std::size_t k = 0; k < N; ++k) {
            const cplx D = fr.X_bar[k] - a * X[k];
            // C = (alpha - 1) X + D holds by definition.
            CHECK(std::abs(fr.C_freq[k] - ((a - 1.0) * X[k] + D)) < 1e-12);
            d_energy += std::norm(D);
            xbar_energy += std::norm(fr.X_bar[k]);
            ax_energy += std::norm(a * X[k]);
            x_energy += std::norm(X[k]);
            c_energy += std::norm(fr.C_freq[k]);
        }
    }
    const double samples = 1000.0 * N;
    const double dv = d_variance(0.0, 2.0);
    CHECK(std::abs(d_energy / samples - dv) / dv < 0.05);
    const double model_ratio = dv / (a * a * 2.0 + dv);
    CHECK(std::abs((d_energy / xbar_energy) - model_ratio) / model_ratio < 0.10);
    // Attenuated-model SCNR exceeds the additive-model SCNR.
    CHECK(ax_energy / d_energy >= x_energy / c_energy);
}

TEST_CASE("oversampled in-band distortion stays below the Nyquist-rate model") {
    // Out-of-band filtering removes part of the distortion, so the per-tone
    // variance at L = 4 is below the L = 1 closed form.
    std::mt19937_64 rng(24);
    const auto params = ClipParams::from_cr(0.0, 2.0, 4);
    const double a = attenuation_alpha(0.0);
    double d_energy = 0.0;
    double xbar_energy = 0.0;
    for (int f = 0; f < 1000; ++f) {
        const CVec X = random_qpsk(64, rng);
        const ClippedFrame fr = clip_and_filter(X, params);
        for (std::size_t k = 0; k < 64; ++k) {
            d_energy += std::norm(fr.X_bar[k] - a * X[k]);
            xbar_energy += std::norm(fr.X_bar[k]);
        }
    }
    const double dv = d_variance(0.0, 2.0);
    const double measured = d_energy / xbar_energy;
    CHECK(measured < dv / (a * a * 2.0 + dv));
    CHECK(measured > 0.0);
}

TEST_CASE("no clipping leaves a zero noise frame") {
    std::mt19937_64 rng(25);
    for (int L : {1, 4}) {
        const CVec X = random_qpsk(64, rng);
        const ClippedFrame fr = clip_and_filter(X, ClipParams::from_cr(40.0, 2.0, L));
        CHECK(fr.clip_count == 0);
        CHECK(oracle::norm2(fr.C_freq) < 1e-12);
        CHECK(oracle::norm2(fr.c_time) < 1e-12);
        CHECK(oracle::max_abs_diff(transmit_filtered_signal(fr).values, ofdm_modulate(X, L).values) < 1e-12);
    }
}

TEST_CASE("Nyquist-rate clipping noise is supported exactly on clipped samples") {
    std::mt19937_64 rng(26);
    const auto params = ClipParams::from_cr(0.0, 2.0, 1);
    for (int f = 0; f < 200; ++f) {
        const CVec X = random_qpsk(64, rng);
        const TimeSignal x = ofdm_modulate(X, 1);
        const ClippedFrame fr = filter_inband(clip(x, params.threshold_A), X);
        std::size_t support = 0;
        for (std::size_t n = 0; n < 64; ++n) {
            const bool clipped = std::abs(x.values[n]) > params.threshold_A;
            if (clipped) {
                ++support;
                CHECK(std::abs(fr.c_time[n]) > 0.0);
            } else {
                CHECK(std::abs(fr.c_time[n]) < 1e-10);
            }
        }
        CHECK(fr.clip_count == support);
        // Filtering is the identity at L = 1.
        CHECK(oracle::max_abs_diff(ofdm_modulate(fr.X_bar, 1).values, fr.x_clipped.values) < 1e-12);
    }
}

TEST_CASE("oversampled clipping noise is nearly sparse") {
    // K counts clipped samples at the oversampled rate; ceil(K / L) is the
    // matching count on the Nyquist grid.
    std::mt19937_64 rng(27);
    const int L = 4;
    const auto params = ClipParams::from_cr(0.0, 2.0, L);
    double worst = 0.0;
    for (int f = 0; f < 1000; ++f) {
        const ClippedFrame fr = clip_and_filter(random_qpsk(64, rng), params);
        std::vector<double> mag;
        double total = 0.0;
        for (const auto& z : fr.c_time) {
            mag.push_back(std::norm(z));
            total += std::norm(z);
        }
        std::sort(mag.rbegin(), mag.rend());
        const std::size_t keep = (fr.clip_count + L - 1) / L;
        double tail = 0.0;
        for (std::size_t i = keep; i < mag.size(); ++i) {
            tail += mag[i];
        }
        if (total > 0.0) {
            worst = std::max(worst, tail / total);
        }
    }
    CHECK(worst < 0.15);
}

TEST_CASE("filtered oversampled signal regrows peaks above the threshold") {
    std::mt19937_64 rng(28);
    const auto params = ClipParams::from_cr(0.0, 2.0, 4);
    int clipped = 0;
    int regrown = 0;
    for (int f = 0; f < 1000; ++f) {
        const ClippedFrame fr = clip_and_filter(random_qpsk(64, rng), params);
        if (fr.clip_count == 0) {
            continue;
        }
        ++clipped;
        double peak = 0.0;
        for (const auto& z : transmit_filtered_signal(fr).values) {
            peak = std::max(peak, std::abs(z));
        }
        regrown += peak > params.threshold_A ? 1 : 0;
    }
    REQUIRE(clipped > 0);
    CHECK(double(regrown) >= 0.99 * clipped);
}

TEST_CASE("K-peak reduction examples") {
    const PeakReduction one = k_peak_reduction(real_signal({4, 3, 2, 1}), 1);
    CHECK(one.sparsity == 1);
    CHECK(oracle::max_abs_diff(one.signal.values, real_signal({2.4, 3, 2, 1}).values) < 1e-15);

    const PeakReduction tie = k_peak_reduction(real_signal({4, 4, 2, 1}), 1);
    CHECK(oracle::max_abs_diff(tie.signal.values, real_signal({3.2, 4, 2, 1}).values) < 1e-15);

    const PeakReduction two = k_peak_reduction(real_signal({4, 3, 2, 1}), 2);
    CHECK(oracle::max_abs_diff(two.signal.values, real_signal({1.6, 1.6, 2, 1}).values) < 1e-15);

    CHECK_THROWS_AS(k_peak_reduction(real_signal({4, 3, 2, 1}), 0), std::invalid_argument);
    CHECK_THROWS_AS(k_peak_reduction(real_signal({4, 3, 2, 1}), 4), std::invalid_argument);
    TimeSignal over = ofdm_modulate(CVec(4, cplx{1, 0}), 2);
    CHECK_THROWS_AS(k_peak_reduction(over, 1), std::invalid_argument);
}

TEST_CASE("K-peak reduction noise is exactly K-sparse and phase preserving") {
    std::mt19937_64 rng(29);
    for (std::size_t K : {2u, 4u, 8u, 16u}) {
        const TimeSignal x = ofdm_modulate(random_qpsk(64, rng), 1);
        const PeakReduction pr = k_peak_reduction(x, K);
        std::size_t changed = 0;
        for (std::size_t n = 0; n < 64; ++n) {
            if (pr.signal.values[n] != x.values[n]) {
                ++changed;
                CHECK(std::abs(std::arg(pr.signal.values[n]) - std::arg(x.values[n])) < 1e-12);
            }
        }
        CHECK(changed == K);
        CHECK(pr.sparsity == K);
    }
}

}  // TEST_SUITE
