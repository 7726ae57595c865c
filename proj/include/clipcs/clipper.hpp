#pragma once

#include <cstddef>

#include "clipcs/signal_core.hpp"

namespace clipcs {

struct ClipParams {
    double cr_db = 0.0;
    double sigma = 1.0;        // rms amplitude, sqrt(E_s)
    double threshold_A = 1.0;  // sigma * 10^(cr_db/20)
    int oversample_L = 1;

    static ClipParams from_cr(double cr_db, double Es, int L);
};

/// Output of one clip-and-filter pass. X_bar = X + C_freq holds exactly by
/// construction; c_time is the Nyquist-rate clipping noise IDFT(C_freq).
struct ClippedFrame {
    TimeSignal x_clipped;
    CVec X_bar;
    CVec C_freq;
    CVec c_time;
    std::size_t clip_count = 0;
};

double clip_threshold(double cr_db, double sigma);

/// Phase-preserving amplitude limiter.
TimeSignal clip(const TimeSignal& x, double A);

/// Bussgang attenuation of a complex Gaussian input soft-limited at CR.
double attenuation_alpha(double cr_db);

/// Variance of the uncorrelated distortion term D(k), Gaussian-input model.
double d_variance(double cr_db, double Es);

/// In-band filtering of a clipped signal back to N tones. x_clipped must have
/// been produced from X by ofdm_modulate followed by clip.
ClippedFrame filter_inband(const TimeSignal& x_clipped, std::span<const cplx> X);

/// Modulate, clip at params.threshold_A, filter.
ClippedFrame clip_and_filter(std::span<const cplx> X, const ClipParams& params);

/// Re-modulates the filtered tones; peaks may regrow above A when L > 1.
TimeSignal transmit_filtered_signal(const ClippedFrame& frame);

struct PeakReduction {
    TimeSignal signal;
    std::size_t sparsity = 0;
};

/// Scales the K largest-magnitude samples to 80% of the (K+1)-th largest
/// magnitude. Magnitude ties are ranked by lower sample index.
PeakReduction k_peak_reduction(const TimeSignal& x, std::size_t K);

}  // namespace clipcs
