#pragma once

#include <random>

#include "clipcs/signal_core.hpp"

namespace clipcs {

using Rng = std::mt19937_64;

/// Per-tone frequency response and AWGN variance (complex, per tone).
struct ChannelModel {
    CVec H;
    double N0 = 0.0;

    static ChannelModel awgn(std::size_t N, double N0);
};

/// Y = H * X_bar + Z, with Z ~ CN(0, N0).
CVec transmit(std::span<const cplx> X_bar, const ChannelModel& ch, Rng& rng);

/// Zero-forcing equalizer. Throws on a zero channel tap.
CVec equalize(std::span<const cplx> Y, const ChannelModel& ch);

/// Eb/N0 is referenced to the unclipped symbol energy.
double ebno_to_n0(double ebno_db, const Constellation& c);

}  // namespace clipcs
