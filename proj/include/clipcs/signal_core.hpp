#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace clipcs {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;
using Bits = std::vector<std::uint8_t>;

enum class Scheme { QPSK, QAM16 };

/// Square QAM constellation with unit half-spacing: per-dimension levels are
/// odd integers, so adjacent points are exactly 2 apart. Not energy
/// normalized; E_s is 2 for QPSK and 10 for 16-QAM.
struct Constellation {
    Scheme scheme = Scheme::QPSK;
    int bits_per_symbol = 2;
    int V = 2;                    // per-dimension PAM order
    std::vector<double> levels;   // ascending
    CVec points;                  // indexed by bit label (MSB first)
    double Es = 2.0;

    static Constellation qpsk();
    static Constellation qam16();
    static Constellation from_name(std::string_view name);

    std::string name() const;

    // Interior per-dimension decision boundaries (0 for V=2; -2,0,2 for V=4).
    std::vector<double> boundaries() const;
};

/// Time-domain OFDM samples at L-times oversampling.
struct TimeSignal {
    CVec values;
    int oversample = 1;
    std::size_t n_subcarriers = 0;
};

bool is_power_of_two(std::size_t n);

/// Gray-labeled mapping, bits_per_symbol/2 bits per dimension (real first).
CVec map_bits(std::span<const std::uint8_t> bits, const Constellation& c, std::size_t N);

struct Decision {
    cplx point;
    Bits bits;
};

/// Minimum-distance decision. Exact boundary hits go to the smaller level.
Decision hard_decide(cplx y, const Constellation& c);
cplx decide_point(cplx y, const Constellation& c);
void append_bits(cplx point, const Constellation& c, Bits& out);

TimeSignal ofdm_modulate(std::span<const cplx> X, int L);
CVec ofdm_demodulate_inband(const TimeSignal& x);

double papr_db(const TimeSignal& x);

CVec unitary_dft(std::span<const cplx> v);
CVec unitary_idft(std::span<const cplx> v);

// Unnormalized in-place radix-2 transform; sign = -1 forward, +1 inverse.
void fft_inplace(std::span<cplx> data, int sign);

}  // namespace clipcs
