#pragma once

#include <cstddef>
#include <vector>

#include "clipcs/cs_cancel.hpp"
#include "clipcs/signal_core.hpp"

namespace clipcs {

/// Radix-2 decimation-in-frequency factorization F = O * T_b * ... * T_1 of
/// the N-point unitary DFT. Stage i works on blocks of N / 2^(i-1) points:
/// sums go to the upper half, twiddled differences to the lower half. Each
/// stage carries a 1/sqrt(2) factor so every stage is unitary. O is the
/// bit-reversal permutation.
class FftFactorization {
public:
    explicit FftFactorization(std::size_t n, bool flip_twiddle_sign = false);

    std::size_t size() const { return n_; }
    int stages() const { return b_; }

    /// Applies T_stage (1-based) in place.
    void apply_stage(int stage, std::span<cplx> v) const;
    /// Applies T_last * ... * T_first in place.
    void apply_stages(int first, int last, std::span<cplx> v) const;
    /// O * t: out[k] = t[bitrev(k)].
    CVec order(std::span<const cplx> t) const;
    CVec order_inverse(std::span<const cplx> s) const;
    /// O * T_b * ... * T_1 * v.
    CVec transform(std::span<const cplx> v) const;

private:
    std::size_t n_;
    int b_;
    bool flip_;
};

std::size_t bit_reverse(std::size_t value, int bits);
int log2_exact(std::size_t n);

/// 2^U interleaved users on N = 2^b tones. User u owns tones u + m * 2^U.
struct UserPartition {
    int U = 0;
    std::size_t u = 0;
    std::size_t n = 0;
    std::vector<std::size_t> interleaved_indices;
    std::vector<std::size_t> adjacent_indices;

    UserPartition(int U, std::size_t u, std::size_t n);

    std::size_t user_size() const { return n >> U; }
};

CVec interleaved_select(std::size_t u, int U, std::span<const cplx> v);
CVec adjacent_select(std::size_t u, int U, std::span<const cplx> v);

/// c' = P^A_u * T_U * ... * T_1 * c.
CVec fold_clipping_noise(std::span<const cplx> c, const UserPartition& part, const FftFactorization& fact);

/// Per-user CS problem over the N/2^U-point DFT. Only user u's tones are used.
struct UserCsProblem {
    CsProblem cs;
    CVec user_Y_eq;
};

UserCsProblem build_user_cs_problem(std::span<const cplx> Y_eq, const UserPartition& part, double alpha,
                                    const Constellation& c, double delta);

SymbolDecisions user_cancel_and_decide(std::span<const cplx> Y_eq, const UserPartition& part,
                                       const SparseEstimate& est, const Constellation& c);

}  // namespace clipcs
