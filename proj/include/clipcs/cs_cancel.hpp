#pragma once

#include <cstddef>
#include <vector>

#include "clipcs/signal_core.hpp"

namespace clipcs {

/// Margin around interior decision boundaries, in units where adjacent
/// constellation points are 2 apart. 0 <= delta < 1.
struct RrParams {
    double delta = 0.4;
};

bool rr_member(cplx y, const Constellation& c, double delta);

/// Reliable tones and their hard decisions. `indices` is strictly increasing.
struct Selection {
    std::vector<std::size_t> indices;
    CVec decided;
};

Selection select_reliable(std::span<const cplx> Y_eq, double alpha, const Constellation& c, double delta);

/// Compressed observations Y~(m) = Y_eq(k_m) - X^(k_m) of the time-domain
/// clipping noise through the row-restricted unitary DFT.
struct CsProblem {
    CVec observations;
    std::vector<std::size_t> selected_indices;
    std::size_t n_ambient = 0;
    CVec estimated_symbols;

    std::size_t rows() const { return observations.size(); }
};

CsProblem build_cs_problem(std::span<const cplx> Y_eq, const Selection& sel);

/// Row-restriction of the n-point unitary DFT, applied through full-size
/// transforms. Never materializes the M x n matrix.
class PartialFourier {
public:
    PartialFourier(std::vector<std::size_t> rows, std::size_t n);

    std::size_t rows() const { return rows_.size(); }
    std::size_t cols() const { return n_; }

    /// Phi * x for a dense length-n x.
    CVec apply(std::span<const cplx> x) const;
    /// Phi^H * r, length n.
    CVec adjoint(std::span<const cplx> r) const;
    /// Column j of Phi, length M.
    CVec column(std::size_t j) const;

private:
    std::vector<std::size_t> rows_;
    std::size_t n_;
};

struct OmpConfig {
    std::size_t max_iterations = 8;
    double stop_threshold = 0.0;

    /// Defaults: ceil(0.125 N) iterations, threshold 5% of the clip level A.
    static OmpConfig defaults(std::size_t N, double clip_threshold_A);
};

struct SparseEstimate {
    std::vector<std::size_t> support;
    CVec values;
    std::size_t iterations_used = 0;    // iterations run, including a discarded final one
    std::vector<double> residual_norms;  // after each accepted atom; [0] is ||Y~||
};

/// Orthogonal matching pursuit with incremental QR least squares. Stops at
/// max_iterations, when the newest least-squares component drops below
/// stop_threshold (that component is discarded), on a numerically zero
/// residual, or on a rank-deficient column.
SparseEstimate omp(const CsProblem& p, const OmpConfig& cfg);

/// Full-observation shortcut (M = n): keep the largest-magnitude entries of
/// the IDFT of the observations, subject to the same iteration cap and
/// threshold as omp. Equivalent to omp when Phi is unitary.
SparseEstimate largest_components(const CsProblem& p, const OmpConfig& cfg);

CVec to_dense(const SparseEstimate& est, std::size_t n);

struct SymbolDecisions {
    CVec symbols;
    Bits bits;
};

/// Hard decisions on Y_eq - F * c^.
SymbolDecisions cancel_and_decide(std::span<const cplx> Y_eq, const SparseEstimate& est, const Constellation& c);

/// Decisions on Y_eq / alpha with no cancellation.
SymbolDecisions decide_uncancelled(std::span<const cplx> Y_eq, double alpha, const Constellation& c);

}  // namespace clipcs
