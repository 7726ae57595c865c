#include "clipcs/cs_cancel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace clipcs {

namespace {

bool dim_reliable(double y, const std::vector<double>& boundaries, double delta) {
    for (double b : boundaries) {
        if (std::abs(y - b) < delta) {
            return false;
        }
    }
    return true;
}

double norm2(std::span<const cplx> v) {
    double s = 0.0;
    for (const auto& z : v) {
        s += std::norm(z);
    }
    return std::sqrt(s);
}

cplx dot(std::span<const cplx> a, std::span<const cplx> b) {
    // a^H b
    cplx s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += std::conj(a[i]) * b[i];
    }
    return s;
}

SymbolDecisions decide_all(std::span<const cplx> y, const Constellation& c) {
    SymbolDecisions d;
    d.symbols.resize(y.size());
    d.bits.reserve(y.size() * static_cast<std::size_t>(c.bits_per_symbol));
    for (std::size_t k = 0; k < y.size(); ++k) {
        d.symbols[k] = decide_point(y[k], c);
        append_bits(d.symbols[k], c, d.bits);
    }
    return d;
}

}  // namespace

bool rr_member(cplx y, const Constellation& c, double delta) {
    const auto b = c.boundaries();
    return dim_reliable(y.real(), b, delta) && dim_reliable(y.imag(), b, delta);
}

Selection select_reliable(std::span<const cplx> Y_eq, double alpha, const Constellation& c, double delta) {
    if (!(alpha > 0.0)) {
        throw std::invalid_argument("select_reliable: alpha must be positive");
    }
    const auto b = c.boundaries();
    Selection sel;
    for (std::size_t k = 0; k < Y_eq.size(); ++k) {
        const cplx y = Y_eq[k] / alpha;
        if (dim_reliable(y.real(), b, delta) && dim_reliable(y.imag(), b, delta)) {
            sel.indices.push_back(k);
            sel.decided.push_back(decide_point(y, c));
        }
    }
    return sel;
}

CsProblem build_cs_problem(std::span<const cplx> Y_eq, const Selection& sel) {
    if (sel.indices.size() != sel.decided.size()) {
        throw std::invalid_argument("build_cs_problem: decisions must cover exactly the selected tones");
    }
    CsProblem p;
    p.n_ambient = Y_eq.size();
    p.selected_indices = sel.indices;
    p.estimated_symbols = sel.decided;
    p.observations.resize(sel.indices.size());
    for (std::size_t m = 0; m < sel.indices.size(); ++m) {
        p.observations[m] = Y_eq[sel.indices[m]] - sel.decided[m];
    }
    return p;
}

PartialFourier::PartialFourier(std::vector<std::size_t> rows, std::size_t n) : rows_(std::move(rows)), n_(n) {
    if (!is_power_of_two(n)) {
        throw std::invalid_argument("PartialFourier: ambient size must be a power of two");
    }
    for (auto r : rows_) {
        if (r >= n_) {
            throw std::invalid_argument("PartialFourier: row index out of range");
        }
    }
}

CVec PartialFourier::apply(std::span<const cplx> x) const {
    const CVec full = unitary_dft(x);
    CVec out(rows_.size());
    for (std::size_t m = 0; m < rows_.size(); ++m) {
        out[m] = full[rows_[m]];
    }
    return out;
}

CVec PartialFourier::adjoint(std::span<const cplx> r) const {
    CVec scattered(n_, cplx{});
    for (std::size_t m = 0; m < rows_.size(); ++m) {
        scattered[rows_[m]] = r[m];
    }
    return unitary_idft(scattered);
}

CVec PartialFourier::column(std::size_t j) const {
    const double scale = 1.0 / std::sqrt(static_cast<double>(n_));
    CVec col(rows_.size());
    for (std::size_t m = 0; m < rows_.size(); ++m) {
        const std::size_t phase = (rows_[m] * j) % n_;
        col[m] = std::polar(scale, -2.0 * std::numbers::pi * static_cast<double>(phase) / static_cast<double>(n_));
    }
    return col;
}

OmpConfig OmpConfig::defaults(std::size_t N, double clip_threshold_A) {
    OmpConfig cfg;
    cfg.max_iterations = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(0.125 * static_cast<double>(N))));
    cfg.stop_threshold = 0.05 * clip_threshold_A;
    return cfg;
}

SparseEstimate omp(const CsProblem& p, const OmpConfig& cfg) {
    if (p.rows() == 0) {
        throw std::invalid_argument("omp: at least one observation is required");
    }
    if (cfg.max_iterations < 1 || cfg.stop_threshold < 0.0) {
        throw std::invalid_argument("omp: invalid configuration");
    }
    const PartialFourier phi(p.selected_indices, p.n_ambient);
    const std::size_t M = p.rows();
    const std::size_t n = p.n_ambient;

    SparseEstimate est;
    CVec residual = p.observations;
    const double y_norm = norm2(p.observations);
    est.residual_norms.push_back(y_norm);
    if (y_norm == 0.0) {
        return est;
    }

    std::vector<CVec> q;                 // orthonormal basis of selected columns
    std::vector<std::vector<cplx>> r;    // r[i] = column i of R (length i+1)
    CVec z;                              // Q^H Y~
    std::vector<bool> used(n, false);
    std::vector<std::size_t> support;
    CVec values;
    double r00 = 0.0;

    const std::size_t cap = std::min(cfg.max_iterations, std::min(M, n));
    while (est.iterations_used < cap) {
        const CVec corr = phi.adjoint(residual);
        std::size_t best = n;
        double best_mag = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (used[j]) {
                continue;
            }
            const double mag = std::abs(corr[j]);
            if (best == n || mag > best_mag) {
                best = j;
                best_mag = mag;
            }
        }
        if (best == n || best_mag == 0.0) {
            break;
        }

        // Modified Gram-Schmidt with one re-orthogonalization pass.
        CVec a = phi.column(best);
        std::vector<cplx> rcol(q.size() + 1, cplx{});
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t l = 0; l < q.size(); ++l) {
                const cplx h = dot(q[l], a);
                rcol[l] += h;
                for (std::size_t m = 0; m < M; ++m) {
                    a[m] -= h * q[l][m];
                }
            }
        }
        const double diag = norm2(a);
        if (q.empty()) {
            r00 = diag;
        }
        if (!(diag > 1e-10 * r00)) {
            break;
        }
        ++est.iterations_used;
        rcol.back() = diag;
        for (auto& v : a) {
            v /= diag;
        }
        const cplx zi = dot(a, p.observations);

        // Back substitution on the extended triangle.
        const std::size_t k = q.size() + 1;
        std::vector<std::vector<cplx>> r_ext = r;
        r_ext.push_back(rcol);
        CVec z_ext = z;
        z_ext.push_back(zi);
        CVec x(k);
        for (std::size_t i = k; i-- > 0;) {
            cplx s = z_ext[i];
            for (std::size_t j = i + 1; j < k; ++j) {
                s -= r_ext[j][i] * x[j];
            }
            x[i] = s / r_ext[i][i];
        }
        if (std::abs(x.back()) < cfg.stop_threshold) {
            break;
        }

        used[best] = true;
        support.push_back(best);
        values = std::move(x);
        r = std::move(r_ext);
        z = std::move(z_ext);
        for (std::size_t m = 0; m < M; ++m) {
            residual[m] -= zi * a[m];
        }
        q.push_back(std::move(a));
        const double res_norm = norm2(residual);
        est.residual_norms.push_back(res_norm);
        if (res_norm <= 1e-13 * y_norm) {
            break;
        }
    }
    est.support = std::move(support);
    est.values = std::move(values);
    return est;
}

SparseEstimate largest_components(const CsProblem& p, const OmpConfig& cfg) {
    if (p.rows() != p.n_ambient) {
        throw std::invalid_argument("largest_components: requires a full observation (M = N)");
    }
    // Observations are in index order, so scattering is the identity.
    const CVec c_full = unitary_idft(p.observations);
    const std::size_t n = p.n_ambient;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return std::abs(c_full[a]) > std::abs(c_full[b]); });

    SparseEstimate est;
    const double y_norm = norm2(p.observations);
    est.residual_norms.push_back(y_norm);
    double energy = y_norm * y_norm;
    const std::size_t cap = std::min(cfg.max_iterations, n);
    for (std::size_t i = 0; i < cap; ++i) {
        const cplx v = c_full[order[i]];
        if (v == cplx{}) {
            break;
        }
        ++est.iterations_used;
        if (std::abs(v) < cfg.stop_threshold) {
            break;
        }
        est.support.push_back(order[i]);
        est.values.push_back(v);
        energy = std::max(0.0, energy - std::norm(v));
        est.residual_norms.push_back(std::sqrt(energy));
    }
    return est;
}

CVec to_dense(const SparseEstimate& est, std::size_t n) {
    CVec c(n, cplx{});
    for (std::size_t i = 0; i < est.support.size(); ++i) {
        c[est.support[i]] = est.values[i];
    }
    return c;
}

SymbolDecisions cancel_and_decide(std::span<const cplx> Y_eq, const SparseEstimate& est, const Constellation& c) {
    if (est.support.empty()) {
        return decide_all(Y_eq, c);
    }
    const CVec C_hat = unitary_dft(to_dense(est, Y_eq.size()));
    CVec y(Y_eq.size());
    for (std::size_t k = 0; k < y.size(); ++k) {
        y[k] = Y_eq[k] - C_hat[k];
    }
    return decide_all(y, c);
}

SymbolDecisions decide_uncancelled(std::span<const cplx> Y_eq, double alpha, const Constellation& c) {
    CVec y(Y_eq.begin(), Y_eq.end());
    for (auto& v : y) {
        v /= alpha;
    }
    return decide_all(y, c);
}

}  // namespace clipcs
