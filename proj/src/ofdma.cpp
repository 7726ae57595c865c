#include "clipcs/ofdma.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace clipcs {

std::size_t bit_reverse(std::size_t value, int bits) {
    std::size_t r = 0;
    for (int i = 0; i < bits; ++i) {
        r = (r << 1) | ((value >> i) & 1u);
    }
    return r;
}

int log2_exact(std::size_t n) {
    if (!is_power_of_two(n)) {
        throw std::invalid_argument("size must be a power of two, got " + std::to_string(n));
    }
    int b = 0;
    while ((std::size_t{1} << b) < n) {
        ++b;
    }
    return b;
}

FftFactorization::FftFactorization(std::size_t n, bool flip_twiddle_sign)
    : n_(n), b_(log2_exact(n)), flip_(flip_twiddle_sign) {}

void FftFactorization::apply_stage(int stage, std::span<cplx> v) const {
    if (stage < 1 || stage > b_ || v.size() != n_) {
        throw std::invalid_argument("FftFactorization: bad stage or vector length");
    }
    const std::size_t block = n_ >> (stage - 1);
    const std::size_t half = block / 2;
    const double sign = flip_ ? 1.0 : -1.0;
    const double s = std::numbers::sqrt2 / 2.0;
    for (std::size_t k = 0; k < half; ++k) {
        const cplx w = std::polar(s, sign * 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(block));
        for (std::size_t start = 0; start < n_; start += block) {
            const cplx a = v[start + k];
            const cplx b = v[start + k + half];
            v[start + k] = s * (a + b);
            v[start + k + half] = (a - b) * w;
        }
    }
}

void FftFactorization::apply_stages(int first, int last, std::span<cplx> v) const {
    for (int i = first; i <= last; ++i) {
        apply_stage(i, v);
    }
}

CVec FftFactorization::order(std::span<const cplx> t) const {
    CVec out(n_);
    for (std::size_t k = 0; k < n_; ++k) {
        out[k] = t[bit_reverse(k, b_)];
    }
    return out;
}

CVec FftFactorization::order_inverse(std::span<const cplx> s) const {
    CVec out(n_);
    for (std::size_t k = 0; k < n_; ++k) {
        out[bit_reverse(k, b_)] = s[k];
    }
    return out;
}

CVec FftFactorization::transform(std::span<const cplx> v) const {
    CVec t(v.begin(), v.end());
    apply_stages(1, b_, t);
    return order(t);
}

UserPartition::UserPartition(int U_, std::size_t u_, std::size_t n_) : U(U_), u(u_), n(n_) {
    const int b = log2_exact(n);
    if (U < 0 || U > b) {
        throw std::invalid_argument("UserPartition: 2^U must divide N");
    }
    const std::size_t users = std::size_t{1} << U;
    if (u >= users) {
        throw std::invalid_argument("UserPartition: user index out of range");
    }
    const std::size_t m_count = n >> U;
    const int b_user = b - U;
    interleaved_indices.resize(m_count);
    adjacent_indices.resize(m_count);
    for (std::size_t m = 0; m < m_count; ++m) {
        interleaved_indices[m] = u + m * users;
        // Row p of (O')^-1 P^I_u O.
        adjacent_indices[m] = bit_reverse(u + bit_reverse(m, b_user) * users, b);
    }
}

CVec interleaved_select(std::size_t u, int U, std::span<const cplx> v) {
    const UserPartition part(U, u, v.size());
    CVec out(part.user_size());
    for (std::size_t m = 0; m < out.size(); ++m) {
        out[m] = v[part.interleaved_indices[m]];
    }
    return out;
}

CVec adjacent_select(std::size_t u, int U, std::span<const cplx> v) {
    const UserPartition part(U, u, v.size());
    CVec out(part.user_size());
    for (std::size_t m = 0; m < out.size(); ++m) {
        out[m] = v[part.adjacent_indices[m]];
    }
    return out;
}

CVec fold_clipping_noise(std::span<const cplx> c, const UserPartition& part, const FftFactorization& fact) {
    if (c.size() != part.n || fact.size() != part.n) {
        throw std::invalid_argument("fold_clipping_noise: size mismatch");
    }
    CVec t(c.begin(), c.end());
    fact.apply_stages(1, part.U, t);
    CVec out(part.user_size());
    for (std::size_t m = 0; m < out.size(); ++m) {
        out[m] = t[part.adjacent_indices[m]];
    }
    return out;
}

UserCsProblem build_user_cs_problem(std::span<const cplx> Y_eq, const UserPartition& part, double alpha,
                                    const Constellation& c, double delta) {
    UserCsProblem up;
    up.user_Y_eq = interleaved_select(part.u, part.U, Y_eq);
    const Selection sel = select_reliable(up.user_Y_eq, alpha, c, delta);
    up.cs = build_cs_problem(up.user_Y_eq, sel);
    return up;
}

SymbolDecisions user_cancel_and_decide(std::span<const cplx> Y_eq, const UserPartition& part,
                                       const SparseEstimate& est, const Constellation& c) {
    const CVec user = interleaved_select(part.u, part.U, Y_eq);
    return cancel_and_decide(user, est, c);
}

}  // namespace clipcs
