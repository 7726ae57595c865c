#include "clipcs/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "clipcs/clipper.hpp"

namespace clipcs {

namespace {

void check_args(int V, double delta, double N0_eff) {
    if (V < 2 || V % 2 != 0) {
        throw std::invalid_argument("analytic: V must be even and >= 2");
    }
    if (delta < 0.0 || delta >= 1.0) {
        throw std::invalid_argument("analytic: delta must lie in [0, 1)");
    }
    if (N0_eff < 0.0) {
        throw std::invalid_argument("analytic: effective noise variance must be non-negative");
    }
}

// Q(num / s) with s -> 0 handled as a step.
double q_scaled(double num, double s) {
    if (s == 0.0) {
        return num > 0.0 ? 0.0 : (num < 0.0 ? 1.0 : 0.5);
    }
    return q_function(num / s);
}

}  // namespace

double q_function(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

double p_in_rr_pam(int V, double delta, double N0_eff) {
    check_args(V, delta, N0_eff);
    const double s = std::sqrt(N0_eff / 2.0);
    double total = 0.0;
    for (int v = 0; v <= (V - 2) / 2; ++v) {
        double term = q_scaled(2 * v - 1 + V + delta, s) + q_scaled(-2 * v - 3 + V + delta, s);
        for (int vp = 0; vp <= V - 3; ++vp) {
            term += q_scaled(-2 * v + 2 * vp + 1 - V + delta, s) - q_scaled(-2 * v + 2 * vp + 3 - V - delta, s);
        }
        total += term;
    }
    return (2.0 / V) * total;
}

double p_in_rr_qam(int V, double delta, double N0_eff) {
    const double p = p_in_rr_pam(V, delta, N0_eff);
    return p * p;
}

double p_correct_and_in_rr(int V, double delta, double N0_eff) {
    check_args(V, delta, N0_eff);
    const double s = std::sqrt(N0_eff / 2.0);
    const double inner = 1.0 - (2.0 * (V - 1) / V) * q_scaled(1.0 - delta, s);
    return inner * inner;
}

double decision_error_given_rr(int V, double delta, double N0_eff) {
    const double p_rr = p_in_rr_qam(V, delta, N0_eff);
    if (!(p_rr > 0.0)) {
        throw std::domain_error("decision_error_given_rr: reliable region has zero probability");
    }
    const double err = 1.0 - p_correct_and_in_rr(V, delta, N0_eff) / p_rr;
    return std::clamp(err, 0.0, 1.0);
}

double expected_m(std::size_t N, int V, double delta, double N0_eff) {
    return static_cast<double>(N) * p_in_rr_qam(V, delta, N0_eff);
}

double effective_n0(double cr_db, double N0, double Es) {
    const double a = attenuation_alpha(cr_db);
    return (d_variance(cr_db, Es) + N0) / (a * a);
}

}  // namespace clipcs
