#pragma once

#include <cstddef>

namespace clipcs {

// Closed-form reliable-region statistics under the Gaussian distortion model
// for Nyquist-rate clipping. N0_eff is the complex variance of the scaled
// disturbance (1/alpha) * (D + Z); per-dimension variance is N0_eff / 2.

double q_function(double z);

/// Probability that one PAM dimension of (1/alpha) Y lands in the reliable
/// region, averaged over equiprobable V-PAM levels.
double p_in_rr_pam(int V, double delta, double N0_eff);

/// V^2-QAM: square of the per-dimension probability.
double p_in_rr_qam(int V, double delta, double N0_eff);

/// P(correct decision and in reliable region) for V^2-QAM.
double p_correct_and_in_rr(int V, double delta, double N0_eff);

/// P(decision error | in reliable region). Throws if P(in RR) is 0.
double decision_error_given_rr(int V, double delta, double N0_eff);

double expected_m(std::size_t N, int V, double delta, double N0_eff);

/// (E|D|^2 + N0) / alpha^2.
double effective_n0(double cr_db, double N0, double Es);

struct AnalyticScenario {
    int V = 2;
    double delta = 0.4;
    double cr_db = 0.0;
    double N0 = 0.0;
    double Es = 2.0;

    double n0_eff() const { return effective_n0(cr_db, N0, Es); }
};

}  // namespace clipcs
