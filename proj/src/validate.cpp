#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "clipcs/analytic.hpp"
#include "clipcs/channel.hpp"
#include "clipcs/clipper.hpp"
#include "clipcs/cs_cancel.hpp"
#include "clipcs/experiment.hpp"
#include "clipcs/ofdma.hpp"

namespace clipcs {

namespace {

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

CVec random_vector(std::size_t n, Rng& rng) {
    std::normal_distribution<double> g;
    CVec v(n);
    for (auto& z : v) {
        z = {g(rng), g(rng)};
    }
    return v;
}

double rel_error(std::span<const cplx> a, std::span<const cplx> b) {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += std::norm(a[i] - b[i]);
        den += std::norm(b[i]);
    }
    return den > 0 ? std::sqrt(num / den) : std::sqrt(num);
}

double worst_factorization_error(const FftFactorization& fact, Rng& rng, int trials) {
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        const CVec v = random_vector(fact.size(), rng);
        worst = std::max(worst, rel_error(fact.transform(v), unitary_dft(v)));
    }
    return worst;
}

CheckResult check_factorization(Rng& rng) {
    double worst = 0.0;
    for (std::size_t n : {8u, 64u, 512u}) {
        worst = std::max(worst, worst_factorization_error(FftFactorization(n), rng, 100));
    }
    return {"factorization identity O*T_b...T_1 = F (N = 8, 64, 512)", worst < 1e-10, "max rel err " + sci(worst)};
}

CheckResult check_negative_control(Rng& rng) {
    const double err = worst_factorization_error(FftFactorization(64, true), rng, 10);
    return {"negative control: perturbed twiddle sign is detected", err > 1e-3, "rel err " + sci(err)};
}

CheckResult check_permutation_and_commutation(Rng& rng) {
    bool perm_exact = true;
    double comm = 0.0;
    for (std::size_t n : {8u, 64u, 512u}) {
        const FftFactorization fact(n);
        for (int U = 0; U <= 3 && (std::size_t{1} << U) <= n / 2; ++U) {
            const FftFactorization user_fact(n >> U);
            for (std::size_t u = 0; u < (std::size_t{1} << U); ++u) {
                const UserPartition part(U, u, n);
                const CVec v = random_vector(n, rng);
                const CVec lhs = interleaved_select(u, U, fact.order(v));
                const CVec rhs = user_fact.order(adjacent_select(u, U, v));
                perm_exact = perm_exact && lhs == rhs;

                CVec t = v;
                fact.apply_stages(U + 1, fact.stages(), t);
                const CVec a = adjacent_select(u, U, t);
                CVec b = adjacent_select(u, U, v);
                if (user_fact.stages() > 0) {
                    user_fact.apply_stages(1, user_fact.stages(), b);
                }
                comm = std::max(comm, rel_error(a, b));
            }
        }
    }
    return {"permutation P^I O = O' P^A exact; commutation P^A T = T' P^A", perm_exact && comm < 1e-12,
            std::string(perm_exact ? "exact" : "MISMATCH") + ", commutation err " + sci(comm)};
}

CheckResult check_round_trip(Rng& rng) {
    double worst = 0.0;
    for (int L : {1, 4}) {
        for (int t = 0; t < 20; ++t) {
            const CVec X = random_vector(64, rng);
            const CVec back = ofdm_demodulate_inband(ofdm_modulate(X, L));
            worst = std::max(worst, rel_error(back, X));
        }
    }
    return {"OFDM modulate/demodulate round trip (L = 1, 4)", worst < 1e-12, "max rel err " + sci(worst)};
}

CheckResult check_exact_sparsity(Rng& rng) {
    const auto qpsk = Constellation::qpsk();
    const auto params = ClipParams::from_cr(0.0, qpsk.Es, 1);
    double worst = 0.0;
    for (int f = 0; f < 200; ++f) {
        Bits bits(128);
        for (auto& b : bits) b = static_cast<std::uint8_t>(rng() >> 63);
        const CVec X = map_bits(bits, qpsk, 64);
        const TimeSignal x = ofdm_modulate(X, 1);
        const ClippedFrame frame = clip_and_filter(X, params);
        for (std::size_t n = 0; n < 64; ++n) {
            if (std::abs(x.values[n]) <= params.threshold_A) {
                worst = std::max(worst, std::abs(frame.c_time[n]));
            }
        }
    }
    return {"exact clipping-noise sparsity at L = 1", worst < 1e-10, "max off-support |c| " + sci(worst)};
}

CheckResult check_omp_recovery(Rng& rng) {
    int ok = 0;
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<std::size_t> perm(64);
        for (std::size_t i = 0; i < 64; ++i) perm[i] = i;
        std::shuffle(perm.begin(), perm.end(), rng);
        CVec c(64, cplx{});
        for (int k = 0; k < 4; ++k) c[perm[k]] = {g(rng), g(rng)};
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<std::size_t> rows(perm.begin(), perm.begin() + 32);
        std::sort(rows.begin(), rows.end());
        const PartialFourier phi(rows, 64);
        CsProblem p;
        p.n_ambient = 64;
        p.selected_indices = rows;
        p.observations = phi.apply(c);
        p.estimated_symbols.assign(rows.size(), cplx{});
        const SparseEstimate est = omp(p, OmpConfig{8, 0.0});
        const CVec chat = to_dense(est, 64);
        bool same_support = est.support.size() == 4;
        for (auto j : est.support) same_support = same_support && c[j] != cplx{};
        double err = 0.0;
        for (std::size_t i = 0; i < 64; ++i) err += std::norm(chat[i] - c[i]);
        ok += (same_support && std::sqrt(err) < 1e-8) ? 1 : 0;
    }
    return {"OMP noiseless recovery (N = 64, K = 4, M = 32)", ok >= 99, std::to_string(ok) + "/100 exact"};
}

CheckResult check_expected_m(unsigned threads) {
    ExperimentConfig cfg;
    cfg.n_subcarriers = 64;
    cfg.clip_mode = ClipMode::NyquistClip;
    cfg.cr_db = 0.0;
    cfg.delta = 0.4;
    cfg.ebno_grid_db = {6.0};
    cfg.max_bits = 128 * 400;
    cfg.min_bits = cfg.max_bits;
    cfg.master_seed = 7;
    const auto rec = run_ber(cfg, threads).front();
    const auto c = Constellation::qpsk();
    const double em = expected_m(64, 2, 0.4, effective_n0(0.0, ebno_to_n0(6.0, c), c.Es));
    const double rel = std::abs(rec.mean_M - em) / em;
    return {"E[M] formula vs. simulated mean |K_RR| (N = 64, CR = 0 dB, 6 dB, delta = 0.4)", rel < 0.05,
            "analytic " + format_g6(em) + ", simulated " + format_g6(rec.mean_M)};
}

CheckResult check_determinism() {
    ExperimentConfig cfg;
    cfg.n_subcarriers = 64;
    cfg.ebno_grid_db = {4.0, 8.0};
    cfg.max_bits = 40'000;
    cfg.target_errors = 50;
    cfg.batch_frames = 64;
    cfg.master_seed = 99;
    const std::string one = ber_csv(run_ber(cfg, 1));
    const std::string four = ber_csv(run_ber(cfg, 4));
    const std::string again = ber_csv(run_ber(cfg, 4));
    return {"seeded runs are byte-identical across worker counts", one == four && four == again,
            one == four && four == again ? "identical" : "DIFFERENT"};
}

}  // namespace

bool ValidationReport::all_passed() const {
    for (const auto& c : checks) {
        if (!c.passed) {
            return false;
        }
    }
    return !checks.empty();
}

ValidationReport validate(unsigned threads) {
    if (threads == 0) {
        threads = default_thread_count();
    }
    Rng rng(20240917);
    ValidationReport report;
    report.checks.push_back(check_factorization(rng));
    report.checks.push_back(check_negative_control(rng));
    report.checks.push_back(check_permutation_and_commutation(rng));
    report.checks.push_back(check_round_trip(rng));
    report.checks.push_back(check_exact_sparsity(rng));
    report.checks.push_back(check_omp_recovery(rng));
    report.checks.push_back(check_expected_m(threads));
    report.checks.push_back(check_determinism());
    return report;
}

}  // namespace clipcs
