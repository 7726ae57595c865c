#include "clipcs/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "clipcs/analytic.hpp"
#include "clipcs/channel.hpp"
#include "clipcs/clipper.hpp"
#include "clipcs/cs_cancel.hpp"
#include "clipcs/ofdma.hpp"

namespace clipcs {

std::string to_string(ClipMode m) {
    switch (m) {
        case ClipMode::None:
            return "none";
        case ClipMode::NyquistClip:
            return "nyquist_clip";
        case ClipMode::ClipAndFilter:
            return "clip_and_filter";
        case ClipMode::KPeakReduction:
            return "k_peak_reduction";
    }
    return "none";
}

ClipMode clip_mode_from_string(std::string_view s) {
    if (s == "none") return ClipMode::None;
    if (s == "nyquist_clip") return ClipMode::NyquistClip;
    if (s == "clip_and_filter") return ClipMode::ClipAndFilter;
    if (s == "k_peak_reduction") return ClipMode::KPeakReduction;
    throw ConfigError({"clip_mode: unknown value '" + std::string(s) + "'"});
}

ConfigError::ConfigError(std::vector<std::string> p)
    : std::runtime_error([&] {
          std::string msg = "invalid configuration:";
          for (const auto& s : p) {
              msg += "\n  - " + s;
          }
          return msg;
      }()),
      problems(std::move(p)) {}

std::vector<std::string> ExperimentConfig::problems() const {
    std::vector<std::string> out;
    if (n_subcarriers < 2 || !is_power_of_two(n_subcarriers)) {
        out.push_back("n_subcarriers must be a power of two >= 2");
    }
    if (modulation != "qpsk" && modulation != "16qam") {
        out.push_back("modulation must be qpsk or 16qam");
    }
    if (oversample_L < 1) {
        out.push_back("oversample_L must be >= 1");
    }
    if (clip_mode == ClipMode::KPeakReduction) {
        if (oversample_L != 1) {
            out.push_back("k_peak_reduction requires oversample_L = 1");
        }
        if (k_peaks < 1 || k_peaks >= n_subcarriers) {
            out.push_back("k_peaks must satisfy 1 <= K < n_subcarriers");
        }
    }
    if (!(delta >= 0.0 && delta < 1.0)) {
        out.push_back("delta must lie in [0, 1)");
    }
    std::size_t ambient = n_subcarriers;
    if (ofdma) {
        if (ofdma->U < 0 || (is_power_of_two(n_subcarriers) && (std::size_t{1} << ofdma->U) > n_subcarriers)) {
            out.push_back("ofdma_U: n_subcarriers must be divisible by 2^U");
        } else {
            ambient = n_subcarriers >> ofdma->U;
            if (ofdma->user >= (std::size_t{1} << ofdma->U)) {
                out.push_back("ofdma_user must be < 2^U");
            }
        }
    }
    if (omp_max_iterations > ambient) {
        out.push_back("omp_max_iterations exceeds the reconstructed dimension");
    }
    if (ebno_grid_db.empty()) {
        out.push_back("ebno_grid_db must not be empty");
    }
    if (max_bits == 0) {
        out.push_back("max_bits must be positive");
    }
    if (min_bits > max_bits) {
        out.push_back("min_bits must not exceed max_bits");
    }
    if (batch_frames == 0) {
        out.push_back("batch_frames must be positive");
    }
    return out;
}

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
    const std::string t = trim(text);
    T value{};
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc{} || ptr != t.data() + t.size()) {
        throw ConfigError({std::string(key) + ": cannot parse '" + t + "'"});
    }
    return value;
}

bool parse_bool(std::string_view key, std::string_view text) {
    const std::string t = trim(text);
    if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
    if (t == "false" || t == "0" || t == "no" || t == "off") return false;
    throw ConfigError({std::string(key) + ": expected a boolean, got '" + t + "'"});
}

std::vector<double> parse_list(std::string_view key, std::string_view text) {
    std::vector<double> out;
    std::string t = trim(text);
    if (!t.empty() && (t.front() == '[' || t.front() == '{')) {
        t = t.substr(1, t.size() - 2);
    }
    std::stringstream ss(t);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!trim(item).empty()) {
            out.push_back(parse_number<double>(key, item));
        }
    }
    return out;
}

}  // namespace

void set_config_field(ExperimentConfig& cfg, std::string_view key_in, std::string_view value) {
    const std::string key = trim(key_in);
    const std::string v = trim(value);
    if (key == "n_subcarriers") {
        cfg.n_subcarriers = parse_number<std::size_t>(key, v);
    } else if (key == "modulation") {
        cfg.modulation = Constellation::from_name(v).name();
    } else if (key == "oversample_L") {
        cfg.oversample_L = parse_number<int>(key, v);
    } else if (key == "clip_mode") {
        const auto paren = v.find('(');
        if (paren != std::string::npos && v.back() == ')') {
            cfg.clip_mode = clip_mode_from_string(trim(std::string_view(v).substr(0, paren)));
            cfg.k_peaks = parse_number<std::size_t>("clip_mode", std::string_view(v).substr(paren + 1, v.size() - paren - 2));
        } else {
            cfg.clip_mode = clip_mode_from_string(v);
        }
    } else if (key == "k_peaks") {
        cfg.k_peaks = parse_number<std::size_t>(key, v);
    } else if (key == "cr_db") {
        cfg.cr_db = parse_number<double>(key, v);
    } else if (key == "delta") {
        cfg.delta = parse_number<double>(key, v);
    } else if (key == "cancel") {
        cfg.cancel = parse_bool(key, v);
    } else if (key == "omp_max_iterations") {
        cfg.omp_max_iterations = parse_number<std::size_t>(key, v);
    } else if (key == "omp_stop_threshold") {
        cfg.omp_stop_threshold = parse_number<double>(key, v);
    } else if (key == "full_observation_shortcut") {
        cfg.full_observation_shortcut = parse_bool(key, v);
    } else if (key == "ofdma_U") {
        if (v == "none") {
            cfg.ofdma.reset();
        } else {
            if (!cfg.ofdma) cfg.ofdma.emplace();
            cfg.ofdma->U = parse_number<int>(key, v);
        }
    } else if (key == "ofdma_user") {
        if (!cfg.ofdma) cfg.ofdma.emplace();
        cfg.ofdma->user = parse_number<std::size_t>(key, v);
    } else if (key == "ebno_grid_db") {
        cfg.ebno_grid_db = parse_list(key, v);
    } else if (key == "min_bits") {
        cfg.min_bits = static_cast<std::uint64_t>(parse_number<double>(key, v));
    } else if (key == "max_bits") {
        cfg.max_bits = static_cast<std::uint64_t>(parse_number<double>(key, v));
    } else if (key == "target_errors") {
        cfg.target_errors = parse_number<std::uint64_t>(key, v);
    } else if (key == "master_seed") {
        cfg.master_seed = parse_number<std::uint64_t>(key, v);
    } else if (key == "batch_frames") {
        cfg.batch_frames = parse_number<std::size_t>(key, v);
    } else {
        throw ConfigError({"unknown field '" + key + "'"});
    }
}

void apply_config_text(ExperimentConfig& cfg, std::string_view text) {
    std::vector<std::string> errors;
    std::stringstream ss{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        if (trim(line).empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            errors.push_back("line " + std::to_string(lineno) + ": expected 'key = value'");
            continue;
        }
        try {
            set_config_field(cfg, std::string_view(line).substr(0, eq), std::string_view(line).substr(eq + 1));
        } catch (const ConfigError& e) {
            for (const auto& p : e.problems) {
                errors.push_back("line " + std::to_string(lineno) + ": " + p);
            }
        } catch (const std::invalid_argument& e) {
            errors.push_back("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    if (!errors.empty()) {
        throw ConfigError(std::move(errors));
    }
}

ExperimentConfig load_config_file(const std::string& path, ExperimentConfig base) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError({"cannot open config file '" + path + "'"});
    }
    std::stringstream buf;
    buf << in.rdbuf();
    apply_config_text(base, buf.str());
    return base;
}

unsigned default_thread_count() {
    if (const char* env = std::getenv("CLIPCS_THREADS")) {
        unsigned n = 0;
        const std::string_view s(env);
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
        if (ec == std::errc{} && n > 0) {
            return n;
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t frame_seed(std::uint64_t master, std::uint64_t point, std::uint64_t frame) {
    return splitmix64(splitmix64(splitmix64(master) ^ point) ^ frame);
}

struct Pipeline {
    ExperimentConfig cfg;
    Constellation con;
    double N0 = 0.0;
    double alpha = 1.0;
    double clip_A = 0.0;
    OmpConfig omp;
    std::optional<UserPartition> part;
    std::size_t bits_per_frame = 0;
};

Pipeline make_pipeline(const ExperimentConfig& cfg, double ebno_db) {
    Pipeline p;
    p.cfg = cfg;
    p.con = Constellation::from_name(cfg.modulation);
    p.N0 = ebno_to_n0(ebno_db, p.con);
    p.clip_A = clip_threshold(cfg.cr_db, std::sqrt(p.con.Es));
    const bool bussgang = cfg.clip_mode == ClipMode::NyquistClip || cfg.clip_mode == ClipMode::ClipAndFilter;
    p.alpha = bussgang ? attenuation_alpha(cfg.cr_db) : 1.0;
    std::size_t ambient = cfg.n_subcarriers;
    if (cfg.ofdma) {
        p.part.emplace(cfg.ofdma->U, cfg.ofdma->user, cfg.n_subcarriers);
        ambient = p.part->user_size();
    }
    p.omp = OmpConfig::defaults(ambient, p.clip_A);
    if (cfg.omp_max_iterations > 0) {
        p.omp.max_iterations = cfg.omp_max_iterations;
    }
    if (cfg.omp_stop_threshold >= 0.0) {
        p.omp.stop_threshold = cfg.omp_stop_threshold;
    }
    p.bits_per_frame = ambient * static_cast<std::size_t>(p.con.bits_per_symbol);
    return p;
}

struct FrameTally {
    std::uint64_t bit_errors = 0;
    std::uint64_t bits = 0;
    std::uint64_t m_total = 0;
    std::uint64_t omp_iterations = 0;
    std::uint64_t empty_frames = 0;

    void add(const FrameTally& o) {
        bit_errors += o.bit_errors;
        bits += o.bits;
        m_total += o.m_total;
        omp_iterations += o.omp_iterations;
        empty_frames += o.empty_frames;
    }
};

CVec transmitted_tones(const Pipeline& p, const CVec& X) {
    switch (p.cfg.clip_mode) {
        case ClipMode::None:
            return X;
        case ClipMode::NyquistClip:
            return clip_and_filter(X, ClipParams::from_cr(p.cfg.cr_db, p.con.Es, 1)).X_bar;
        case ClipMode::ClipAndFilter:
            return clip_and_filter(X, ClipParams::from_cr(p.cfg.cr_db, p.con.Es, p.cfg.oversample_L)).X_bar;
        case ClipMode::KPeakReduction: {
            const auto reduced = k_peak_reduction(ofdm_modulate(X, 1), p.cfg.k_peaks);
            return ofdm_demodulate_inband(reduced.signal);
        }
    }
    return X;
}

FrameTally simulate_frame(const Pipeline& p, std::uint64_t seed) {
    Rng rng(seed);
    const std::size_t N = p.cfg.n_subcarriers;
    Bits bits(N * static_cast<std::size_t>(p.con.bits_per_symbol));
    for (auto& b : bits) {
        b = static_cast<std::uint8_t>(rng() >> 63);
    }
    const CVec X = map_bits(bits, p.con, N);
    const CVec X_bar = transmitted_tones(p, X);
    const ChannelModel ch = ChannelModel::awgn(N, p.N0);
    const CVec Y_eq = equalize(transmit(X_bar, ch, rng), ch);

    FrameTally t;
    SymbolDecisions decisions;
    std::vector<std::size_t> tone_of;  // tone index of each decided symbol
    if (p.part) {
        tone_of = p.part->interleaved_indices;
    } else {
        tone_of.resize(N);
        for (std::size_t k = 0; k < N; ++k) tone_of[k] = k;
    }

    if (!p.cfg.cancel) {
        const CVec rx = p.part ? interleaved_select(p.part->u, p.part->U, Y_eq) : Y_eq;
        decisions = decide_uncancelled(rx, p.alpha, p.con);
    } else {
        CsProblem problem;
        CVec rx;
        if (p.part) {
            auto up = build_user_cs_problem(Y_eq, *p.part, p.alpha, p.con, p.cfg.delta);
            problem = std::move(up.cs);
            rx = std::move(up.user_Y_eq);
        } else {
            problem = build_cs_problem(Y_eq, select_reliable(Y_eq, p.alpha, p.con, p.cfg.delta));
            rx = Y_eq;
        }
        t.m_total = problem.rows();
        SparseEstimate est;
        if (problem.rows() == 0) {
            t.empty_frames = 1;
        } else if (p.cfg.full_observation_shortcut && problem.rows() == problem.n_ambient) {
            est = largest_components(problem, p.omp);
        } else {
            est = omp(problem, p.omp);
        }
        t.omp_iterations = est.iterations_used;
        decisions = cancel_and_decide(rx, est, p.con);
    }

    const auto bps = static_cast<std::size_t>(p.con.bits_per_symbol);
    for (std::size_t m = 0; m < tone_of.size(); ++m) {
        for (std::size_t b = 0; b < bps; ++b) {
            t.bit_errors += decisions.bits[m * bps + b] != bits[tone_of[m] * bps + b];
        }
    }
    t.bits = tone_of.size() * bps;
    return t;
}

BerRecord run_point(const ExperimentConfig& cfg, std::size_t point_index, double ebno_db, unsigned threads) {
    const Pipeline pipe = make_pipeline(cfg, ebno_db);
    FrameTally total;
    std::uint64_t frames = 0;
    const unsigned workers = std::max(1u, threads);
    while (true) {
        if (total.bits >= cfg.max_bits) break;
        if (total.bits >= cfg.min_bits && total.bit_errors >= cfg.target_errors) break;
        const std::uint64_t remaining = (cfg.max_bits - total.bits + pipe.bits_per_frame - 1) / pipe.bits_per_frame;
        const std::uint64_t batch = std::min<std::uint64_t>(cfg.batch_frames, remaining);

        std::vector<FrameTally> partial(workers);
        auto work = [&](unsigned w) {
            for (std::uint64_t f = w; f < batch; f += workers) {
                partial[w].add(simulate_frame(pipe, frame_seed(cfg.master_seed, point_index, frames + f)));
            }
        };
        if (workers == 1) {
            work(0);
        } else {
            std::vector<std::jthread> pool;
            for (unsigned w = 0; w < workers; ++w) {
                pool.emplace_back(work, w);
            }
        }
        for (const auto& pt : partial) {
            total.add(pt);
        }
        frames += batch;
    }
    BerRecord r;
    r.ebno_db = ebno_db;
    r.bits_simulated = total.bits;
    r.bit_errors = total.bit_errors;
    r.ber = total.bits ? static_cast<double>(total.bit_errors) / static_cast<double>(total.bits) : 0.0;
    r.frames = frames;
    r.mean_M = frames ? static_cast<double>(total.m_total) / static_cast<double>(frames) : 0.0;
    r.mean_omp_iterations = frames ? static_cast<double>(total.omp_iterations) / static_cast<double>(frames) : 0.0;
    r.empty_selection_frames = total.empty_frames;
    return r;
}

}  // namespace

std::vector<BerRecord> run_ber(const ExperimentConfig& cfg, unsigned threads) {
    if (auto problems = cfg.problems(); !problems.empty()) {
        throw ConfigError(std::move(problems));
    }
    if (threads == 0) {
        threads = default_thread_count();
    }
    std::vector<BerRecord> out;
    for (std::size_t i = 0; i < cfg.ebno_grid_db.size(); ++i) {
        out.push_back(run_point(cfg, i, cfg.ebno_grid_db[i], threads));
    }
    return out;
}

std::vector<DeltaSweepRow> run_delta_sweep(const ExperimentConfig& cfg, const std::vector<double>& delta_grid,
                                           unsigned threads) {
    std::vector<DeltaSweepRow> rows;
    for (double d : delta_grid) {
        ExperimentConfig c = cfg;
        c.delta = d;
        c.cancel = true;
        for (auto& r : run_ber(c, threads)) {
            rows.push_back({d, r});
        }
    }
    return rows;
}

std::vector<AnalyticRow> run_analytic(std::size_t N, const Constellation& c, double cr_db,
                                      const std::vector<double>& delta_grid, const std::vector<double>& ebno_grid_db) {
    std::vector<AnalyticRow> rows;
    for (double ebno : ebno_grid_db) {
        for (double d : delta_grid) {
            AnalyticRow r;
            r.V = c.V;
            r.delta = d;
            r.cr_db = cr_db;
            r.ebno_db = ebno;
            r.N0 = ebno_to_n0(ebno, c);
            r.N0_eff = effective_n0(cr_db, r.N0, c.Es);
            r.p_in_rr_pam = p_in_rr_pam(c.V, d, r.N0_eff);
            r.p_in_rr = p_in_rr_qam(c.V, d, r.N0_eff);
            r.p_correct_in_rr = p_correct_and_in_rr(c.V, d, r.N0_eff);
            r.p_error_given_rr = decision_error_given_rr(c.V, d, r.N0_eff);
            r.expected_m = expected_m(N, c.V, d, r.N0_eff);
            rows.push_back(r);
        }
    }
    return rows;
}

std::string format_g6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

namespace {

std::string record_fields(const BerRecord& r) {
    return format_g6(r.ebno_db) + ',' + std::to_string(r.bits_simulated) + ',' + std::to_string(r.bit_errors) + ',' +
           format_g6(r.ber) + ',' + format_g6(r.mean_M) + ',' + format_g6(r.mean_omp_iterations) + ',' +
           std::to_string(r.frames);
}

}  // namespace

std::string ber_csv(const std::vector<BerRecord>& records) {
    std::string out = "ebno_db,bits,bit_errors,ber,mean_M,mean_omp_iters,frames\n";
    for (const auto& r : records) {
        out += record_fields(r) + '\n';
    }
    return out;
}

std::string delta_sweep_csv(const std::vector<DeltaSweepRow>& rows) {
    std::string out = "delta,ebno_db,bits,bit_errors,ber,mean_M,mean_omp_iters,frames\n";
    for (const auto& row : rows) {
        out += format_g6(row.delta) + ',' + record_fields(row.record) + '\n';
    }
    return out;
}

std::string analytic_csv(const std::vector<AnalyticRow>& rows) {
    std::string out =
        "V,delta,cr_db,ebno_db,N0,N0_eff,p_in_rr_pam,p_in_rr,p_correct_in_rr,p_error_given_rr,expected_M\n";
    for (const auto& r : rows) {
        out += std::to_string(r.V) + ',' + format_g6(r.delta) + ',' + format_g6(r.cr_db) + ',' + format_g6(r.ebno_db) +
               ',' + format_g6(r.N0) + ',' + format_g6(r.N0_eff) + ',' + format_g6(r.p_in_rr_pam) + ',' +
               format_g6(r.p_in_rr) + ',' + format_g6(r.p_correct_in_rr) + ',' + format_g6(r.p_error_given_rr) + ',' +
               format_g6(r.expected_m) + '\n';
    }
    return out;
}

}  // namespace clipcs
