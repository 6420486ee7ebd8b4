// covertsim: covert PPM link simulator and bounds calculator.
//
// Subcommands: simulate, figure-data, capacity, bounds.
// Exit codes: 0 ok, 2 config/usage error, 3 runtime error.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "covert/adversary.hpp"
#include "covert/bounds.hpp"
#include "covert/config.hpp"
#include "covert/errors.hpp"
#include "covert/ppm_link.hpp"
#include "covert/rs.hpp"
#include "covert/simkit.hpp"

namespace {

using namespace covert;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

struct OutputTarget {
    std::ostream* stream = &std::cout;
    std::unique_ptr<std::ofstream> file;

    void open(const std::string& path) {
        if (path.empty()) return;
        file = std::make_unique<std::ofstream>(path);
        if (!*file) throw std::runtime_error("cannot open output file '" + path + "'");
        stream = file.get();
    }
};

struct SweepOptions {
    std::string config_path;
    std::string n_list;
    std::string regime = "explicit";
    std::string out_path;
    std::string per_trial_path;
    std::string export_bits_path;
    std::string pr_model = "detected";
    std::vector<std::string> overrides;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::int64_t trials = 0;
    int workers = 0;
    bool no_bob = false;
};

void add_sweep_flags(CLI::App* cmd, SweepOptions& opt, bool with_export) {
    cmd->add_option("--config", opt.config_path, "flat key=value config file")->required();
    cmd->add_option("--n-list", opt.n_list,
                    "comma-separated sweep of n values (default: the config's n)");
    cmd->add_option("--regime", opt.regime,
                    "careful | careless | fixed-0.003 | fixed-0.008 | explicit");
    cmd->add_option("--seed", opt.seed, "master seed (overrides config)")
        ->each([&](const std::string&) { opt.seed_set = true; });
    cmd->add_option("--trials", opt.trials, "Monte-Carlo trials per sweep point");
    cmd->add_option("--workers", opt.workers, "worker threads (0 = hardware)");
    cmd->add_option("--out", opt.out_path, "output CSV path (default stdout)");
    cmd->add_option("--set", opt.overrides, "config override key=value (repeatable)");
    cmd->add_option("--per-trial", opt.per_trial_path, "also write a per-trial CSV here");
    cmd->add_option("--pr-model", opt.pr_model,
                    "pulse detection model: detected (nbar_det_w) | raw (eta_w*nbar)");
    if (with_export) {
        cmd->add_option("--export-bits", opt.export_bits_path,
                        "write trial 0's interleaved mode sequence as a packed bit file");
    }
}

struct SweepPlan {
    RunConfig base;
    std::vector<std::int64_t> n_values;
    Regime regime;
    std::uint64_t seed;
    std::int64_t trials;
    int workers;
    PulseDetectionModel pr_model;
};

SweepPlan make_plan(SweepOptions& opt) {
    SweepPlan plan;
    plan.base = parse_config_file(opt.config_path);
    for (const std::string& ov : opt.overrides) apply_config_override(plan.base, ov);
    plan.regime = parse_regime(opt.regime);
    plan.seed = opt.seed_set ? opt.seed : plan.base.seed;
    plan.trials = opt.trials > 0 ? opt.trials : plan.base.trials;
    plan.workers = opt.workers > 0
                       ? opt.workers
                       : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    if (opt.pr_model == "detected") {
        plan.pr_model = PulseDetectionModel::detected_mean;
    } else if (opt.pr_model == "raw") {
        plan.pr_model = PulseDetectionModel::raw_channel;
    } else {
        throw ConfigError("--pr-model must be 'detected' or 'raw'");
    }
    if (opt.n_list.empty()) {
        plan.n_values.push_back(plan.base.session.n);
    } else {
        std::stringstream ss(opt.n_list);
        std::string item;
        while (std::getline(ss, item, ',')) {
            if (item.empty()) continue;
            double v = 0.0;
            try {
                std::size_t used = 0;
                v = std::stod(item, &used);
                if (used != item.size()) throw std::invalid_argument("trailing junk");
            } catch (const std::exception&) {
                throw ConfigError("--n-list entry '" + item + "' is not a number");
            }
            if (!(v >= 2.0) || std::fabs(v - std::llround(v)) > 1e-6 * std::fabs(v) + 0.5) {
                throw ConfigError("--n-list entry '" + item + "' is not a positive integer");
            }
            plan.n_values.push_back(std::llround(v));
        }
    }
    if (plan.n_values.empty()) throw ConfigError("sweep list of n values is empty");
    return plan;
}

ExperimentConfig point_config(const SweepPlan& plan, std::int64_t n, std::uint64_t seed,
                              std::int64_t trials, bool run_bob) {
    ExperimentConfig cfg;
    cfg.session = plan.base.session;
    cfg.session.n = n;
    cfg.params = plan.base.params;
    cfg.trials = trials;
    cfg.master_seed = seed;
    cfg.regime = plan.regime;
    cfg.workers = plan.workers;
    cfg.run_bob = run_bob;
    cfg.pr_model = plan.pr_model;
    validate_session({n, cfg.session.Q, 0.0, cfg.session.rs_n, cfg.session.rs_k}, cfg.params);
    return cfg;
}

std::uint64_t point_seed(std::uint64_t master, std::size_t point, std::uint64_t batch) {
    return Rng::stream(master, 0xC0FFEEULL + point, batch).next();
}

void write_per_trial(const std::string& path, const ExperimentResult& result) {
    if (path.empty()) return;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open per-trial CSV '" + path + "'");
    out << "trial,llr_h0,llr_h1,bob_decoded_bits,bob_symbol_errors,bob_erasures,"
           "rs_block_failures\n";
    for (std::size_t i = 0; i < result.trial_log.size(); ++i) {
        const TrialOutcome& t = result.trial_log[i];
        out << i << ',' << fmt(t.llr_h0) << ',' << fmt(t.llr_h1) << ',' << t.bob_decoded_bits
            << ',' << t.bob_symbol_errors << ',' << t.bob_erasures << ',' << t.rs_block_failures
            << '\n';
    }
}

void export_bits(const std::string& path, const ExperimentConfig& cfg) {
    if (path.empty()) return;
    PpmSession session = cfg.session;
    session.zeta = regime_zeta(cfg.regime, session.n, session.Q, session.zeta);
    Rng secret_rng = Rng::stream(cfg.master_seed, 0, 1);
    const SecretKey key = generate_secret(session, secret_rng);
    const std::int64_t usable =
        usable_data_frames(static_cast<std::int64_t>(key.selected.size()), session.rs_n);
    const std::int64_t blocks = usable / session.rs_n;
    Rng payload_rng = Rng::stream(cfg.master_seed, 0, 2);
    std::vector<std::uint16_t> data(static_cast<std::size_t>(blocks * session.rs_k));
    for (auto& s : data) {
        s = static_cast<std::uint16_t>(payload_rng.below(static_cast<std::uint64_t>(session.Q)));
    }
    int m = 0;
    while ((1 << m) < session.Q) ++m;
    const RsCodec codec(m, session.rs_k);
    const BinarySequence seq = alice_encode_payload(data, key, session, codec);
    write_bit_file(path, interleave_with_silence(seq));
}

int cmd_simulate(SweepOptions& opt) {
    SweepPlan plan = make_plan(opt);
    for (std::size_t i = 0; i < plan.n_values.size(); ++i) {
        point_config(plan, plan.n_values[i], 0, plan.trials, !opt.no_bob);
    }
    OutputTarget out;
    out.open(opt.out_path);
    *out.stream << "n,Q,zeta,regime,m,pe_hat,xi,pe_gauss,bob_bits_mean,max_throughput,ser\n";
    for (std::size_t i = 0; i < plan.n_values.size(); ++i) {
        const std::int64_t n = plan.n_values[i];
        ExperimentConfig cfg =
            point_config(plan, n, point_seed(plan.seed, i, 0), plan.trials, !opt.no_bob);
        if (i == 0) export_bits(opt.export_bits_path, cfg);
        const ExperimentResult result = run_experiment(cfg);
        *out.stream << n << ',' << cfg.session.Q << ',' << fmt(result.zeta) << ','
                    << regime_label(plan.regime) << ',' << result.trials << ','
                    << fmt(result.detection.pe_hat) << ',' << fmt(result.detection.dkw) << ','
                    << fmt(result.pe_gauss) << ',' << fmt(result.bob.bits_mean) << ','
                    << fmt(result.bob.max_throughput_bits) << ','
                    << fmt(result.bob.symbol_error_rate) << '\n';
        if (i == 0) write_per_trial(opt.per_trial_path, result);
    }
    return 0;
}

int cmd_figure_data(const std::string& figure, SweepOptions& opt, std::int64_t exp_trials) {
    SweepPlan plan = make_plan(opt);
    for (std::size_t i = 0; i < plan.n_values.size(); ++i) {
        point_config(plan, plan.n_values[i], 0, plan.trials, figure == "bob");
    }
    OutputTarget out;
    out.open(opt.out_path);
    if (figure == "willie") {
        *out.stream << "n,Q,zeta,regime,pe_hat,pe_mc,pe_gauss,xi_exp,xi_mc\n";
        for (std::size_t i = 0; i < plan.n_values.size(); ++i) {
            const std::int64_t n = plan.n_values[i];
            ExperimentConfig exp_cfg =
                point_config(plan, n, point_seed(plan.seed, i, 1), exp_trials, false);
            ExperimentConfig mc_cfg =
                point_config(plan, n, point_seed(plan.seed, i, 2), plan.trials, false);
            const ExperimentResult exp_run = run_experiment(exp_cfg);
            const ExperimentResult mc_run = run_experiment(mc_cfg);
            *out.stream << n << ',' << exp_cfg.session.Q << ',' << fmt(exp_run.zeta) << ','
                        << regime_label(plan.regime) << ',' << fmt(exp_run.detection.pe_hat)
                        << ',' << fmt(mc_run.detection.pe_hat) << ',' << fmt(mc_run.pe_gauss)
                        << ',' << fmt(exp_run.detection.dkw) << ',' << fmt(mc_run.detection.dkw)
                        << '\n';
        }
        return 0;
    }
    if (figure == "bob") {
        *out.stream << "n,Q,zeta,regime,m,bob_bits_mean,max_throughput,ser\n";
        for (std::size_t i = 0; i < plan.n_values.size(); ++i) {
            const std::int64_t n = plan.n_values[i];
            ExperimentConfig cfg =
                point_config(plan, n, point_seed(plan.seed, i, 3), plan.trials, true);
            const ExperimentResult result = run_experiment(cfg);
            *out.stream << n << ',' << cfg.session.Q << ',' << fmt(result.zeta) << ','
                        << regime_label(plan.regime) << ',' << result.trials << ','
                        << fmt(result.bob.bits_mean) << ',' << fmt(result.bob.max_throughput_bits)
                        << ',' << fmt(result.bob.symbol_error_rate) << '\n';
        }
        return 0;
    }
    throw ConfigError("figure must be 'willie' or 'bob'");
}

int cmd_capacity(const std::string& config_path, const std::vector<std::string>& overrides) {
    RunConfig cfg = parse_config_file(config_path);
    for (const std::string& ov : overrides) apply_config_override(cfg, ov);
    validate_session(cfg.session, cfg.params);
    const double cs = dmc_capacity(cfg.session.Q, cfg.params.p_D_b, cfg.params.nbar_det_b);
    std::cout << "C_s=" << fmt(cs) << '\n';
    std::cout << "max_throughput=" << fmt(max_throughput(cs, cfg.session.zeta,
                                                         static_cast<double>(cfg.session.n),
                                                         cfg.session.Q))
              << '\n';
    return 0;
}

// ---- bounds subcommand ------------------------------------------------

class BoundArgs {
  public:
    BoundArgs(const std::vector<std::string>& kv, const RunConfig& cfg) : cfg_(cfg) {
        for (const std::string& item : kv) {
            const std::size_t eq = item.find('=');
            if (eq == std::string::npos) {
                throw ConfigError("bound argument '" + item + "': expected key=value");
            }
            try {
                values_[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
            } catch (const std::exception&) {
                throw ConfigError("bound argument '" + item + "': value is not a number");
            }
        }
    }

    double required(const std::string& key) const {
        auto it = values_.find(key);
        if (it == values_.end()) throw ConfigError("bounds: missing argument '" + key + "'");
        return it->second;
    }
    double get(const std::string& key, double fallback) const {
        auto it = values_.find(key);
        return it == values_.end() ? fallback : it->second;
    }
    const RunConfig& config() const { return cfg_; }

  private:
    std::map<std::string, double> values_;
    const RunConfig& cfg_;
};

void print_kv(const std::string& key, double value) {
    std::cout << key << '=' << fmt(value) << '\n';
}

int cmd_bounds(const std::string& name, const BoundArgs& a) {
    const ChannelParams& ch = a.config().params;
    const PpmSession& sess = a.config().session;
    if (name == "qre_thermal") {
        print_kv("qre_thermal", qre_thermal(a.required("nbar0"), a.required("nbar1")));
        return 0;
    }
    if (name == "thermal_willie_bound") {
        const Bound b = thermal_willie_bound(a.required("n"), a.required("nbar"),
                                             a.get("eta_b", ch.eta_b), a.get("eta_w", ch.eta_w),
                                             a.get("nbar_T", ch.nbar_T));
        print_kv("thermal_willie_bound", b.value);
        print_kv("thermal_willie_bound_raw", b.raw);
        return 0;
    }
    if (name == "covert_nbar") {
        const double n = a.required("n");
        const double eps = a.get("epsilon", 0.05);
        const double eta_b = a.get("eta_b", ch.eta_b);
        const double eta_w = a.get("eta_w", ch.eta_w);
        const double nT = a.get("nbar_T", ch.nbar_T);
        const double nbar = covert_nbar(n, eps, eta_b, eta_w, nT);
        print_kv("covert_nbar", nbar);
        print_kv("thermal_willie_bound", thermal_willie_bound(n, nbar, eta_b, eta_w, nT).value);
        return 0;
    }
    if (name == "homodyne_reliability_bound") {
        const Bound b =
            homodyne_reliability_bound(a.required("B"), a.required("n"), a.required("nbar"),
                                       a.get("eta_b", ch.eta_b), a.get("nbar_T", ch.nbar_T));
        print_kv("homodyne_reliability_bound", b.value);
        print_kv("homodyne_reliability_bound_raw", b.raw);
        return 0;
    }
    if (name == "ook_kl") {
        const OokKl d = ook_kl(a.required("q"), a.required("s_w"),
                               a.get("lambda_w", ch.lambda_w), a.get("tail_tol", 1e-12));
        print_kv("ook_kl_exact", d.exact);
        print_kv("ook_kl_taylor_ub", d.taylor_ub);
        return 0;
    }
    if (name == "ook_q_setting") {
        const double n = a.required("n");
        const double eps = a.get("epsilon", 0.05);
        const double s_w = a.required("s_w");
        const double lw = a.get("lambda_w", ch.lambda_w);
        const double q = ook_q_setting(n, eps, s_w, lw);
        print_kv("ook_q_setting", q);
        print_kv("pinsker_roundtrip",
                 classical_pinsker_pe_lb(n * ook_kl(q, s_w, lw).taylor_ub).value);
        return 0;
    }
    if (name == "ook_error_exponent") {
        const OokExponent e =
            ook_error_exponent(a.required("q"), a.get("p_D_b", ch.p_D_b), a.required("s_b"));
        print_kv("E0", e.e0);
        print_kv("C_taylor", e.c_taylor);
        return 0;
    }
    if (name == "ppm_kl") {
        const double zeta = a.required("zeta");
        const int Q = static_cast<int>(a.get("Q", sess.Q));
        const double s_w = a.required("s_w");
        const double lw = a.get("lambda_w", ch.lambda_w);
        const int K = static_cast<int>(a.get("K", 0));
        const std::int64_t samples = static_cast<std::int64_t>(a.get("samples", 1e6));
        const std::uint64_t seed = static_cast<std::uint64_t>(a.get("seed", 1));
        const int workers = static_cast<int>(a.get("workers", 1));
        if (Q <= 6) {
            const PpmKlResult exact = ppm_kl_exact(zeta, Q, s_w, lw, K);
            print_kv("ppm_kl_exact", exact.value);
            print_kv("ppm_kl_taylor_ub", exact.taylor_ub);
        }
        const PpmKlResult mc = ppm_kl_mc(zeta, Q, s_w, lw, samples, seed, workers);
        print_kv("ppm_kl_mc", mc.value);
        print_kv("ppm_kl_mc_stderr", mc.std_error);
        if (Q > 6) print_kv("ppm_kl_taylor_ub", mc.taylor_ub);
        return 0;
    }
    if (name == "ppm_zeta_setting") {
        const double n = a.required("n");
        const int Q = static_cast<int>(a.get("Q", sess.Q));
        const double eps = a.get("epsilon", 0.05);
        const double s_w = a.required("s_w");
        const double lw = a.get("lambda_w", ch.lambda_w);
        bool clamped = false;
        const double zeta = ppm_zeta_setting(n, Q, eps, s_w, lw, &clamped);
        print_kv("ppm_zeta_setting", zeta);
        print_kv("clamped", clamped ? 1.0 : 0.0);
        const double d_frame = ppm_kl(zeta, Q, s_w, lw).taylor_ub;
        print_kv("pinsker_roundtrip",
                 classical_pinsker_pe_lb(n / static_cast<double>(Q) * d_frame).value);
        return 0;
    }
    if (name == "pureloss_bounds") {
        PureLossInput in;
        in.eta_w = a.get("eta_w", ch.eta_w);
        in.epsilon = a.get("epsilon", 0.05);
        in.avg_vacuum_overlap = a.get("avg_vacuum_overlap", 1.0);
        const PureLossBounds b = pureloss_bounds(in);
        print_kv("willie_pe_ub", b.willie_pe_ub);
        print_kv("covert_overlap_requirement", b.covert_overlap_requirement);
        print_kv("bob_pe_lb", b.bob_pe_lb.value);
        print_kv("bob_pe_lb_raw", b.bob_pe_lb.raw);
        print_kv("validity", b.validity ? 1.0 : 0.0);
        return 0;
    }
    if (name == "converse_bounds") {
        ConverseInput in = ConverseInput::from_channel(
            ch, a.required("n"), a.get("p_fa_target", 0.05), a.required("nbar_u"),
            a.required("sigma2_u"), a.required("M"), a.get("kappa", 1.0), a.required("nbar_U"));
        in.mu_N = a.get("mu_N", in.mu_N);
        in.sigma2_N = a.get("sigma2_N", in.sigma2_N);
        in.eta_w = a.get("eta_w", in.eta_w);
        const ConverseBounds b = converse_bounds(in);
        print_kv("threshold_S", b.threshold_S);
        print_kv("p_md_ub", b.p_md_ub.value);
        print_kv("bob_pe_lb", b.bob_pe_lb.value);
        print_kv("bob_pe_lb_raw", b.bob_pe_lb.raw);
        return 0;
    }
    if (name == "classical_pinsker_pe_lb") {
        const Bound b = classical_pinsker_pe_lb(a.required("D"));
        print_kv("classical_pinsker_pe_lb", b.value);
        print_kv("classical_pinsker_pe_lb_raw", b.raw);
        return 0;
    }
    std::cerr << "unknown bound '" << name << "'. Available bounds:\n"
              << "  qre_thermal thermal_willie_bound covert_nbar homodyne_reliability_bound\n"
              << "  ook_kl ook_q_setting ook_error_exponent ppm_kl ppm_zeta_setting\n"
              << "  pureloss_bounds converse_bounds classical_pinsker_pe_lb\n";
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"covert PPM link simulator and covertness bounds calculator"};
    app.require_subcommand(1);

    SweepOptions sim_opt;
    CLI::App* sim = app.add_subcommand("simulate", "run Monte-Carlo experiments over a sweep");
    add_sweep_flags(sim, sim_opt, true);

    SweepOptions fig_opt;
    std::string figure;
    std::int64_t exp_trials = 100;
    CLI::App* fig = app.add_subcommand("figure-data", "emit plot-ready CSV series");
    fig->add_option("figure", figure, "willie | bob")->required();
    add_sweep_flags(fig, fig_opt, false);
    fig->add_option("--exp-trials", exp_trials,
                    "trials for the experiment-style estimate (default 100)");

    std::string cap_config;
    std::vector<std::string> cap_overrides;
    CLI::App* cap = app.add_subcommand("capacity", "print C_s and the max throughput");
    cap->add_option("--config", cap_config, "flat key=value config file")->required();
    cap->add_option("--set", cap_overrides, "config override key=value (repeatable)");

    std::string bound_name;
    std::vector<std::string> bound_kv;
    std::string bounds_config;
    CLI::App* bnd = app.add_subcommand("bounds", "evaluate a named closed-form bound");
    bnd->add_option("name", bound_name, "bound name")->required();
    bnd->add_option("args", bound_kv, "key=value arguments for the bound");
    bnd->add_option("--config", bounds_config, "config file supplying channel defaults");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (sim->parsed()) return cmd_simulate(sim_opt);
        if (fig->parsed()) return cmd_figure_data(figure, fig_opt, exp_trials);
        if (cap->parsed()) return cmd_capacity(cap_config, cap_overrides);
        if (bnd->parsed()) {
            RunConfig cfg;
            if (!bounds_config.empty()) cfg = parse_config_file(bounds_config);
            return cmd_bounds(bound_name, BoundArgs(bound_kv, cfg));
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
