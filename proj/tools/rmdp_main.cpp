// rmdp: solvers, diagnostics, generators, and simulation for risk-averse
// total-reward MDPs. Subcommands: solve-erm, solve-evar, check, simulate,
// generate, convert, fig2.
#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "rmdp/benchmarks.hpp"
#include "rmdp/erm.hpp"
#include "rmdp/evar.hpp"
#include "rmdp/io.hpp"
#include "rmdp/simulate.hpp"
#include "rmdp/spectral.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace rmdp;

namespace {

constexpr const char* VERSION = "0.1.0";

// exit codes: 0 success/bounded, 1 error, 2 unbounded or non-transient
constexpr int EXIT_UNBOUNDED = 2;

std::string default_out_dir() {
    const char* env = std::getenv("RMDP_OUT_DIR");
    return env ? env : ".";
}

uint64_t fnv1a(const std::string& data) {
    uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string iso_timestamp() {
    std::time_t now = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    return buf;
}

/// Every run directory holds exactly one manifest recording how to reproduce
/// its numeric outputs.
void write_manifest(const fs::path& out_dir, const std::vector<std::string>& argv_copy,
                    const std::string& config_path, uint64_t seed,
                    const std::vector<std::string>& outputs) {
    json manifest;
    std::ostringstream cmd;
    for (size_t i = 0; i < argv_copy.size(); i++) cmd << (i ? " " : "") << argv_copy[i];
    manifest["command"] = cmd.str();
    manifest["config_digest"] =
        config_path.empty() ? "" : std::to_string(fnv1a(read_text(config_path)));
    manifest["seed"] = seed;
    manifest["version"] = VERSION;
    manifest["timestamp"] = iso_timestamp();
    manifest["outputs"] = outputs;
    write_text_atomic(out_dir / "manifest.json", manifest.dump(2) + "\n");
}

fs::path prepare_out_dir(const std::string& out) {
    fs::path dir(out);
    fs::create_directories(dir);
    return dir;
}

TransientMdp load_and_validate(const std::string& path) {
    TransientMdp model = load_model(path);
    ValidationReport report = validate_model(model);
    for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
    if (!report.valid()) {
        for (const auto& v : report.violations) std::cerr << "error: " << v << "\n";
        throw ModelError("model failed validation with " +
                         std::to_string(report.violations.size()) + " violation(s)");
    }
    return model;
}

void print_policy(const indvec& ids) {
    std::cout << "policy:";
    for (int a : ids) std::cout << " " << a;
    std::cout << "\n";
}

int cmd_solve_erm(const std::string& model_path, double beta, const std::string& method,
                  double tol, const std::string& out,
                  const std::vector<std::string>& argv_copy, const std::string& config) {
    TransientMdp model = load_and_validate(model_path);
    SolveOptions opts;
    opts.tol = tol;

    SolveReport report;
    if (beta == 0.0) {
        report = risk_neutral_solve(model, opts);
    } else if (beta >= WSPACE_MIN_BETA &&
               beta * model.max_abs_reward() > LOGSPACE_EXPONENT_BUDGET) {
        std::cerr << "note: beta * max|r| exceeds the w-space budget; using the log-domain "
                     "solver\n";
        report = erm_solve_logspace(model, beta, opts);
    } else if (method == "vi") {
        report = value_iteration(model, beta, opts);
    } else if (method == "pi") {
        report = policy_iteration(model, beta, std::nullopt, opts);
    } else {
        report = beta < WSPACE_MIN_BETA ? erm_solve_logspace(model, beta, opts)
                                        : lp_solve(model, beta, opts);
    }

    fs::path dir = prepare_out_dir(out);
    write_text_atomic(dir / "report.json", report_to_json(report).dump(2) + "\n");
    write_manifest(dir, argv_copy, config, 0, {"report.json"});
    std::cout << "status: " << to_string(report.status)
              << "  objective: " << format_double(report.objective) << "\n";
    print_policy(report.policy_actions);

    if (report.status == SolveStatus::Bounded) return 0;
    if (report.status == SolveStatus::Unbounded) return EXIT_UNBOUNDED;
    throw SolverError("solver stopped at the iteration cap");
}

int cmd_solve_evar(const std::string& model_path, double alpha, double delta,
                   const std::string& out, const std::vector<std::string>& argv_copy,
                   const std::string& config) {
    TransientMdp model = load_and_validate(model_path);
    EvarSolution sol = evar_solve(model, alpha, delta);

    fs::path dir = prepare_out_dir(out);
    write_text_atomic(dir / "evar.json", evar_to_json(sol).dump(2) + "\n");
    write_text_atomic(dir / "per_beta.csv", evar_per_beta_csv(sol));
    write_manifest(dir, argv_copy, config, 0, {"evar.json", "per_beta.csv"});

    std::cout << "evar_lower: " << format_double(sol.evar_lower)
              << "  beta_star: " << format_double(sol.beta_star) << "\n";
    print_policy(sol.policy_actions);
    return 0;
}

int cmd_check(const std::string& model_path, long long cap) {
    TransientMdp model = load_model(model_path);
    ValidationReport report = validate_model(model);
    for (const auto& v : report.violations) std::cout << "violation: " << v << "\n";
    for (const auto& w : report.warnings) std::cout << "warning: " << w << "\n";
    if (!report.valid()) return 1;
    std::cout << "validation: ok (" << model.num_states() << " states, "
              << model.num_actions() << " actions)\n";

    long long count = count_deterministic_rules(model, cap);
    if (count > cap) {
        std::cerr << "deterministic policies exceed --exhaustive-cap " << cap
                  << "; rerun with a larger cap\n";
        return 1;
    }

    std::cout << "policy radii (rho(P^d) per deterministic rule):\n";
    long long shown = 0;
    bool transient = true;
    indvec violating;
    double worst = 0.0;
    for_each_deterministic_rule(model, [&](const indvec& ids) {
        TransienceVerdict v =
            check_transient_policy(model, DecisionRule::deterministic(model, ids));
        if (shown < 20) {
            std::cout << "  [";
            for (size_t s = 0; s < ids.size(); s++) std::cout << (s ? " " : "") << ids[s];
            std::cout << "]  rho = " << format_double(v.radius) << "\n";
        } else if (shown == 20) {
            std::cout << "  ... (" << count - 20 << " more)\n";
        }
        shown++;
        worst = std::max(worst, v.radius);
        if (!v.transient && transient) {
            transient = false;
            violating = ids;
        }
        return true;
    });
    std::cout << "worst radius: " << format_double(worst) << "\n";
    if (!transient) {
        std::cout << "NOT transient; violating policy: [";
        for (size_t s = 0; s < violating.size(); s++)
            std::cout << (s ? " " : "") << violating[s];
        std::cout << "]\n";
        return EXIT_UNBOUNDED;
    }
    std::cout << "transient: every deterministic policy has rho < 1\n";
    return 0;
}

int cmd_fig2(const std::string& out, const std::vector<std::string>& argv_copy,
             const std::string& config) {
    TransientMdp chain = single_state_chain({});
    const double discounted = -0.2 / (1.0 - 0.9);  // deterministic return, any beta

    std::ostringstream csv;
    csv << "beta,trc_value,discounted_value\n";
    for (int i = 1; i <= 100; i++) {
        double beta = i / 100.0;
        SolveReport rep = lp_solve(chain, beta);
        double trc = rep.status == SolveStatus::Bounded ? rep.objective : NEG_INF;
        csv << format_double(beta) << ',' << csv_number(trc) << ','
            << format_double(discounted) << '\n';
    }
    fs::path dir = prepare_out_dir(out);
    write_text_atomic(dir / "fig2.csv", csv.str());
    write_manifest(dir, argv_copy, config, 0, {"fig2.csv"});
    std::cout << "wrote " << (dir / "fig2.csv").string() << "\n";
    return 0;
}

int cmd_simulate(const std::string& model_path, const std::string& policy_path, long episodes,
                 uint64_t seed, const std::vector<double>& alphas, const std::string& out,
                 const std::vector<std::string>& argv_copy, const std::string& config) {
    TransientMdp model = load_and_validate(model_path);
    indvec ids = load_policy(policy_path, model);

    RolloutConfig cfg;
    cfg.episodes = episodes;
    cfg.seed = seed;
    cfg.policy = DecisionRule::deterministic(model, ids);
    ReturnDistribution dist = rollout(model, cfg);
    if (dist.truncated_count > 0)
        throw SolverError(std::to_string(dist.truncated_count) +
                          " episode(s) hit max_steps; risk estimates would be biased");

    numvec edges = returns_are_integral(dist.returns) ? integer_bin_edges(dist.returns)
                                                      : uniform_bin_edges(dist.returns, 50);
    auto bins = histogram(dist.returns, edges);

    double mean = 0.0, lo = POS_INF, hi = NEG_INF;
    for (double r : dist.returns) {
        mean += r / dist.returns.size();
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }

    json summary;
    summary["episodes"] = episodes;
    summary["seed"] = seed;
    summary["mean"] = json_number(mean);
    summary["min"] = json_number(lo);
    summary["max"] = json_number(hi);
    json erm_ladder = json::array();
    for (double beta : {0.01, 0.05, 0.1, 0.2, 0.5, 1.0, 2.0})
        erm_ladder.push_back(
            {{"beta", beta}, {"erm", json_number(empirical_erm(dist.returns, beta))}});
    summary["empirical_erm"] = std::move(erm_ladder);
    json evar_table = json::array();
    for (double alpha : alphas) {
        SampleEvar ev = evar_of_samples(dist.returns, alpha);
        evar_table.push_back({{"alpha", alpha},
                              {"evar", json_number(ev.value)},
                              {"beta", json_number(ev.beta)},
                              {"at_boundary", ev.at_boundary}});
    }
    summary["empirical_evar"] = std::move(evar_table);

    fs::path dir = prepare_out_dir(out);
    write_text_atomic(dir / "histogram.csv", histogram_csv(bins));
    write_text_atomic(dir / "summary.json", summary.dump(2) + "\n");
    write_manifest(dir, argv_copy, config, seed, {"histogram.csv", "summary.json"});
    std::cout << "simulated " << episodes << " episodes; mean " << format_double(mean) << "\n";
    return 0;
}

int cmd_generate(const std::string& kind, double epsilon, double r, const std::string& variant,
                 double q, int cap, const std::string& initial, const std::string& mode,
                 const std::string& out_file) {
    TransientMdp model = [&] {
        if (kind == "chain") {
            if (epsilon == 1.0)
                std::cerr << "warning: epsilon = 1 never terminates; the model fails the "
                             "transience check\n";
            ChainVariant v =
                variant == "discounted" ? ChainVariant::Discounted : ChainVariant::Transient;
            return single_state_chain({epsilon, r, v});
        }
        GamblersRuinParams params;
        params.q = q;
        params.cap = cap;
        params.initial =
            initial == "all" ? GamblerInitial::UniformAll : GamblerInitial::UniformMiddle;
        params.mode = mode == "literal" ? GamblerActionMode::Literal : GamblerActionMode::Strict;
        return gamblers_ruin(params);
    }();

    fs::path path(out_file);
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    save_model(model, path);
    std::cout << "wrote " << out_file << "\n";
    return 0;
}

int cmd_convert(const std::string& model_path, double gamma, const std::string& out_file) {
    TransientMdp discounted = load_model(model_path);
    TransientMdp trc = discount_to_trc(discounted, gamma);
    fs::path path(out_file);
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    save_model(trc, path);
    std::cout << "wrote " << out_file << "\n";
    return 0;
}

std::string config_path_of(CLI::App* cmd) {
    const CLI::Option* opt = cmd->get_config_ptr();
    return opt && opt->count() > 0 ? opt->as<std::string>() : "";
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> argv_copy(argv, argv + argc);

    CLI::App app{"risk-averse total-reward MDP solver (ERM and EVaR objectives)"};
    app.set_version_flag("--version", VERSION);
    app.require_subcommand(1);

    std::string model_path, out = default_out_dir();
    double beta = 0.5, tol = 1e-10, alpha = 0.9, delta = 0.01, gamma = 0.9;
    std::string method = "lp";

    CLI::App* solve_erm = app.add_subcommand("solve-erm", "optimal ERM-TRC policy at a beta");
    solve_erm->add_option("model", model_path, "model file (.json or .csv)")->required();
    solve_erm->add_option("--beta", beta, "risk level (0 solves the expected-value TRC)")
        ->required();
    solve_erm->add_option("--method", method, "vi, pi, or lp")
        ->check(CLI::IsMember({"vi", "pi", "lp"}));
    solve_erm->add_option("--tol", tol, "residual tolerance");
    solve_erm->add_option("--out", out, "output directory");
    solve_erm->set_config("--config");

    CLI::App* solve_evar = app.add_subcommand("solve-evar", "optimal EVaR-TRC policy");
    solve_evar->add_option("model", model_path)->required();
    solve_evar->add_option("--alpha", alpha, "risk level in (0,1)")->required();
    solve_evar->add_option("--delta", delta, "suboptimality budget");
    solve_evar->add_option("--out", out, "output directory");
    solve_evar->set_config("--config");

    long long cap = 1000000;
    CLI::App* check = app.add_subcommand("check", "validate a model and test transience");
    check->add_option("model", model_path)->required();
    check->add_option("--exhaustive-cap", cap, "deterministic-policy enumeration budget");

    CLI::App* fig2 = app.add_subcommand("fig2", "beta sweep of TRC vs discounted ERM values");
    fig2->add_option("--out", out, "output directory");
    fig2->set_config("--config");

    std::string policy_path;
    long episodes = 7000;
    uint64_t seed = 0;
    std::vector<double> alpha_list;
    CLI::App* simulate = app.add_subcommand("simulate", "Monte-Carlo rollouts of a policy");
    simulate->add_option("model", model_path)->required();
    simulate->add_option("--policy", policy_path, "policy JSON (bare array or solver report)")
        ->required();
    simulate->add_option("--episodes", episodes);
    simulate->add_option("--seed", seed);
    simulate->add_option("--alpha-list", alpha_list, "alphas for empirical EVaR")
        ->delimiter(',');
    simulate->add_option("--out", out, "output directory");
    simulate->set_config("--config");

    std::string kind, variant = "transient", initial = "middle", mode = "strict", out_file;
    double epsilon = 0.9, r = -0.2, q = 0.68;
    int gcap = 7;
    CLI::App* generate = app.add_subcommand("generate", "emit a benchmark model file");
    generate->add_option("kind", kind, "chain or gamblers-ruin")
        ->required()
        ->check(CLI::IsMember({"chain", "gamblers-ruin"}));
    generate->add_option("--epsilon", epsilon, "chain continue-probability");
    generate->add_option("--r", r, "chain per-step reward");
    generate->add_option("--variant", variant)
        ->check(CLI::IsMember({"transient", "discounted"}));
    generate->add_option("--q", q, "gambler win probability");
    generate->add_option("--cap", gcap, "gambler target capital");
    generate->add_option("--initial", initial)->check(CLI::IsMember({"middle", "all"}));
    generate->add_option("--mode", mode)->check(CLI::IsMember({"strict", "literal"}));
    generate->add_option("--out", out_file, "output model file")->required();

    CLI::App* convert = app.add_subcommand("convert", "discounted model to transient TRC form");
    convert->add_option("model", model_path)->required();
    convert->add_option("--gamma", gamma, "discount factor in [0,1)")->required();
    convert->add_option("--out", out_file, "output model file")->required();

    try {
        app.parse(argc, argv);
        if (solve_erm->parsed())
            return cmd_solve_erm(model_path, beta, method, tol, out, argv_copy,
                                 config_path_of(solve_erm));
        if (solve_evar->parsed())
            return cmd_solve_evar(model_path, alpha, delta, out, argv_copy,
                                  config_path_of(solve_evar));
        if (check->parsed()) return cmd_check(model_path, cap);
        if (fig2->parsed()) return cmd_fig2(out, argv_copy, config_path_of(fig2));
        if (simulate->parsed())
            return cmd_simulate(model_path, policy_path, episodes, seed, alpha_list, out,
                                argv_copy, config_path_of(simulate));
        if (generate->parsed())
            return cmd_generate(kind, epsilon, r, variant, q, gcap, initial, mode, out_file);
        if (convert->parsed()) return cmd_convert(model_path, gamma, out_file);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
