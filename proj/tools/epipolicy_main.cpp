// Command-line pipeline for policy-effectiveness analysis:
//   validate       no-policy prediction check per region
//   policy-effect  counterfactual effect rates + figures per policy kind
//   regress        OLS screens of transformed effect rates on region factors
//   pipeline       all three stages with one combined manifest

#include <chrono>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "epipolicy/pipeline.hpp"

namespace {

epipolicy::RunConfig build_config(const std::string& covid, const std::string& population,
                                  const std::string& policy, const std::string& factors,
                                  const std::string& out_dir, const std::string& effects,
                                  const std::string& config_path, std::uint64_t seed,
                                  bool seed_given, double credible_level, bool credible_given,
                                  double alpha, const std::string& span, int loess_degree,
                                  const std::vector<std::string>& kinds, bool emit_draws) {
    epipolicy::RunConfig cfg;
    cfg.covid_csv = covid;
    cfg.population_csv = population;
    cfg.policy_csv = policy;
    cfg.factors_csv = factors;
    cfg.out_dir = out_dir;
    cfg.effects_csv = effects;
    if (!config_path.empty()) cfg.model = epipolicy::load_model_spec_json(config_path);
    if (seed_given) cfg.model.seed = seed;
    if (credible_given) cfg.model.credible_level = credible_level;
    cfg.alpha = alpha;
    cfg.loess.degree = loess_degree;
    if (span != "auto") {
        try {
            cfg.loess.span = std::stod(span);
        } catch (const std::exception&) {
            throw epipolicy::ConfigError("--span must be 'auto' or a number in (0,1]");
        }
    }
    if (!kinds.empty()) {
        cfg.kinds.clear();
        for (const auto& kind : kinds) cfg.kinds.push_back(epipolicy::parse_policy_kind(kind));
    }
    cfg.emit_draws = emit_draws;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bayesian SIR policy-effectiveness pipeline"};
    app.require_subcommand(1);

    std::string covid, population, policy, factors;
    std::string out_dir = "out";
    std::string effects;
    std::string config_path;
    std::string span = "auto";
    std::uint64_t seed = 0;
    double credible_level = 0.95;
    double alpha = 0.1;
    int loess_degree = 1;
    std::vector<std::string> kinds;
    bool emit_draws = false;

    app.add_option("--covid", covid, "covid counts CSV (date,region,cum_positive,cum_recovered,cum_deaths)");
    app.add_option("--population", population, "population CSV (region,population)");
    app.add_option("--policy", policy, "policy CSV (region,kind,issue_date[,validation_anchor])");
    app.add_option("--factors", factors, "region factor CSV (region,<factor>,...)");
    auto* out_opt = app.add_option("--out-dir", out_dir, "output directory");
    out_opt->envname("EPIPOLICY_OUT_DIR");
    app.add_option("--effects", effects, "effect-rate CSV for regress (defaults to <out-dir>/effect_rates.csv)");
    app.add_option("--config", config_path, "model spec JSON (priors, chains, iterations, ...)");
    auto* seed_opt = app.add_option("--seed", seed, "master RNG seed");
    seed_opt->envname("EPIPOLICY_SEED");
    auto* cred_opt = app.add_option("--credible-level", credible_level, "credible band level in (0,1)");
    app.add_option("--alpha", alpha, "significance level for regression screens");
    app.add_option("--span", span, "LOESS span: 'auto' or a value in (0,1]");
    app.add_option("--loess-degree", loess_degree, "LOESS polynomial degree (1 or 2)")
        ->check(CLI::IsMember({1, 2}));
    app.add_option("--kind", kinds, "policy kinds to analyze (mask, vaccine); repeatable");
    app.add_flag("--emit-draws", emit_draws, "write per-region posterior draw CSVs");

    auto* cmd_validate = app.add_subcommand("validate", "no-policy prediction check");
    auto* cmd_effect = app.add_subcommand("policy-effect", "counterfactual effect rates");
    auto* cmd_regress = app.add_subcommand("regress", "factor regressions on effect rates");
    auto* cmd_pipeline = app.add_subcommand("pipeline", "validate + policy-effect + regress");

    CLI11_PARSE(app, argc, argv);

    const auto started = std::chrono::steady_clock::now();
    int exit_code = epipolicy::kExitOk;
    try {
        const epipolicy::RunConfig cfg = build_config(
            covid, population, policy, factors, out_dir, effects, config_path, seed,
            seed_opt->count() > 0 || std::getenv("EPIPOLICY_SEED") != nullptr, credible_level,
            cred_opt->count() > 0, alpha, span, loess_degree, kinds, emit_draws);
        if (cmd_validate->parsed()) {
            exit_code = epipolicy::cmd_validate(cfg);
        } else if (cmd_effect->parsed()) {
            exit_code = epipolicy::cmd_policy_effect(cfg);
        } else if (cmd_regress->parsed()) {
            exit_code = epipolicy::cmd_regress(cfg);
        } else if (cmd_pipeline->parsed()) {
            exit_code = epipolicy::cmd_pipeline(cfg);
        }
    } catch (const epipolicy::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return epipolicy::kExitConfigError;
    } catch (const epipolicy::Error& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return epipolicy::kExitDataError;
    }
    const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - started);
    std::cout << "done in " << elapsed.count() << " ms (exit " << exit_code << ", outputs in "
              << out_dir << ")\n";
    return exit_code;
}
