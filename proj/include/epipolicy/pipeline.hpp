#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "epipolicy/csv.hpp"
#include "epipolicy/dates.hpp"
#include "epipolicy/effectiveness.hpp"
#include "epipolicy/errors.hpp"
#include "epipolicy/esir.hpp"
#include "epipolicy/loess.hpp"
#include "epipolicy/regression.hpp"
#include "epipolicy/svg.hpp"
#include "epipolicy/timeseries.hpp"

namespace epipolicy {

#ifndef EPIPOLICY_VERSION
#define EPIPOLICY_VERSION "0.0.0"
#endif

enum ExitCode : int {
    kExitOk = 0,
    kExitConfigError = 1,
    kExitDataError = 2,
    kExitPartial = 3,  // some regions excluded; see manifest
};

struct RunConfig {
    std::string covid_csv;
    std::string population_csv;
    std::string policy_csv;
    std::string factors_csv;
    std::string out_dir = "out";
    std::string effects_csv;  // regress input; defaults to <out_dir>/effect_rates.csv
    EsirModelSpec model;      // seed and credible_level live here
    std::vector<PolicyKind> kinds = {PolicyKind::mask, PolicyKind::vaccine};
    double alpha = 0.1;  // significance level for the regression screens
    LoessConfig loess;   // span unset = automatic selection
    bool emit_draws = false;

    void require_inputs(bool need_policy, bool need_factors) const {
        namespace fs = std::filesystem;
        auto check = [](const std::string& path, const char* what) {
            if (path.empty()) throw ConfigError(std::string(what) + " path not set");
            if (!fs::exists(path)) throw ConfigError(std::string(what) + " '" + path + "' not found");
        };
        check(covid_csv, "covid CSV");
        check(population_csv, "population CSV");
        if (need_policy) check(policy_csv, "policy CSV");
        if (need_factors) check(factors_csv, "factors CSV");
    }
};

// Model spec from a JSON config file; keys mirror EsirModelSpec. Unknown
// keys are rejected so typos cannot silently fall back to defaults.
inline EsirModelSpec load_model_spec_json(const std::string& path, EsirModelSpec base = {}) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open model config '" + path + "'");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("model config '" + path + "': " + e.what());
    }
    static const std::set<std::string> known = {
        "prior_r0",   "prior_gamma", "prior_kappa",    "prior_lambda_i",
        "prior_lambda_r", "chains", "iterations",      "burn_in",
        "thin",       "seed",        "credible_level", "observe_removed",
        "initial_proposal_scale",    "adapt_proposals"};
    for (const auto& [key, _] : doc.items()) {
        if (!known.count(key)) throw ConfigError("model config: unknown key '" + key + "'");
    }
    auto lognormal = [&](const char* key, LognormalPrior& prior) {
        if (doc.contains(key)) {
            prior.meanlog = doc[key].at("meanlog").get<double>();
            prior.sdlog = doc[key].at("sdlog").get<double>();
        }
    };
    auto gamma_prior = [&](const char* key, GammaPrior& prior) {
        if (doc.contains(key)) {
            prior.shape = doc[key].at("shape").get<double>();
            prior.rate = doc[key].at("rate").get<double>();
        }
    };
    lognormal("prior_r0", base.prior_r0);
    lognormal("prior_gamma", base.prior_gamma);
    gamma_prior("prior_kappa", base.prior_kappa);
    gamma_prior("prior_lambda_i", base.prior_lambda_i);
    gamma_prior("prior_lambda_r", base.prior_lambda_r);
    if (doc.contains("chains")) base.chains = doc["chains"].get<int>();
    if (doc.contains("iterations")) base.iterations = doc["iterations"].get<int>();
    if (doc.contains("burn_in")) base.burn_in = doc["burn_in"].get<int>();
    if (doc.contains("thin")) base.thin = doc["thin"].get<int>();
    if (doc.contains("seed")) base.seed = doc["seed"].get<std::uint64_t>();
    if (doc.contains("credible_level")) base.credible_level = doc["credible_level"].get<double>();
    if (doc.contains("observe_removed")) base.observe_removed = doc["observe_removed"].get<bool>();
    if (doc.contains("initial_proposal_scale")) {
        base.initial_proposal_scale = doc["initial_proposal_scale"].get<double>();
    }
    if (doc.contains("adapt_proposals")) base.adapt_proposals = doc["adapt_proposals"].get<bool>();
    base.validate();
    return base;
}

struct PolicyInfo {
    std::map<PolicyKind, Date> issue_dates;
    std::optional<Date> anchor;  // no-policy validation anchor
};

// Policy CSV: region,kind,issue_date[,validation_anchor]. A row may leave
// kind and issue_date empty to carry only an anchor.
inline std::map<std::string, PolicyInfo> load_policy_csv(const std::string& path) {
    const CsvTable table = read_csv(path);
    const bool has_anchor = table.header.size() == 4;
    if (!(table.header.size() == 3 || has_anchor) || table.header[0] != "region" ||
        table.header[1] != "kind" || table.header[2] != "issue_date" ||
        (has_anchor && table.header[3] != "validation_anchor")) {
        throw ParseError(path + ": expected header region,kind,issue_date[,validation_anchor]");
    }
    std::map<std::string, PolicyInfo> policies;
    for (std::size_t k = 0; k < table.rows.size(); ++k) {
        const auto& cells = table.rows[k];
        const std::string where = path + ":" + std::to_string(table.lines[k]);
        PolicyInfo& info = policies[cells[0]];
        if (!cells[1].empty()) {
            const PolicyKind kind = parse_policy_kind(cells[1]);
            if (kind == PolicyKind::custom) {
                throw ParseError(where + ": CSV policy kinds are mask|vaccine");
            }
            if (cells[2].empty()) throw ParseError(where + ": issue_date required for kind row");
            const Date issue = Date::parse(cells[2]);
            if (!info.issue_dates.emplace(kind, issue).second) {
                throw DataIntegrityError(where + ": duplicate " + cells[1] + " policy for region '" +
                                         cells[0] + "'");
            }
        } else if (!cells[2].empty()) {
            throw ParseError(where + ": issue_date given without a policy kind");
        }
        if (has_anchor && !cells[3].empty()) {
            const Date anchor = Date::parse(cells[3]);
            if (info.anchor && *info.anchor != anchor) {
                throw DataIntegrityError(where + ": conflicting validation anchors for region '" +
                                         cells[0] + "'");
            }
            info.anchor = anchor;
        }
    }
    return policies;
}

// Deterministic run manifest: config echo, one status line per region per
// stage, and the emitted file list. No timestamps, so reruns with the same
// seed produce byte-identical manifests; wall-clock timing goes to stdout.
class RunManifest {
  public:
    void config(const std::string& key, const std::string& value) {
        config_lines_.push_back(key + ": " + value);
    }

    void begin_section(const std::string& name) { sections_.push_back({name, {}}); }

    void line(const std::string& text) { sections_.back().lines.push_back(text); }

    void output_file(const std::string& name) { outputs_.insert(name); }

    void note(const std::string& text) { notes_.push_back(text); }

    std::string str() const {
        std::string out = "# epipolicy run manifest\n";
        for (const auto& line : config_lines_) out += line + "\n";
        for (const auto& section : sections_) {
            out += "\n[" + section.name + "]\n";
            for (const auto& line : section.lines) out += line + "\n";
        }
        if (!notes_.empty()) {
            out += "\n[notes]\n";
            for (const auto& line : notes_) out += line + "\n";
        }
        out += "\n[outputs]\n";
        for (const auto& name : outputs_) out += name + "\n";
        return out;
    }

  private:
    struct Section {
        std::string name;
        std::vector<std::string> lines;
    };
    std::vector<std::string> config_lines_;
    std::vector<Section> sections_;
    std::set<std::string> outputs_;
    std::vector<std::string> notes_;
};

namespace pipeline_detail {

inline std::uint64_t fnv1a(std::string_view text) {
    std::uint64_t hash = 1469598103934665603ull;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    return hash;
}

// Per-(stage, region) seed so regions do not share identical noise streams
// while the whole run stays a pure function of the master seed.
inline std::uint64_t region_seed(std::uint64_t master, std::string_view stage,
                                 std::string_view region) {
    return Rng::derive_stream(master, fnv1a(std::string(stage) + "/" + std::string(region)));
}

struct RegionSeries {
    std::string region;
    CompartmentSeries compartments;
};

struct Dataset {
    std::vector<std::string> all_regions;          // every region in the covid CSV, sorted
    std::vector<RegionSeries> prepared;            // regions that smoothed and converted cleanly
    std::map<std::string, std::string> prep_errors;  // region -> exclusion reason
    std::map<std::string, PolicyInfo> policies;
};

inline const CompartmentSeries* find_series(const Dataset& data, const std::string& region) {
    for (const auto& entry : data.prepared) {
        if (entry.region == region) return &entry.compartments;
    }
    return nullptr;
}

// Ingest + smooth + convert. Ingest errors are fatal (malformed input
// file); per-region smoothing/conversion failures only exclude the region.
// Rows before a region's first recovered report are dropped: the removed
// compartment is undefined there, and analysis windows that reach into the
// dropped range surface as coverage exclusions.
inline Dataset load_dataset(const RunConfig& cfg, bool need_policy) {
    Dataset data;
    const auto populations = load_population_csv(cfg.population_csv);
    const auto raw_list = ingest_csv(cfg.covid_csv, populations);
    if (need_policy) data.policies = load_policy_csv(cfg.policy_csv);
    for (const auto& raw : raw_list) {
        data.all_regions.push_back(raw.region);
        std::size_t first_known = 0;
        while (first_known < raw.rows.size() && !raw.rows[first_known].cum_recovered) {
            ++first_known;
        }
        if (first_known == raw.rows.size()) {
            data.prep_errors[raw.region] = "no recovered data";
            continue;
        }
        RawSeries trimmed = raw;
        trimmed.rows.erase(trimmed.rows.begin(),
                           trimmed.rows.begin() + static_cast<std::ptrdiff_t>(first_known));
        try {
            const std::vector<double> smoothed = smooth_recovered(trimmed, cfg.loess);
            data.prepared.push_back({raw.region, to_compartments(trimmed, smoothed)});
        } catch (const Error& e) {
            data.prep_errors[raw.region] = e.what();
        }
    }
    return data;
}

inline std::string out_path(const RunConfig& cfg, const std::string& name) {
    return (std::filesystem::path(cfg.out_dir) / name).string();
}

inline void emit(const RunConfig& cfg, RunManifest& manifest, const std::string& name,
                 const std::string& content) {
    write_text_file(out_path(cfg, name), content);
    manifest.output_file(name);
}

inline EsirModelSpec spec_for(const RunConfig& cfg, std::string_view stage,
                              const std::string& region) {
    EsirModelSpec spec = cfg.model;
    spec.seed = region_seed(cfg.model.seed, stage, region);
    return spec;
}

inline std::string fmt_status(const std::string& region, const std::string& status) {
    return region + ": " + status;
}

}  // namespace pipeline_detail

// ---------------------------------------------------------------------------
// validate: no-policy prediction check per region (Figure-1 analogue)

struct StageCounters {
    int analyzed = 0;
    int excluded = 0;
};

inline StageCounters run_validate_stage(const RunConfig& cfg,
                                        const pipeline_detail::Dataset& data,
                                        RunManifest& manifest) {
    using namespace pipeline_detail;
    StageCounters counters;
    manifest.begin_section("validate");
    std::ostringstream coverage_csv;
    coverage_csv << "region,anchor,days,covered,fraction\n";
    for (const auto& region : data.all_regions) {
        if (auto it = data.prep_errors.find(region); it != data.prep_errors.end()) {
            manifest.line(fmt_status(region, "excluded (" + it->second + ")"));
            ++counters.excluded;
            continue;
        }
        const auto policy = data.policies.find(region);
        if (policy == data.policies.end() || !policy->second.anchor) {
            manifest.line(fmt_status(region, "excluded (no validation anchor)"));
            ++counters.excluded;
            continue;
        }
        const CompartmentSeries* series = find_series(data, region);
        try {
            const EsirModelSpec spec = spec_for(cfg, "validate", region);
            const ValidationResult result = validate_no_policy(*series, *policy->second.anchor, spec);
            const Date anchor = *policy->second.anchor;
            coverage_csv << region << ',' << anchor.to_string() << ',' << result.coverage.days
                         << ',' << result.coverage.covered << ','
                         << format_double(result.coverage.fraction) << '\n';
            const CompartmentSeries shown =
                window(*series, anchor - kTrainingWindowDays,
                       kTrainingWindowDays + kPredictionHorizonDays);
            emit(cfg, manifest, "fig_validate_" + region + ".svg",
                 figure_prediction(shown, result.summary, region + " no-policy prediction check"));
            manifest.line(fmt_status(region, "analyzed"));
            ++counters.analyzed;
        } catch (const Error& e) {
            manifest.line(fmt_status(region, std::string("excluded (") + e.what() + ")"));
            ++counters.excluded;
        }
    }
    emit(cfg, manifest, "validate_coverage.csv", coverage_csv.str());
    return counters;
}

// ---------------------------------------------------------------------------
// policy-effect: counterfactual gap scoring per region and policy kind

inline StageCounters run_policy_effect_stage(const RunConfig& cfg,
                                             const pipeline_detail::Dataset& data,
                                             RunManifest& manifest) {
    using namespace pipeline_detail;
    StageCounters counters;
    std::vector<EffectRateRecord> records;

    for (const PolicyKind kind : cfg.kinds) {
        const std::string kind_name = to_string(kind);
        manifest.begin_section("policy-effect " + kind_name);
        for (const auto& region : data.all_regions) {
            if (auto it = data.prep_errors.find(region); it != data.prep_errors.end()) {
                manifest.line(fmt_status(region, "excluded (" + it->second + ")"));
                ++counters.excluded;
                continue;
            }
            const auto policy = data.policies.find(region);
            if (policy == data.policies.end() ||
                !policy->second.issue_dates.count(kind)) {
                manifest.line(fmt_status(region, "excluded (no " + kind_name + " policy)"));
                ++counters.excluded;
                continue;
            }
            const CompartmentSeries* series = find_series(data, region);
            try {
                PolicyEvent event;
                event.region = region;
                event.kind = kind;
                event.issue_date = policy->second.issue_dates.at(kind);
                const Date start = prediction_start(event);
                const CompartmentSeries training =
                    window(*series, start - kTrainingWindowDays, kTrainingWindowDays);
                const CompartmentSeries actual = window(*series, start, kPredictionHorizonDays);

                const EsirModelSpec spec = spec_for(cfg, "policy-" + kind_name, region);
                const PosteriorDraws draws = fit(training, spec);
                const PredictiveSummary summary = predict(draws, kPredictionHorizonDays, spec);
                if (cfg.emit_draws) {
                    emit(cfg, manifest, "draws_" + kind_name + "_" + region + ".csv",
                         draws_to_csv(draws));
                }
                records.push_back(
                    make_effect_record(region, kind, summary.median_i, actual.infected()));

                const CompartmentSeries shown =
                    window(*series, start - kTrainingWindowDays,
                           kTrainingWindowDays + kPredictionHorizonDays);
                emit(cfg, manifest, "fig_" + kind_name + "_" + region + ".svg",
                     figure_prediction(shown, summary,
                                       region + " " + kind_name + " policy effect"));
                manifest.line(fmt_status(region, "analyzed"));
                ++counters.analyzed;
            } catch (const Error& e) {
                manifest.line(fmt_status(region, std::string("excluded (") + e.what() + ")"));
                ++counters.excluded;
            }
        }
    }

    // Inverse normal transform within each (kind, metric) cohort.
    for (const PolicyKind kind : cfg.kinds) apply_transform_cohort(records, kind);

    std::sort(records.begin(), records.end(), [](const EffectRateRecord& a,
                                                 const EffectRateRecord& b) {
        if (a.kind != b.kind) return static_cast<int>(a.kind) < static_cast<int>(b.kind);
        return a.region < b.region;
    });
    std::ostringstream effect_csv;
    effect_csv << "region,kind,max_rate,total_rate,int_max,int_total\n";
    for (const auto& rec : records) {
        effect_csv << rec.region << ',' << to_string(rec.kind) << ','
                   << format_double(rec.max_rate) << ',' << format_double(rec.total_rate) << ',';
        if (rec.transformed_max) effect_csv << format_double(*rec.transformed_max);
        effect_csv << ',';
        if (rec.transformed_total) effect_csv << format_double(*rec.transformed_total);
        effect_csv << '\n';
    }
    emit(cfg, manifest, "effect_rates.csv", effect_csv.str());

    if (!records.empty()) {
        // Bar chart ordered by total effect rate, descending; the vaccine
        // cohort drives the ordering when present since it covers the most
        // regions.
        PolicyKind order_kind = cfg.kinds.front();
        for (const PolicyKind kind : cfg.kinds) {
            if (kind == PolicyKind::vaccine) order_kind = kind;
        }
        std::vector<std::pair<double, std::string>> ordered;
        for (const auto& rec : records) {
            if (rec.kind == order_kind) ordered.emplace_back(rec.total_rate, rec.region);
        }
        std::sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first > b.first;
            return a.second < b.second;
        });
        std::vector<std::string> region_order;
        for (const auto& [rate, region] : ordered) region_order.push_back(region);
        if (!region_order.empty()) {
            emit(cfg, manifest, "fig_effect_rates.svg",
                 figure_effect_bars(records, region_order,
                                    "policy effective rates by region"));
        }
    }

    // Cross-policy correlations over regions present in both cohorts.
    if (cfg.kinds.size() >= 2) {
        std::ostringstream corr_csv;
        corr_csv << "metric,kind_a,kind_b,n,pearson_r\n";
        bool any = false;
        for (std::size_t a = 0; a < cfg.kinds.size(); ++a) {
            for (std::size_t b = a + 1; b < cfg.kinds.size(); ++b) {
                std::vector<double> total_a, total_b, max_a, max_b;
                for (const auto& rec : records) {
                    if (rec.kind != cfg.kinds[a]) continue;
                    for (const auto& other : records) {
                        if (other.kind == cfg.kinds[b] && other.region == rec.region) {
                            total_a.push_back(rec.total_rate);
                            total_b.push_back(other.total_rate);
                            max_a.push_back(rec.max_rate);
                            max_b.push_back(other.max_rate);
                        }
                    }
                }
                if (total_a.size() < 2) {
                    manifest.note("correlation " + to_string(cfg.kinds[a]) + "/" +
                                  to_string(cfg.kinds[b]) + " omitted: fewer than 2 shared regions");
                    continue;
                }
                try {
                    corr_csv << "total," << to_string(cfg.kinds[a]) << ',' << to_string(cfg.kinds[b])
                             << ',' << total_a.size() << ','
                             << format_double(pearson_correlation(total_a, total_b)) << '\n';
                    corr_csv << "max," << to_string(cfg.kinds[a]) << ',' << to_string(cfg.kinds[b])
                             << ',' << max_a.size() << ','
                             << format_double(pearson_correlation(max_a, max_b)) << '\n';
                    any = true;
                } catch (const UndefinedCorrelationError& e) {
                    manifest.note(std::string("correlation omitted: ") + e.what());
                }
            }
        }
        if (any) emit(cfg, manifest, "correlations.csv", corr_csv.str());
    }
    return counters;
}

// ---------------------------------------------------------------------------
// regress: OLS screens of transformed effect rates on region factors

namespace pipeline_detail {

struct EffectRow {
    std::string region;
    PolicyKind kind;
    std::optional<double> int_max;
    std::optional<double> int_total;
};

inline std::vector<EffectRow> load_effect_csv(const std::string& path) {
    const CsvTable table = read_csv(path);
    expect_header(table, {"region", "kind", "max_rate", "total_rate", "int_max", "int_total"});
    std::vector<EffectRow> rows;
    for (std::size_t k = 0; k < table.rows.size(); ++k) {
        const auto& cells = table.rows[k];
        const std::string where = table.name + ":" + std::to_string(table.lines[k]);
        EffectRow row;
        row.region = cells[0];
        row.kind = parse_policy_kind(cells[1]);
        if (!cells[4].empty()) row.int_max = parse_double(cells[4], where);
        if (!cells[5].empty()) row.int_total = parse_double(cells[5], where);
        rows.push_back(std::move(row));
    }
    return rows;
}

inline void append_regress_rows(std::ostringstream& csv, const std::string& response,
                                const RegressionResult& fit, double alpha, bool skip_intercept) {
    for (std::size_t k = 0; k < fit.terms.size(); ++k) {
        const auto& term = fit.terms[k];
        if (skip_intercept && term.name == "intercept") continue;
        const bool flagged = term.name != "intercept" && term.p_value < alpha;
        csv << response << ',' << term.name << ',' << format_double(term.estimate) << ','
            << format_double(term.std_error) << ',' << format_double(term.t_stat) << ','
            << format_double(term.p_value) << ',' << format_double(fit.r_squared) << ','
            << (flagged ? 1 : 0) << '\n';
    }
}

}  // namespace pipeline_detail

inline StageCounters run_regress_stage(const RunConfig& cfg, RunManifest& manifest) {
    using namespace pipeline_detail;
    StageCounters counters;
    manifest.begin_section("regress");

    const std::string effects_path =
        cfg.effects_csv.empty() ? out_path(cfg, "effect_rates.csv") : cfg.effects_csv;
    if (!std::filesystem::exists(effects_path)) {
        throw ConfigError("effect-rate table '" + effects_path +
                          "' not found; run policy-effect first");
    }
    const std::vector<EffectRow> effects = load_effect_csv(effects_path);
    const FactorTable factors = load_factor_csv(cfg.factors_csv);
    for (const auto& dropped : factors.dropped) {
        manifest.note("factor table: region '" + dropped + "' dropped (missing factor values)");
    }

    struct Response {
        std::string name;
        PolicyKind kind;
        bool use_max;
    };
    std::vector<Response> responses;
    for (const PolicyKind kind : {PolicyKind::mask, PolicyKind::vaccine}) {
        bool requested = false;
        for (const PolicyKind k : cfg.kinds) requested |= (k == kind);
        if (!requested) continue;
        responses.push_back({"max " + to_string(kind), kind, true});
        responses.push_back({"total " + to_string(kind), kind, false});
    }

    std::ostringstream multi_csv, uni_csv;
    const std::string header = "response,factor,estimate,std_error,t,p,r_squared,flagged\n";
    multi_csv << header;
    uni_csv << header;

    for (const auto& response : responses) {
        // Align regions present in both the effect cohort and factor table.
        FactorTable aligned;
        aligned.factor_names = factors.factor_names;
        aligned.columns.resize(factors.factor_names.size());
        std::vector<double> y;
        int missing_factors = 0;
        for (const auto& row : effects) {
            if (row.kind != response.kind) continue;
            const auto value = response.use_max ? row.int_max : row.int_total;
            if (!value) continue;  // transform was not applicable (cohort of 1)
            const auto idx = factors.region_index(row.region);
            if (!idx) {
                ++missing_factors;
                manifest.note("regress " + response.name + ": region '" + row.region +
                              "' dropped (no factor row)");
                continue;
            }
            aligned.regions.push_back(row.region);
            for (std::size_t f = 0; f < factors.factor_names.size(); ++f) {
                aligned.columns[f].push_back(factors.columns[f][*idx]);
            }
            y.push_back(*value);
        }

        std::string status;
        try {
            const ScreenResult screen = multivariate_screen(aligned, y, cfg.alpha);
            append_regress_rows(multi_csv, response.name, screen.fit, cfg.alpha, false);
            status = "ok (n=" + std::to_string(screen.fit.n) + ")";
            ++counters.analyzed;
        } catch (const Error& e) {
            status = std::string("multivariate failed: ") + e.what();
            ++counters.excluded;
        }
        try {
            const ScanResult scan = univariate_scan(aligned, y, cfg.alpha);
            for (const auto& entry : scan.entries) {
                if (entry.result) {
                    RegressionResult slope_only = *entry.result;
                    slope_only.terms.erase(slope_only.terms.begin());  // drop intercept row
                    append_regress_rows(uni_csv, response.name, slope_only, cfg.alpha, false);
                } else {
                    manifest.note("regress " + response.name + " factor " + entry.factor + ": " +
                                  entry.error);
                }
            }
        } catch (const Error& e) {
            status += std::string("; univariate failed: ") + e.what();
        }
        manifest.line("response " + response.name + ": " + status);
    }

    emit(cfg, manifest, "regress_multivariate.csv", multi_csv.str());
    emit(cfg, manifest, "regress_univariate.csv", uni_csv.str());
    return counters;
}

// ---------------------------------------------------------------------------
// command entry points

namespace pipeline_detail {

inline void echo_config(const RunConfig& cfg, const std::string& command, RunManifest& manifest) {
    manifest.config("artifact_version", EPIPOLICY_VERSION);
    manifest.config("command", command);
    manifest.config("seed", std::to_string(cfg.model.seed));
    manifest.config("credible_level", format_double(cfg.model.credible_level));
    manifest.config("alpha", format_double(cfg.alpha));
    manifest.config("span", cfg.loess.span ? format_double(*cfg.loess.span) : "auto");
    manifest.config("loess_degree", std::to_string(cfg.loess.degree));
    manifest.config("chains", std::to_string(cfg.model.chains));
    manifest.config("iterations", std::to_string(cfg.model.iterations));
    manifest.config("burn_in", std::to_string(cfg.model.burn_in));
    manifest.config("thin", std::to_string(cfg.model.thin));
    manifest.config("observe_removed", cfg.model.observe_removed ? "true" : "false");
    std::string kinds;
    for (const PolicyKind kind : cfg.kinds) kinds += (kinds.empty() ? "" : ",") + to_string(kind);
    manifest.config("kinds", kinds);
    manifest.config("covid_csv", cfg.covid_csv);
    manifest.config("population_csv", cfg.population_csv);
    manifest.config("policy_csv", cfg.policy_csv);
    manifest.config("factors_csv", cfg.factors_csv);
    manifest.config("out_dir", cfg.out_dir);
}

inline int finish(const RunConfig& cfg, RunManifest& manifest, const StageCounters& counters) {
    manifest.output_file("manifest.txt");
    write_text_file(out_path(cfg, "manifest.txt"), manifest.str());
    return counters.excluded > 0 ? kExitPartial : kExitOk;
}

}  // namespace pipeline_detail

inline int cmd_validate(const RunConfig& cfg) {
    cfg.model.validate();
    cfg.require_inputs(true, false);
    RunManifest manifest;
    pipeline_detail::echo_config(cfg, "validate", manifest);
    const auto data = pipeline_detail::load_dataset(cfg, true);
    const StageCounters counters = run_validate_stage(cfg, data, manifest);
    return pipeline_detail::finish(cfg, manifest, counters);
}

inline int cmd_policy_effect(const RunConfig& cfg) {
    cfg.model.validate();
    cfg.require_inputs(true, false);
    RunManifest manifest;
    pipeline_detail::echo_config(cfg, "policy-effect", manifest);
    const auto data = pipeline_detail::load_dataset(cfg, true);
    const StageCounters counters = run_policy_effect_stage(cfg, data, manifest);
    return pipeline_detail::finish(cfg, manifest, counters);
}

inline int cmd_regress(const RunConfig& cfg) {
    cfg.model.validate();
    cfg.require_inputs(false, true);
    RunManifest manifest;
    pipeline_detail::echo_config(cfg, "regress", manifest);
    const StageCounters counters = run_regress_stage(cfg, manifest);
    return pipeline_detail::finish(cfg, manifest, counters);
}

// Full pipeline: validate, policy-effect, regress, one combined manifest.
inline int cmd_pipeline(const RunConfig& cfg) {
    cfg.model.validate();
    cfg.require_inputs(true, true);
    RunManifest manifest;
    pipeline_detail::echo_config(cfg, "pipeline", manifest);
    const auto data = pipeline_detail::load_dataset(cfg, true);
    StageCounters totals;
    const StageCounters validate_counts = run_validate_stage(cfg, data, manifest);
    totals.analyzed += validate_counts.analyzed;
    totals.excluded += validate_counts.excluded;
    const StageCounters effect_counts = run_policy_effect_stage(cfg, data, manifest);
    totals.analyzed += effect_counts.analyzed;
    totals.excluded += effect_counts.excluded;
    RunConfig regress_cfg = cfg;
    regress_cfg.effects_csv = pipeline_detail::out_path(cfg, "effect_rates.csv");
    const StageCounters regress_counts = run_regress_stage(regress_cfg, manifest);
    totals.analyzed += regress_counts.analyzed;
    totals.excluded += regress_counts.excluded;
    return pipeline_detail::finish(cfg, manifest, totals);
}

}  // namespace epipolicy
