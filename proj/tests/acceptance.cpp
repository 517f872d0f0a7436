// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Oracle implementations live in oracles.hpp and are
// independent of the library code paths they check.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "epipolicy/pipeline.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace epipolicy;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool condition, const std::string& message) {
        if (!condition && pass) {
            pass = false;
            detail = message;
        }
    }
};

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return "<missing: " + path.string() + ">";
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// --------------------------------------------------------------------------

Outcome criterion_ols_oracle() {
    Outcome out;
    std::mt19937_64 engine(20240501);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const auto started = std::chrono::steady_clock::now();
    for (int rep = 0; rep < 50; ++rep) {
        const int p = 2 + rep % 3;            // columns including intercept, <= 4
        const int n = p + 6 + rep % 11;        // <= 20
        Eigen::MatrixXd design(n, p);
        std::vector<std::vector<double>> rows(static_cast<std::size_t>(n));
        std::vector<double> y(static_cast<std::size_t>(n));
        std::vector<std::string> names;
        for (int c = 0; c < p; ++c) names.push_back(c == 0 ? "intercept" : "f" + std::to_string(c));
        for (int r = 0; r < n; ++r) {
            design(r, 0) = 1.0;
            rows[static_cast<std::size_t>(r)].push_back(1.0);
            for (int c = 1; c < p; ++c) {
                const double v = unit(engine);
                design(r, c) = v;
                rows[static_cast<std::size_t>(r)].push_back(v);
            }
            y[static_cast<std::size_t>(r)] = 2.0 * unit(engine);
        }
        Eigen::VectorXd response(n);
        for (int r = 0; r < n; ++r) response(r) = y[static_cast<std::size_t>(r)];

        const RegressionResult fit = ols_fit(design, names, response);
        const oracle::OlsOracle ref = oracle::ols_oracle(rows, y);
        for (int c = 0; c < p; ++c) {
            out.require(std::fabs(fit.terms[static_cast<std::size_t>(c)].estimate -
                                  ref.estimates[static_cast<std::size_t>(c)]) < 1e-10,
                        "estimate mismatch at rep " + std::to_string(rep));
            out.require(std::fabs(fit.terms[static_cast<std::size_t>(c)].p_value -
                                  ref.p_values[static_cast<std::size_t>(c)]) < 1e-8,
                        "p-value mismatch at rep " + std::to_string(rep));
        }
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    out.require(seconds < 1.0, "runtime " + std::to_string(seconds) + " s exceeds 1 s");
    return out;
}

Outcome criterion_loess_oracle() {
    Outcome out;
    std::mt19937_64 engine(77001);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const auto started = std::chrono::steady_clock::now();
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t n = 10 + static_cast<std::size_t>(unit(engine) * 40);  // <= 50
        std::vector<double> x(n), y(n);
        double acc = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            acc += 0.2 + unit(engine);
            x[k] = acc;
            y[k] = 10.0 * std::sin(0.3 * acc) + 4.0 * unit(engine);
        }
        const int degree = rep % 2 + 1;
        const double span = 0.3 + 0.65 * unit(engine);

        LoessConfig cfg;
        cfg.degree = degree;
        cfg.span = span;
        const auto fitted = loess_fit(x, y, cfg);
        const auto ref = oracle::loess_brute(x, y, degree, span);
        for (std::size_t k = 0; k < n; ++k) {
            out.require(std::fabs(fitted[k] - ref.fitted[k]) < 1e-8,
                        "fit mismatch at rep " + std::to_string(rep));
        }

        LoessConfig auto_cfg;
        auto_cfg.degree = degree;
        const double chosen = select_span(x, y, auto_cfg);
        const double expected = oracle::select_span_brute(x, y, degree, auto_cfg.span_grid);
        out.require(chosen == expected, "span selection mismatch at rep " + std::to_string(rep));
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    out.require(seconds < 5.0, "runtime " + std::to_string(seconds) + " s exceeds 5 s");
    return out;
}

Outcome criterion_sir_integrator() {
    Outcome out;
    std::mt19937_64 engine(555);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const auto started = std::chrono::steady_clock::now();
    for (int rep = 0; rep < 100; ++rep) {
        const double beta = 0.05 + 0.55 * unit(engine);
        const double gamma = 0.02 + 0.38 * unit(engine);
        double a = unit(engine), b = unit(engine);
        if (a > b) std::swap(a, b);
        const Theta theta{a, b - a, 1.0 - b};
        const Theta stepped = rk4_step(theta, {beta, gamma}, 1.0);
        const auto ref = oracle::euler_sir({theta.s, theta.i, theta.r}, beta, gamma, 1.0, 1e-4);
        out.require(std::fabs(stepped.s - ref.s) < 1e-5, "s deviates at rep " + std::to_string(rep));
        out.require(std::fabs(stepped.i - ref.i) < 1e-5, "i deviates at rep " + std::to_string(rep));
        out.require(std::fabs(stepped.r - ref.r) < 1e-5, "r deviates at rep " + std::to_string(rep));
    }

    // order-4 convergence: global error over a fixed four-day window
    const Theta theta0{0.70, 0.25, 0.05};
    const SirParams params{0.9, 0.12};
    auto advance = [&](double dt) {
        Theta state = theta0;
        const int steps = static_cast<int>(std::lround(4.0 / dt));
        for (int k = 0; k < steps; ++k) state = rk4_step(state, params, dt);
        return state;
    };
    const Theta reference = advance(1.0 / 32.0);
    auto err = [&](double dt) {
        const Theta state = advance(dt);
        return std::max({std::fabs(state.s - reference.s), std::fabs(state.i - reference.i),
                         std::fabs(state.r - reference.r)});
    };
    const double e1 = err(1.0), e2 = err(0.5), e3 = err(0.25);
    const double r12 = e1 / e2, r23 = e2 / e3;
    out.require(r12 > 16.0 * 0.7 && r12 < 16.0 * 1.3,
                "halving ratio e(1)/e(0.5) = " + std::to_string(r12));
    out.require(r23 > 16.0 * 0.7 && r23 < 16.0 * 1.3,
                "halving ratio e(0.5)/e(0.25) = " + std::to_string(r23));

    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    out.require(seconds < 5.0, "runtime " + std::to_string(seconds) + " s exceeds 5 s");
    return out;
}

Outcome criterion_synthetic_recovery() {
    Outcome out;
    const double beta_true = 0.35, gamma_true = 0.15, kappa_true = 1e4, lambda_true = 1e4;
    Rng rng(981);
    Theta state{0.97, 0.02, 0.01};
    CompartmentSeries observed;
    observed.region = "SYN";
    std::vector<double> future_i;
    const Date start = Date::from_ymd(2020, 5, 22);
    for (int t = 0; t < 61; ++t) {
        const Theta mean = rk4_step(state, {beta_true, gamma_true}, 1.0);
        const auto draw =
            rng.dirichlet({kappa_true * mean.s, kappa_true * mean.i, kappa_true * mean.r});
        state = Theta{draw[0], draw[1], draw[2]};
        if (t < 30) {
            const double y_i = rng.beta(lambda_true * state.i, lambda_true * (1.0 - state.i));
            const double y_r = rng.beta(lambda_true * state.r, lambda_true * (1.0 - state.r));
            observed.rows.push_back({start + t, 1.0 - y_i - y_r, y_i, y_r});
        } else {
            future_i.push_back(state.i);
        }
    }

    EsirModelSpec spec;  // default MCMC settings: 4 chains x 20000, burn 10000, thin 10
    spec.seed = 31337;
    const PosteriorDraws draws = fit(observed, spec);
    out.require(draws.draws.size() >= 2000,
                "retained draws " + std::to_string(draws.draws.size()) + " < 2000");

    std::vector<double> betas, gammas;
    for (const auto& d : draws.draws) {
        betas.push_back(d.beta);
        gammas.push_back(d.gamma);
    }
    const double beta_med = median(betas);
    const double gamma_med = median(gammas);
    out.require(std::fabs(beta_med - beta_true) / beta_true <= 0.2,
                "posterior median beta " + std::to_string(beta_med));
    out.require(std::fabs(gamma_med - gamma_true) / gamma_true <= 0.2,
                "posterior median gamma " + std::to_string(gamma_med));

    const PredictiveSummary band = predict(draws, 31, spec);
    int covered = 0;
    for (int d = 0; d < 31; ++d) {
        if (future_i[static_cast<std::size_t>(d)] >= band.lower_i[static_cast<std::size_t>(d)] &&
            future_i[static_cast<std::size_t>(d)] <= band.upper_i[static_cast<std::size_t>(d)]) {
            ++covered;
        }
    }
    out.require(covered >= 28, "band covered only " + std::to_string(covered) + "/31 days");
    return out;
}

Outcome criterion_effect_rates() {
    Outcome out;
    const std::vector<double> predicted = {0.02, 0.03};
    const std::vector<double> actual = {0.01, 0.02};
    const auto daily = daily_effect_rates(predicted, actual);
    out.require(std::fabs(daily[0] - 1.0) <= 1e-12, "daily[0] != 1.0");
    out.require(std::fabs(daily[1] - 0.5) <= 1e-12, "daily[1] != 0.5");
    out.require(std::fabs(max_effect_rate(daily) - 1.0) <= 1e-12, "max rate != 1.0");
    out.require(std::fabs(total_effect_rate(predicted, actual) - 2.0 / 3.0) <= 1e-12,
                "total rate != 2/3");

    std::mt19937_64 engine(90210);
    std::uniform_real_distribution<double> unit(0.01, 1.0);
    for (int rep = 0; rep < 100; ++rep) {
        std::vector<double> p(31), a(31);
        for (int d = 0; d < 31; ++d) {
            p[static_cast<std::size_t>(d)] = unit(engine);
            a[static_cast<std::size_t>(d)] = unit(engine);
        }
        const double c = 0.1 + 50.0 * unit(engine);
        std::vector<double> pc = p, ac = a;
        for (double& v : pc) v *= c;
        for (double& v : ac) v *= c;
        const auto d1 = daily_effect_rates(p, a);
        const auto d2 = daily_effect_rates(pc, ac);
        for (int d = 0; d < 31; ++d) {
            out.require(std::fabs(d1[static_cast<std::size_t>(d)] -
                                  d2[static_cast<std::size_t>(d)]) < 1e-9,
                        "daily rate not scale invariant");
        }
        out.require(std::fabs(max_effect_rate(d1) - max_effect_rate(d2)) < 1e-9,
                    "max rate not scale invariant");
        out.require(std::fabs(total_effect_rate(p, a) - total_effect_rate(pc, ac)) < 1e-9,
                    "total rate not scale invariant");
    }
    return out;
}

Outcome criterion_int_transform() {
    Outcome out;
    std::mt19937_64 engine(64);
    std::uniform_real_distribution<double> unit(-5.0, 5.0);
    for (int n = 2; n <= 30; ++n) {
        std::vector<double> values;
        while (static_cast<int>(values.size()) < n) {
            const double v = unit(engine);
            if (std::find(values.begin(), values.end(), v) == values.end()) values.push_back(v);
        }
        const auto transformed = inverse_normal_transform(values);

        std::vector<std::size_t> order(values.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        for (int r = 0; r < n; ++r) {
            const double p = (static_cast<double>(r + 1) - 0.375) / (static_cast<double>(n) + 0.25);
            const double expected = oracle::normal_quantile_bisect(p);
            out.require(std::fabs(transformed[order[static_cast<std::size_t>(r)]] - expected) <
                            1e-10,
                        "quantile mismatch at n=" + std::to_string(n));
            if (r > 0) {
                out.require(transformed[order[static_cast<std::size_t>(r)]] >
                                transformed[order[static_cast<std::size_t>(r - 1)]],
                            "order not preserved at n=" + std::to_string(n));
            }
        }
        if (n % 2 == 1) {
            out.require(transformed[order[static_cast<std::size_t>(n / 2)]] == 0.0,
                        "odd-n median image not exactly zero at n=" + std::to_string(n));
        }
    }
    return out;
}

Outcome criterion_planted_signal() {
    Outcome out;
    int joint_hits = 0;
    const int replications = 100;
    for (int rep = 0; rep < replications; ++rep) {
        std::mt19937_64 engine(4000 + static_cast<unsigned>(rep));
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::normal_distribution<double> noise(0.0, 0.1);
        const int n = 25;
        FactorTable table;
        for (int f = 0; f < 9; ++f) table.factor_names.push_back("f" + std::to_string(f));
        table.columns.assign(9, std::vector<double>(static_cast<std::size_t>(n)));
        std::vector<double> response(static_cast<std::size_t>(n));
        for (int r = 0; r < n; ++r) {
            table.regions.push_back("R" + std::to_string(r));
            for (int f = 0; f < 9; ++f) {
                table.columns[static_cast<std::size_t>(f)][static_cast<std::size_t>(r)] =
                    unit(engine);
            }
            response[static_cast<std::size_t>(r)] =
                2.0 * table.columns[3][static_cast<std::size_t>(r)] + noise(engine);
        }
        bool multi_hit = false, uni_hit = false;
        try {
            const ScreenResult screen = multivariate_screen(table, response, 0.1);
            multi_hit = std::find(screen.flagged.begin(), screen.flagged.end(), "f3") !=
                        screen.flagged.end();
            const ScanResult scan = univariate_scan(table, response, 0.1);
            uni_hit = std::find(scan.flagged.begin(), scan.flagged.end(), "f3") !=
                      scan.flagged.end();
        } catch (const Error&) {
            // counted as a miss
        }
        if (multi_hit && uni_hit) ++joint_hits;
    }
    out.require(joint_hits >= 95,
                "planted factor recovered in only " + std::to_string(joint_hits) + "/100 runs");
    return out;
}

RunConfig fixture_config(const std::string& out_dir) {
    const std::string fixture = EPIPOLICY_FIXTURE_DIR;
    RunConfig cfg;
    cfg.covid_csv = fixture + "/covid.csv";
    cfg.population_csv = fixture + "/population.csv";
    cfg.policy_csv = fixture + "/policy.csv";
    cfg.factors_csv = fixture + "/factors.csv";
    cfg.out_dir = out_dir;
    cfg.model.chains = 2;
    cfg.model.iterations = 1200;
    cfg.model.burn_in = 600;
    cfg.model.thin = 6;
    cfg.model.seed = 4242;
    return cfg;
}

Outcome criterion_end_to_end_determinism() {
    Outcome out;
    fs::remove_all("acceptance_out");
    const RunConfig cfg = fixture_config("acceptance_out/run");
    const int code_a = cmd_pipeline(cfg);
    const fs::path snapshot = "acceptance_out/first";
    fs::create_directories(snapshot);
    fs::copy(cfg.out_dir, snapshot, fs::copy_options::recursive);
    const int code_b = cmd_pipeline(cfg);
    out.require(code_a == code_b, "exit codes differ between reruns");
    std::size_t compared = 0;
    for (const auto& entry : fs::directory_iterator(snapshot)) {
        const fs::path rerun = fs::path(cfg.out_dir) / entry.path().filename();
        out.require(fs::exists(rerun), "missing on rerun: " + entry.path().filename().string());
        if (!fs::exists(rerun)) continue;
        out.require(slurp(entry.path()) == slurp(rerun),
                    "byte mismatch: " + entry.path().filename().string());
        ++compared;
    }
    out.require(compared > 10, "too few outputs compared: " + std::to_string(compared));
    return out;
}

Outcome criterion_paper_shape() {
    Outcome out;
    const fs::path out_dir = "acceptance_out/run";  // produced by criterion 8
    const std::vector<std::string> responses = {"max mask", "total mask", "max vaccine",
                                                "total vaccine"};
    const std::vector<std::string> factor_names = {
        "population_density", "hospital_bed", "percent_over_65", "public_health", "immigration",
        "gdp_per_capita",     "education",    "politics_r",      "population"};
    const std::vector<std::string> expected_header = {"response", "factor",    "estimate",
                                                      "std_error", "t",        "p",
                                                      "r_squared", "flagged"};

    for (const char* name : {"regress_multivariate.csv", "regress_univariate.csv"}) {
        const CsvTable table = read_csv_text(slurp(out_dir / name), name);
        out.require(table.header == expected_header, std::string(name) + ": header mismatch");
        for (const auto& response : responses) {
            for (const auto& factor : factor_names) {
                int hits = 0;
                for (const auto& row : table.rows) {
                    if (row[0] == response && row[1] == factor) ++hits;
                }
                out.require(hits == 1, std::string(name) + ": expected exactly one row for (" +
                                           response + ", " + factor + "), got " +
                                           std::to_string(hits));
            }
        }
        const bool is_multi = std::string(name) == "regress_multivariate.csv";
        for (const auto& response : responses) {
            int intercepts = 0;
            for (const auto& row : table.rows) {
                if (row[0] == response && row[1] == "intercept") ++intercepts;
            }
            out.require(intercepts == (is_multi ? 1 : 0),
                        std::string(name) + ": intercept rows for " + response);
        }
    }

    const std::string bars = slurp(out_dir / "fig_effect_rates.svg");
    std::string why;
    out.require(oracle::xml_well_formed(bars, &why), "bar figure not well-formed: " + why);
    const CsvTable effects = read_csv_text(slurp(out_dir / "effect_rates.csv"), "effects");
    int mask_n = 0, vaccine_n = 0;
    for (const auto& row : effects.rows) {
        if (row[1] == "mask") ++mask_n;
        if (row[1] == "vaccine") ++vaccine_n;
    }
    auto count_class = [&](const std::string& cls) {
        std::size_t count = 0, pos = 0;
        const std::string needle = "class=\"" + cls + "\"";
        while ((pos = bars.find(needle, pos)) != std::string::npos) {
            ++count;
            pos += needle.size();
        }
        return static_cast<int>(count);
    };
    out.require(count_class("series-total-mask") == mask_n, "total-mask bar count");
    out.require(count_class("series-max-mask") == mask_n, "max-mask bar count");
    out.require(count_class("series-total-vaccine") == vaccine_n, "total-vaccine bar count");
    out.require(count_class("series-max-vaccine") == vaccine_n, "max-vaccine bar count");
    for (const char* label : {"total mask", "total vaccine", "max mask", "max vaccine"}) {
        out.require(bars.find(std::string(">") + label + "</text>") != std::string::npos,
                    std::string("legend entry missing: ") + label);
    }
    return out;
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria = {
        {1, "OLS oracle equivalence", criterion_ols_oracle},
        {2, "LOESS oracle equivalence", criterion_loess_oracle},
        {3, "SIR integrator accuracy", criterion_sir_integrator},
        {4, "synthetic parameter recovery", criterion_synthetic_recovery},
        {5, "effect-rate arithmetic", criterion_effect_rates},
        {6, "inverse normal transform correctness", criterion_int_transform},
        {7, "planted-signal regression screen", criterion_planted_signal},
        {8, "end-to-end determinism", criterion_end_to_end_determinism},
        {9, "paper-shape conformance", criterion_paper_shape},
    };

    int failures = 0;
    for (const auto& criterion : criteria) {
        const auto started = std::chrono::steady_clock::now();
        Outcome outcome;
        try {
            outcome = criterion.run();
        } catch (const std::exception& e) {
            outcome.pass = false;
            outcome.detail = std::string("exception: ") + e.what();
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        std::printf("[%s] criterion %d: %s (%.2f s)%s%s\n", outcome.pass ? "PASS" : "FAIL",
                    criterion.id, criterion.name, seconds, outcome.pass ? "" : " — ",
                    outcome.pass ? "" : outcome.detail.c_str());
        std::fflush(stdout);
        if (!outcome.pass) ++failures;
    }
    if (failures > 0) {
        std::printf("%d of %zu criteria failed\n", failures, criteria.size());
        return 1;
    }
    std::printf("all %zu criteria passed\n", criteria.size());
    return 0;
}
