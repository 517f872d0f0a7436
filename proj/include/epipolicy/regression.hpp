#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "epipolicy/csv.hpp"
#include "epipolicy/errors.hpp"
#include "epipolicy/stats.hpp"

namespace epipolicy {

// Region-level factor matrix. Regions with any missing cell are dropped
// listwise at load time and recorded in `dropped`.
struct FactorTable {
    std::vector<std::string> regions;
    std::vector<std::string> factor_names;
    std::vector<std::vector<double>> columns;  // columns[f][row], aligned with regions
    std::vector<std::string> dropped;

    std::size_t n_regions() const { return regions.size(); }

    std::optional<std::size_t> region_index(const std::string& region) const {
        for (std::size_t k = 0; k < regions.size(); ++k) {
            if (regions[k] == region) return k;
        }
        return std::nullopt;
    }
};

inline FactorTable load_factor_table(const CsvTable& table) {
    if (table.header.empty() || table.header[0] != "region") {
        throw ParseError(table.name + ": factor CSV must start with a 'region' column");
    }
    if (table.header.size() < 2) {
        throw ParseError(table.name + ": factor CSV needs at least one factor column");
    }
    FactorTable factors;
    factors.factor_names.assign(table.header.begin() + 1, table.header.end());
    factors.columns.resize(factors.factor_names.size());
    for (std::size_t k = 0; k < table.rows.size(); ++k) {
        const auto& cells = table.rows[k];
        const bool complete =
            std::none_of(cells.begin() + 1, cells.end(), [](const std::string& c) { return c.empty(); });
        if (!complete) {
            factors.dropped.push_back(cells[0]);
            continue;
        }
        factors.regions.push_back(cells[0]);
        for (std::size_t f = 0; f < factors.columns.size(); ++f) {
            factors.columns[f].push_back(parse_double(
                cells[f + 1], table.name + ":" + std::to_string(table.lines[k])));
        }
    }
    return factors;
}

inline FactorTable load_factor_csv(const std::string& path) {
    return load_factor_table(read_csv(path));
}

struct RegressionTerm {
    std::string name;
    double estimate = 0.0;
    double std_error = 0.0;
    double t_stat = 0.0;
    double p_value = 1.0;
};

struct RegressionResult {
    std::vector<RegressionTerm> terms;
    double r_squared = 0.0;
    int n = 0;
    int dof = 0;
};

// Ordinary least squares with intercept-aware statistics: coefficients from
// a rank-revealing QR of the design, standard errors from
// sigma^2 (X'X)^-1 with sigma^2 = RSS/dof, two-sided t p-values, and
// R^2 = 1 - RSS/TSS.
inline RegressionResult ols_fit(const Eigen::MatrixXd& design,
                                const std::vector<std::string>& term_names,
                                const Eigen::VectorXd& response) {
    const int n = static_cast<int>(design.rows());
    const int p = static_cast<int>(design.cols());
    if (static_cast<int>(term_names.size()) != p) {
        throw DomainError("ols_fit: term name count does not match design columns");
    }
    if (response.size() != n) throw DomainError("ols_fit: response length mismatch");
    if (n <= p) {
        throw InsufficientObservationsError("ols_fit: " + std::to_string(n) + " observations for " +
                                            std::to_string(p) + " terms");
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    qr.setThreshold(1e-10);
    if (qr.rank() < p) {
        const auto perm = qr.colsPermutation().indices();
        std::string names;
        for (int k = qr.rank(); k < p; ++k) {
            if (!names.empty()) names += ", ";
            names += term_names[static_cast<std::size_t>(perm[k])];
        }
        throw CollinearityError("ols_fit: design is rank deficient; dependent columns: " + names);
    }

    const Eigen::VectorXd beta = qr.solve(response);
    const Eigen::VectorXd residuals = response - design * beta;
    const double rss = residuals.squaredNorm();
    const int dof = n - p;
    const double sigma2 = rss / static_cast<double>(dof);
    const Eigen::MatrixXd xtx_inv =
        (design.transpose() * design).ldlt().solve(Eigen::MatrixXd::Identity(p, p));

    const double mean_y = response.mean();
    const double tss = (response.array() - mean_y).matrix().squaredNorm();

    RegressionResult result;
    result.n = n;
    result.dof = dof;
    result.r_squared = tss > 0.0 ? std::clamp(1.0 - rss / tss, 0.0, 1.0) : (rss <= 1e-24 ? 1.0 : 0.0);
    result.terms.reserve(static_cast<std::size_t>(p));
    for (int k = 0; k < p; ++k) {
        RegressionTerm term;
        term.name = term_names[static_cast<std::size_t>(k)];
        term.estimate = beta(k);
        term.std_error = std::sqrt(std::max(0.0, sigma2 * xtx_inv(k, k)));
        term.t_stat = term.std_error > 0.0 ? term.estimate / term.std_error
                                           : std::numeric_limits<double>::infinity();
        term.p_value = student_t_two_sided_p(term.t_stat, static_cast<double>(dof));
        result.terms.push_back(std::move(term));
    }
    return result;
}

struct ScreenResult {
    RegressionResult fit;
    std::vector<std::string> flagged;  // factor terms with p < alpha (intercept excluded)
};

// One joint fit of the response on all factors plus intercept.
inline ScreenResult multivariate_screen(const FactorTable& factors,
                                        const std::vector<double>& response, double alpha) {
    if (response.size() != factors.n_regions()) {
        throw DomainError("multivariate_screen: response not aligned with factor rows");
    }
    const int n = static_cast<int>(factors.n_regions());
    const int p = static_cast<int>(factors.factor_names.size()) + 1;
    Eigen::MatrixXd design(n, p);
    std::vector<std::string> names;
    names.reserve(static_cast<std::size_t>(p));
    names.push_back("intercept");
    design.col(0).setOnes();
    for (std::size_t f = 0; f < factors.factor_names.size(); ++f) {
        names.push_back(factors.factor_names[f]);
        for (int row = 0; row < n; ++row) {
            design(row, static_cast<int>(f) + 1) = factors.columns[f][static_cast<std::size_t>(row)];
        }
    }
    Eigen::VectorXd y(n);
    for (int row = 0; row < n; ++row) y(row) = response[static_cast<std::size_t>(row)];

    ScreenResult out;
    out.fit = ols_fit(design, names, y);
    for (std::size_t k = 1; k < out.fit.terms.size(); ++k) {
        if (out.fit.terms[k].p_value < alpha) out.flagged.push_back(out.fit.terms[k].name);
    }
    return out;
}

struct ScanEntry {
    std::string factor;
    std::optional<RegressionResult> result;  // unset when the fit errored
    std::string error;
};

struct ScanResult {
    std::vector<ScanEntry> entries;       // one per factor, declaration order
    std::vector<std::string> flagged;     // factors with slope p < alpha
};

// One simple regression (intercept + factor) per factor. Per-factor errors
// are recorded and the scan continues.
inline ScanResult univariate_scan(const FactorTable& factors, const std::vector<double>& response,
                                  double alpha) {
    if (response.size() != factors.n_regions()) {
        throw DomainError("univariate_scan: response not aligned with factor rows");
    }
    const int n = static_cast<int>(factors.n_regions());
    Eigen::VectorXd y(n);
    for (int row = 0; row < n; ++row) y(row) = response[static_cast<std::size_t>(row)];

    ScanResult out;
    for (std::size_t f = 0; f < factors.factor_names.size(); ++f) {
        ScanEntry entry;
        entry.factor = factors.factor_names[f];
        Eigen::MatrixXd design(n, 2);
        design.col(0).setOnes();
        for (int row = 0; row < n; ++row) {
            design(row, 1) = factors.columns[f][static_cast<std::size_t>(row)];
        }
        try {
            entry.result = ols_fit(design, {"intercept", entry.factor}, y);
            if (entry.result->terms[1].p_value < alpha) out.flagged.push_back(entry.factor);
        } catch (const Error& e) {
            entry.error = e.what();
        }
        out.entries.push_back(std::move(entry));
    }
    return out;
}

}  // namespace epipolicy
