#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "epipolicy/dates.hpp"
#include "epipolicy/errors.hpp"
#include "epipolicy/stats.hpp"

namespace epipolicy {

// Prediction horizon: effect rates are scored over 31 forecast days.
inline constexpr int kEffectHorizonDays = 31;

enum class PolicyKind { mask, vaccine, custom };

inline std::string to_string(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::mask: return "mask";
        case PolicyKind::vaccine: return "vaccine";
        case PolicyKind::custom: return "custom";
    }
    return "?";
}

inline PolicyKind parse_policy_kind(std::string_view text) {
    if (text == "mask") return PolicyKind::mask;
    if (text == "vaccine") return PolicyKind::vaccine;
    if (text == "custom") return PolicyKind::custom;
    throw ParseError("unknown policy kind '" + std::string(text) + "'");
}

// A policy issuance in one region. The lag between issuance and the first
// prediction day covers the incubation period (14 days for masks) or
// incubation plus onset of protection (28 days for vaccines).
struct PolicyEvent {
    std::string region;
    PolicyKind kind = PolicyKind::mask;
    Date issue_date;
    int custom_lag_days = 0;  // used only when kind == custom

    int lag_days() const {
        switch (kind) {
            case PolicyKind::mask: return 14;
            case PolicyKind::vaccine: return 28;
            case PolicyKind::custom: break;
        }
        if (custom_lag_days < 0) throw DomainError("custom policy lag must be nonnegative");
        return custom_lag_days;
    }
};

inline Date prediction_start(const PolicyEvent& event) { return event.issue_date + event.lag_days(); }

// Per-day relative gap (predicted - actual) / actual.
inline std::vector<double> daily_effect_rates(const std::vector<double>& predicted_i,
                                              const std::vector<double>& actual_i) {
    if (predicted_i.size() != actual_i.size()) {
        throw DomainError("daily_effect_rates: length mismatch");
    }
    if (predicted_i.empty()) throw EmptyInputError("daily_effect_rates: empty input");
    std::vector<double> rates(predicted_i.size());
    for (std::size_t day = 0; day < actual_i.size(); ++day) {
        if (!(actual_i[day] > 0.0)) {
            throw DomainError("daily_effect_rates: actual infection proportion not positive on day " +
                              std::to_string(day + 1));
        }
        rates[day] = (predicted_i[day] - actual_i[day]) / actual_i[day];
    }
    return rates;
}

inline double max_effect_rate(const std::vector<double>& daily) {
    if (daily.empty()) throw EmptyInputError("max_effect_rate: empty input");
    return *std::max_element(daily.begin(), daily.end());
}

// Relative gap of the horizon sums: (sum predicted - sum actual) / sum actual.
inline double total_effect_rate(const std::vector<double>& predicted_i,
                                const std::vector<double>& actual_i) {
    if (predicted_i.size() != actual_i.size()) {
        throw DomainError("total_effect_rate: length mismatch");
    }
    if (predicted_i.empty()) throw EmptyInputError("total_effect_rate: empty input");
    const double predicted = std::accumulate(predicted_i.begin(), predicted_i.end(), 0.0);
    const double actual = std::accumulate(actual_i.begin(), actual_i.end(), 0.0);
    if (!(actual > 0.0)) throw DomainError("total_effect_rate: actual sum not positive");
    return (predicted - actual) / actual;
}

// Rank-based inverse normal transform with Blom offsets,
// Phi^-1((rank - 3/8) / (n + 1/4)), average ranks for ties. Strictly
// order-preserving on distinct inputs.
inline std::vector<double> inverse_normal_transform(const std::vector<double>& values) {
    const std::size_t n = values.size();
    if (n < 2) throw InsufficientDataError("inverse_normal_transform: need at least 2 values");
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n);
    std::size_t pos = 0;
    while (pos < n) {
        std::size_t end = pos + 1;
        while (end < n && values[order[end]] == values[order[pos]]) ++end;
        const double avg_rank = 0.5 * static_cast<double>(pos + 1 + end);  // 1-based average
        for (std::size_t k = pos; k < end; ++k) ranks[order[k]] = avg_rank;
        pos = end;
    }
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        out[k] = normal_quantile((ranks[k] - 0.375) / (static_cast<double>(n) + 0.25));
    }
    return out;
}

inline double pearson_correlation(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw DomainError("pearson_correlation: length mismatch");
    if (a.size() < 2) throw InsufficientDataError("pearson_correlation: need at least 2 pairs");
    const double n = static_cast<double>(a.size());
    const double mean_a = std::accumulate(a.begin(), a.end(), 0.0) / n;
    const double mean_b = std::accumulate(b.begin(), b.end(), 0.0) / n;
    double cov = 0.0, var_a = 0.0, var_b = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double da = a[k] - mean_a;
        const double db = b[k] - mean_b;
        cov += da * db;
        var_a += da * da;
        var_b += db * db;
    }
    if (var_a <= 0.0 || var_b <= 0.0) {
        throw UndefinedCorrelationError("pearson_correlation: zero variance");
    }
    return std::clamp(cov / std::sqrt(var_a * var_b), -1.0, 1.0);
}

// Scored gap between counterfactual prediction and reality for one
// (region, policy) pair. The transformed fields stay unset until the
// inverse normal transform is applied over the full cohort.
struct EffectRateRecord {
    std::string region;
    PolicyKind kind = PolicyKind::mask;
    std::vector<double> daily_rates;  // kEffectHorizonDays entries
    double max_rate = 0.0;
    double total_rate = 0.0;
    std::optional<double> transformed_max;
    std::optional<double> transformed_total;
};

inline EffectRateRecord make_effect_record(std::string region, PolicyKind kind,
                                           const std::vector<double>& predicted_i,
                                           const std::vector<double>& actual_i) {
    EffectRateRecord rec;
    rec.region = std::move(region);
    rec.kind = kind;
    rec.daily_rates = daily_effect_rates(predicted_i, actual_i);
    rec.max_rate = max_effect_rate(rec.daily_rates);
    rec.total_rate = total_effect_rate(predicted_i, actual_i);
    return rec;
}

// Applies the inverse normal transform within one (kind, metric) cohort.
// Records of other kinds are left untouched.
inline void apply_transform_cohort(std::vector<EffectRateRecord>& records, PolicyKind kind) {
    std::vector<std::size_t> members;
    for (std::size_t k = 0; k < records.size(); ++k) {
        if (records[k].kind == kind) members.push_back(k);
    }
    if (members.size() < 2) return;  // transform undefined, leave unset
    std::vector<double> max_values, total_values;
    for (std::size_t idx : members) {
        max_values.push_back(records[idx].max_rate);
        total_values.push_back(records[idx].total_rate);
    }
    const std::vector<double> int_max = inverse_normal_transform(max_values);
    const std::vector<double> int_total = inverse_normal_transform(total_values);
    for (std::size_t k = 0; k < members.size(); ++k) {
        records[members[k]].transformed_max = int_max[k];
        records[members[k]].transformed_total = int_total[k];
    }
}

}  // namespace epipolicy
