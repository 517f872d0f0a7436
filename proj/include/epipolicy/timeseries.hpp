#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "epipolicy/csv.hpp"
#include "epipolicy/dates.hpp"
#include "epipolicy/errors.hpp"

namespace epipolicy {

inline const std::vector<std::string> kCovidCsvHeader = {"date", "region", "cum_positive",
                                                         "cum_recovered", "cum_deaths"};
inline const std::vector<std::string> kPopulationCsvHeader = {"region", "population"};

struct RawRow {
    Date date;
    std::int64_t cum_positive = 0;
    std::optional<std::int64_t> cum_recovered;  // empty CSV cell = missing
    std::int64_t cum_deaths = 0;

    bool operator==(const RawRow&) const = default;
};

// Raw cumulative counts for one region. Invariants: dates strictly
// increasing, cum_positive and cum_deaths nondecreasing, population > 0.
struct RawSeries {
    std::string region;
    std::vector<RawRow> rows;
    std::int64_t population = 0;

    bool operator==(const RawSeries&) const = default;
};

struct CompartmentRow {
    Date date;
    double s = 1.0;
    double i = 0.0;
    double r = 0.0;
};

// Daily SIR proportions for one region; every row sums to 1 within 1e-12.
struct CompartmentSeries {
    std::string region;
    std::vector<CompartmentRow> rows;

    std::vector<double> infected() const {
        std::vector<double> out;
        out.reserve(rows.size());
        for (const auto& row : rows) out.push_back(row.i);
        return out;
    }
};

inline std::map<std::string, std::int64_t> load_population_csv(const std::string& path) {
    const CsvTable table = read_csv(path);
    expect_header(table, kPopulationCsvHeader);
    std::map<std::string, std::int64_t> populations;
    for (std::size_t k = 0; k < table.rows.size(); ++k) {
        const std::string where = table.name + ":" + std::to_string(table.lines[k]);
        const std::int64_t pop = parse_count(table.rows[k][1], where);
        if (pop <= 0) throw RangeError(where + ": population must be positive");
        if (!populations.emplace(table.rows[k][0], pop).second) {
            throw DataIntegrityError(where + ": duplicate region '" + table.rows[k][0] + "'");
        }
    }
    return populations;
}

// Parses the documented covid CSV schema into one RawSeries per region,
// rows sorted by date. Regions come out in lexicographic order so every
// downstream artifact is independent of input row order.
inline std::vector<RawSeries> ingest_csv_table(
    const CsvTable& table, const std::map<std::string, std::int64_t>& population_table) {
    expect_header(table, kCovidCsvHeader);

    struct Tagged {
        RawRow row;
        std::size_t line;
    };
    std::map<std::string, std::vector<Tagged>> by_region;
    for (std::size_t k = 0; k < table.rows.size(); ++k) {
        const auto& cells = table.rows[k];
        const std::string where = table.name + ":" + std::to_string(table.lines[k]);
        RawRow row;
        try {
            row.date = Date::parse(cells[0]);
        } catch (const ParseError& e) {
            throw ParseError(where + ": " + e.what());
        }
        row.cum_positive = parse_count(cells[2], where + " (cum_positive)");
        if (!cells[3].empty()) row.cum_recovered = parse_count(cells[3], where + " (cum_recovered)");
        row.cum_deaths = parse_count(cells[4], where + " (cum_deaths)");
        by_region[cells[1]].push_back({row, table.lines[k]});
    }

    std::vector<RawSeries> out;
    out.reserve(by_region.size());
    for (auto& [region, tagged] : by_region) {
        const auto pop = population_table.find(region);
        if (pop == population_table.end()) {
            throw LookupError(table.name + ": region '" + region + "' missing from population table");
        }
        std::stable_sort(tagged.begin(), tagged.end(),
                         [](const Tagged& a, const Tagged& b) { return a.row.date < b.row.date; });
        RawSeries series;
        series.region = region;
        series.population = pop->second;
        for (std::size_t k = 0; k < tagged.size(); ++k) {
            const auto& [row, line] = tagged[k];
            const std::string where = table.name + ":" + std::to_string(line);
            if (k > 0) {
                const RawRow& prev = series.rows.back();
                if (row.date == prev.date) {
                    throw DataIntegrityError(where + ": duplicate date " + row.date.to_string() +
                                             " for region '" + region + "'");
                }
                if (row.cum_positive < prev.cum_positive) {
                    throw DataIntegrityError(where + " (cum_positive): decreasing cumulative count");
                }
                if (row.cum_deaths < prev.cum_deaths) {
                    throw DataIntegrityError(where + " (cum_deaths): decreasing cumulative count");
                }
            }
            series.rows.push_back(row);
        }
        out.push_back(std::move(series));
    }
    return out;
}

inline std::vector<RawSeries> ingest_csv(const std::string& path,
                                         const std::map<std::string, std::int64_t>& populations) {
    return ingest_csv_table(read_csv(path), populations);
}

// Inverse of ingest for the documented schema; rows ordered by region, date.
inline std::string emit_csv(const std::vector<RawSeries>& series_list) {
    std::ostringstream out;
    out << "date,region,cum_positive,cum_recovered,cum_deaths\n";
    for (const auto& series : series_list) {
        for (const auto& row : series.rows) {
            out << row.date.to_string() << ',' << series.region << ',' << row.cum_positive << ',';
            if (row.cum_recovered) out << *row.cum_recovered;
            out << ',' << row.cum_deaths << '\n';
        }
    }
    return out.str();
}

// Converts raw counts to SIR proportions. The removed compartment is the
// smoothed cumulative recovered count plus cumulative deaths. Smoothing can
// overshoot cum_positive slightly; overshoot within 1e-6 of proportion is
// clamped by capping removed at cum_positive, anything larger is an error.
inline CompartmentSeries to_compartments(const RawSeries& raw,
                                         const std::vector<double>& smoothed_recovered,
                                         double clamp_tol = 1e-6) {
    if (smoothed_recovered.size() != raw.rows.size()) {
        throw InsufficientDataError("to_compartments: smoothed series not aligned with raw rows");
    }
    if (raw.population <= 0) throw RangeError("to_compartments: population must be positive");

    CompartmentSeries out;
    out.region = raw.region;
    out.rows.reserve(raw.rows.size());
    const double n = static_cast<double>(raw.population);
    for (std::size_t k = 0; k < raw.rows.size(); ++k) {
        const RawRow& row = raw.rows[k];
        const std::string at = raw.region + " " + row.date.to_string();
        if (smoothed_recovered[k] < 0.0) {
            throw RangeError("to_compartments: negative smoothed recovered at " + at);
        }
        if (static_cast<double>(row.cum_positive) > n) {
            throw RangeError("to_compartments: cum_positive exceeds population at " + at);
        }
        double removed = smoothed_recovered[k] + static_cast<double>(row.cum_deaths);
        if (removed > n) {
            throw RangeError("to_compartments: removed count exceeds population at " + at);
        }
        double infected = (static_cast<double>(row.cum_positive) - removed) / n;
        if (infected < -clamp_tol) {
            throw InconsistencyError("to_compartments: removed exceeds cum_positive at " + at);
        }
        if (infected < 0.0) {
            removed = static_cast<double>(row.cum_positive);
            infected = 0.0;
        }
        CompartmentRow comp;
        comp.date = row.date;
        comp.i = infected;
        comp.r = removed / n;
        comp.s = 1.0 - comp.i - comp.r;
        out.rows.push_back(comp);
    }
    return out;
}

// Contiguous daily slice [start, start + length). The window must be fully
// covered with no date gaps; the error lists what is missing.
inline CompartmentSeries window(const CompartmentSeries& series, Date start, int length) {
    if (length <= 0) throw CoverageError("window: length must be positive");
    std::vector<Date> missing;
    CompartmentSeries out;
    out.region = series.region;
    out.rows.reserve(static_cast<std::size_t>(length));
    std::size_t idx = 0;
    while (idx < series.rows.size() && series.rows[idx].date < start) ++idx;
    for (int d = 0; d < length; ++d) {
        const Date want = start + d;
        if (idx < series.rows.size() && series.rows[idx].date == want) {
            out.rows.push_back(series.rows[idx]);
            ++idx;
        } else {
            missing.push_back(want);
        }
    }
    if (!missing.empty()) {
        std::string msg = "window: region '" + series.region + "' missing " +
                          std::to_string(missing.size()) + " of " + std::to_string(length) +
                          " days:";
        const std::size_t shown = std::min<std::size_t>(missing.size(), 8);
        for (std::size_t k = 0; k < shown; ++k) msg += " " + missing[k].to_string();
        if (missing.size() > shown) msg += " ...";
        throw CoverageError(msg);
    }
    return out;
}

}  // namespace epipolicy
