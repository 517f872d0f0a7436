#pragma once

// Synthetic dataset builder shared by the fixture tool and the test suite.
// Regions follow the state-space SIR generative process with region-specific
// rates; mask and vaccine policies dampen transmission starting at the end
// of their lag windows, recovered counts are reported as a weekly staircase,
// and region factors are drawn from plausible ranges with the policy
// response linked to a few of them.

#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "epipolicy/dates.hpp"
#include "epipolicy/rng.hpp"
#include "epipolicy/sir.hpp"

namespace epipolicy::fixture {

struct FixtureSpec {
    int regions = 14;
    Date start = Date::from_ymd(2020, 3, 1);
    int days = 365;
    std::uint64_t seed = 20200301;
};

struct FixtureData {
    std::string covid_csv;
    std::string population_csv;
    std::string policy_csv;
    std::string factors_csv;
};

inline FixtureData generate(const FixtureSpec& spec) {
    std::ostringstream covid, population, policy, factors;
    covid << "date,region,cum_positive,cum_recovered,cum_deaths\n";
    population << "region,population\n";
    policy << "region,kind,issue_date,validation_anchor\n";
    factors << "region,population_density,hospital_bed,percent_over_65,public_health,"
               "immigration,gdp_per_capita,education,politics_r,population\n";

    for (int r = 0; r < spec.regions; ++r) {
        Rng rng(Rng::derive_stream(spec.seed, static_cast<std::uint64_t>(r)));
        const std::string region = {static_cast<char>('A' + r / 26),
                                    static_cast<char>('A' + r % 26)};
        const std::int64_t pop = 1'000'000 + static_cast<std::int64_t>(rng.uniform() * 7e6);

        const double population_density = 20.0 + 480.0 * rng.uniform();
        const double hospital_bed = 1.5 + 3.5 * rng.uniform();
        const double percent_over_65 = 10.0 + 10.0 * rng.uniform();
        const double public_health = 20.0 + 120.0 * rng.uniform();
        const double immigration = 2.0 + 18.0 * rng.uniform();
        const double gdp_per_capita = 40000.0 + 40000.0 * rng.uniform();
        const double education = 20.0 + 25.0 * rng.uniform();
        const int politics_r = rng.uniform() < 0.5 ? 1 : 0;

        auto clamp01 = [](double v, double lo, double hi) {
            return v < lo ? lo : (v > hi ? hi : v);
        };
        // Policy strengths stay moderate so infections never collapse to the
        // point where active cases fall below smoothing noise.
        const double mask_strength =
            clamp01(0.08 + 0.0012 * public_health - 0.0002 * population_density +
                        0.06 * politics_r + 0.03 * rng.normal(),
                    0.05, 0.25);
        const double vaccine_strength =
            clamp01(0.18 + 0.0012 * public_health - 0.005 * immigration + 0.03 * rng.normal(),
                    0.08, 0.38);

        const double gamma = 0.08 + 0.06 * rng.uniform();
        const double r0 = 1.15 + 0.25 * rng.uniform();
        const double beta = r0 * gamma;

        const Date mask_issue = Date::from_ymd(2020, 7, 1) + (static_cast<int>(rng.uniform() * 10) - 5);
        const Date vaccine_issue =
            Date::from_ymd(2020, 12, 1) + (static_cast<int>(rng.uniform() * 8) - 4);
        const Date anchor = Date::from_ymd(2020, 6, 1) + (static_cast<int>(rng.uniform() * 6) - 3);
        const Date mask_active = mask_issue + 14;
        const Date vaccine_active = vaccine_issue + 28;
        const bool has_mask = r != spec.regions - 1;  // last region never issued a mask policy

        const double i0 = 1e-3 + 1e-3 * rng.uniform();
        Theta state{1.0 - 1.5 * i0, i0, 0.5 * i0};
        constexpr double kappa_gen = 3e6;

        std::int64_t cum_pos = 0, cum_dead = 0, recovered_true = 0;
        std::int64_t reported_recovered = -1;  // -1 = not yet reported
        const int report_phase = r % 7;
        for (int d = 0; d < spec.days; ++d) {
            const Date today = spec.start + d;
            double multiplier = 1.0;
            if (has_mask && today >= mask_active) multiplier *= 1.0 - mask_strength;
            if (today >= vaccine_active) multiplier *= 1.0 - vaccine_strength;
            const SirParams params{beta * multiplier, gamma};
            const Theta mean = rk4_step(state, params, 1.0);
            const auto next =
                rng.dirichlet({kappa_gen * mean.s, kappa_gen * mean.i, kappa_gen * mean.r});
            state = Theta{next[0], next[1], next[2]};

            const double n = static_cast<double>(pop);
            cum_pos = std::max(cum_pos, static_cast<std::int64_t>(std::llround(n * (state.i + state.r))));
            cum_dead = std::max(cum_dead, static_cast<std::int64_t>(std::llround(n * state.r * 0.03)));
            recovered_true =
                std::max(recovered_true, static_cast<std::int64_t>(std::llround(n * state.r * 0.97)));
            if (d % 7 == report_phase && d >= 14) reported_recovered = recovered_true;

            covid << today.to_string() << ',' << region << ',' << cum_pos << ',';
            if (reported_recovered >= 0) covid << reported_recovered;
            covid << ',' << cum_dead << '\n';
        }

        population << region << ',' << pop << '\n';
        if (has_mask) {
            policy << region << ",mask," << mask_issue.to_string() << ','
                   << anchor.to_string() << '\n';
            policy << region << ",vaccine," << vaccine_issue.to_string() << ",\n";
        } else {
            policy << region << ",vaccine," << vaccine_issue.to_string() << ','
                   << anchor.to_string() << '\n';
        }

        std::ostringstream row;
        row.setf(std::ios::fixed);
        row.precision(4);
        row << region << ',' << population_density << ',' << hospital_bed << ','
            << percent_over_65 << ',' << public_health << ',' << immigration << ','
            << gdp_per_capita << ',';
        if (r == spec.regions - 2) {
            row << "";  // missing education value exercises the listwise drop
        } else {
            row << education;
        }
        row << ',' << politics_r << ',' << pop;
        factors << row.str() << '\n';
    }

    return {covid.str(), population.str(), policy.str(), factors.str()};
}

}  // namespace epipolicy::fixture
