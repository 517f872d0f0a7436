// Regenerates the bundled synthetic dataset under data/fixture/.
// Usage: epipolicy-make-fixture [out_dir]

#include <iostream>
#include <string>

#include "epipolicy/csv.hpp"
#include "fixture_gen.hpp"

int main(int argc, char** argv) {
    const std::string out_dir = argc > 1 ? argv[1] : "data/fixture";
    epipolicy::fixture::FixtureSpec spec;
    const auto data = epipolicy::fixture::generate(spec);
    epipolicy::write_text_file(out_dir + "/covid.csv", data.covid_csv);
    epipolicy::write_text_file(out_dir + "/population.csv", data.population_csv);
    epipolicy::write_text_file(out_dir + "/policy.csv", data.policy_csv);
    epipolicy::write_text_file(out_dir + "/factors.csv", data.factors_csv);
    std::cout << "wrote fixture dataset (" << spec.regions << " regions, " << spec.days
              << " days) to " << out_dir << "\n";
    return 0;
}
