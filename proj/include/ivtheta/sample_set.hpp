#pragma once

#include "ivtheta/errors.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ivtheta {

struct Obs {
    double x = 0.0;
    double y = 0.0;
};

// Observed (z, x, y) triples grouped by instrument level. groups[i] holds the
// records for z_levels[i]. n_per_level is 0 for unbalanced user-supplied data.
struct SampleSet {
    std::string scenario_id;
    std::uint64_t seed = 0;
    int n_per_level = 0;
    std::vector<double> z_levels;
    std::vector<std::vector<Obs>> groups;

    int level_index(double z) const {
        for (std::size_t i = 0; i < z_levels.size(); ++i)
            if (z_levels[i] == z) return static_cast<int>(i);
        std::string msg = "unknown instrument level " + std::to_string(z) + "; available:";
        for (double lv : z_levels) msg += " " + std::to_string(lv);
        throw DataError(msg);
    }

    const std::vector<Obs>& group(double z) const {
        return groups[static_cast<std::size_t>(level_index(z))];
    }
};

} // namespace ivtheta
