#pragma once

#include "ivtheta/sample_set.hpp"
#include "ivtheta/scenario.hpp"

#include <cstdint>
#include <functional>

namespace ivtheta {

// One subject's realized noise together with its potential-outcome curve
// x -> y_of(x) and its analytic derivative x -> y1_of(x).
struct PotentialOutcomeDraw {
    Scenario::NoiseDraw u;
    std::function<double(double)> y_of;
    std::function<double(double)> y1_of;
};

PotentialOutcomeDraw make_potential_outcome(const Scenario& scenario, Substream& rs);

// Simulates n_per_level records for every instrument level. Each record r of
// level i draws from substream (seed, i, r), so output is independent of
// generation order and bit-identical for identical inputs.
SampleSet draw_sample_set(const Scenario& scenario, int n_per_level, std::uint64_t seed);

// theta(x) = E(u1) * h'(x), exact for the shipped structural family.
double true_theta(const Scenario& scenario, double x);

struct MonteCarloEstimate {
    double estimate = 0.0;
    double stderr_ = 0.0;
};

// Brute-force theta oracle: averages the central finite difference of the
// potential-outcome curve over n fresh noise draws. Independent of the
// integral-equation path.
MonteCarloEstimate oracle_theta_mc(const Scenario& scenario, double x, long n,
                                   std::uint64_t seed, double fd_step = 1e-4);

struct Condition5Result {
    double correlation = 0.0;
    double stderr_ = 0.0;
    bool degenerate = false;
    std::string degenerate_kind; // "degenerate-indicator" or "degenerate-constant"
};

// Sample correlation between I(g(z, V) <= x) and df/dx(x, U).
Condition5Result check_condition5(const Scenario& scenario, double x, double z, long n,
                                  std::uint64_t seed);

} // namespace ivtheta
