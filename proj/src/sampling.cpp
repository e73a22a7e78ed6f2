#include "ivtheta/sampling.hpp"

#include <algorithm>
#include <cmath>

namespace ivtheta {

PotentialOutcomeDraw make_potential_outcome(const Scenario& scenario, Substream& rs) {
    PotentialOutcomeDraw d;
    d.u = scenario.draw_noise(rs);
    double u1 = d.u.u1, u2 = d.u.u2;
    d.y_of = [&scenario, u1, u2](double x) { return scenario.f_eval(x, u1, u2); };
    d.y1_of = [&scenario, u1](double x) { return scenario.dfdx(x, u1); };
    return d;
}

SampleSet draw_sample_set(const Scenario& scenario, int n_per_level, std::uint64_t seed) {
    scenario.validate();
    if (n_per_level < 1)
        throw ValidationError("draw_sample_set: n_per_level must be >= 1");

    SampleSet ss;
    ss.scenario_id = scenario.id;
    ss.seed = seed;
    ss.n_per_level = n_per_level;
    ss.z_levels = scenario.z_levels;
    ss.groups.resize(scenario.z_levels.size());
    for (std::size_t i = 0; i < scenario.z_levels.size(); ++i) {
        double z = scenario.z_levels[i];
        auto& g = ss.groups[i];
        g.resize(static_cast<std::size_t>(n_per_level));
        for (int r = 0; r < n_per_level; ++r) {
            Substream rs(seed, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(r));
            auto nd = scenario.draw_noise(rs);
            double x = scenario.g_eval(z, nd.v);
            g[static_cast<std::size_t>(r)] = {x, scenario.f_eval(x, nd.u1, nd.u2)};
        }
    }
    return ss;
}

double true_theta(const Scenario& scenario, double x) {
    return scenario.u1.mean() * scenario.h.deriv1(x);
}

MonteCarloEstimate oracle_theta_mc(const Scenario& scenario, double x, long n,
                                   std::uint64_t seed, double fd_step) {
    if (n < 1) throw ValidationError("oracle_theta_mc: n must be >= 1");
    if (!(fd_step > 0.0)) throw ValidationError("oracle_theta_mc: fd_step must be > 0");

    const std::uint64_t sid = stream_id("oracle_theta_mc");
    double sum = 0.0, sumsq = 0.0;
    for (long i = 0; i < n; ++i) {
        Substream rs(seed, sid, static_cast<std::uint64_t>(i));
        auto nd = scenario.draw_noise(rs);
        double d = (scenario.f_eval(x + fd_step, nd.u1, nd.u2) -
                    scenario.f_eval(x - fd_step, nd.u1, nd.u2)) /
                   (2.0 * fd_step);
        sum += d;
        sumsq += d * d;
    }
    double mean = sum / static_cast<double>(n);
    double var = std::max(0.0, (sumsq - static_cast<double>(n) * mean * mean) /
                                   std::max<double>(1.0, static_cast<double>(n - 1)));
    return {mean, std::sqrt(var / static_cast<double>(n))};
}

Condition5Result check_condition5(const Scenario& scenario, double x, double z, long n,
                                  std::uint64_t seed) {
    if (std::find(scenario.z_levels.begin(), scenario.z_levels.end(), z) ==
        scenario.z_levels.end())
        throw ValidationError("check_condition5: z is not one of the scenario z_levels");
    if (n < 4) throw ValidationError("check_condition5: n too small");

    const std::uint64_t sid = stream_id("check_condition5");
    double sa = 0.0, sb = 0.0, saa = 0.0, sbb = 0.0, sab = 0.0;
    double amin = 1e300, amax = -1e300, bmin = 1e300, bmax = -1e300;
    for (long i = 0; i < n; ++i) {
        Substream rs(seed, sid, static_cast<std::uint64_t>(i));
        auto nd = scenario.draw_noise(rs);
        double a = scenario.g_eval(z, nd.v) <= x ? 1.0 : 0.0;
        double b = scenario.dfdx(x, nd.u1);
        sa += a;
        sb += b;
        saa += a * a;
        sbb += b * b;
        sab += a * b;
        amin = std::min(amin, a);
        amax = std::max(amax, a);
        bmin = std::min(bmin, b);
        bmax = std::max(bmax, b);
    }
    double nn = static_cast<double>(n);
    double va = saa / nn - (sa / nn) * (sa / nn);
    double vb = sbb / nn - (sb / nn) * (sb / nn);
    double cab = sab / nn - (sa / nn) * (sb / nn);

    Condition5Result res;
    if (amin == amax || va <= 0.0) {
        res.degenerate = true;
        res.degenerate_kind = "degenerate-indicator";
        return res;
    }
    if (bmin == bmax || vb <= 0.0) {
        res.degenerate = true;
        res.degenerate_kind = "degenerate-constant";
        return res;
    }
    res.correlation = cab / std::sqrt(va * vb);
    res.stderr_ = (1.0 - res.correlation * res.correlation) / std::sqrt(nn - 3.0);
    return res;
}

} // namespace ivtheta
