#pragma once

#include "ivtheta/distribution.hpp"
#include "ivtheta/rng.hpp"
#include "ivtheta/smooth_function.hpp"

#include <nlohmann/json_fwd.hpp>
#include <string>
#include <vector>

namespace ivtheta {

// First-stage map x = g(z, v).
struct GFamily {
    enum class Kind { ShiftedInvertible, QuadraticRandomCoef };

    Kind kind = Kind::ShiftedInvertible;
    double c = 0.5; // shift nonlinearity, |c| < 1 keeps s(t) = t + c sin(t) invertible

    static Kind kind_from_string(const std::string& s);
    static std::string kind_to_string(Kind k);
};

// A fully specified structural model: outcome y = u1 * h(x) + u2 with
// first stage x = g(z, v), noise laws for (u1, u2, v), and a finite
// instrument design. u1_v_coupling correlates u1 with v[0] through a
// Gaussian copula (0 = independent).
struct Scenario {
    std::string id = "scenario";
    SmoothFunctionSpec h;
    DistributionSpec u1 = DistributionSpec::normal(1.0, 0.5);
    DistributionSpec u2 = DistributionSpec::normal(0.0, 1.0);
    GFamily g;
    std::vector<DistributionSpec> v = {DistributionSpec::normal(0.0, 1.0)};
    std::vector<double> z_levels = {0.0};
    double baseline_z = 0.0;
    double u1_v_coupling = 0.0;

    void validate() const; // throws ValidationError naming the violated invariant
    int baseline_index() const;
    std::size_t v_dim() const { return g.kind == GFamily::Kind::ShiftedInvertible ? 1 : 2; }

    double g_eval(double z, const double* vv) const;
    double f_eval(double x, double uu1, double uu2) const { return uu1 * h.value(x) + uu2; }
    double dfdx(double x, double uu1) const { return uu1 * h.deriv1(x); }

    struct NoiseDraw {
        double u1 = 0.0, u2 = 0.0;
        double v[2] = {0.0, 0.0};
    };
    NoiseDraw draw_noise(Substream& rs) const;
};

void to_json(nlohmann::json& j, const Scenario& s);
void from_json(const nlohmann::json& j, Scenario& s);

// Reference scenario used across the test experiments: tanh link,
// u1 ~ N(1, 0.5), u2 ~ N(0, 1), shifted-invertible first stage with c = 0.5,
// v ~ N(0, 1), nine instrument levels -2..2 step 0.5, baseline 0.
Scenario scenario_s1();

// Same geometry with u1 a point mass at 0, so the true effect is zero.
Scenario scenario_null();

// Quadratic-random-coefficient first stage: x = 1 + v1 z + v2 z^2.
Scenario scenario_quadratic();

} // namespace ivtheta
