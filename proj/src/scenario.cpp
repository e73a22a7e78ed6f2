#include "ivtheta/scenario.hpp"
#include "ivtheta/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>

namespace ivtheta {

GFamily::Kind GFamily::kind_from_string(const std::string& s) {
    if (s == "shifted-invertible") return Kind::ShiftedInvertible;
    if (s == "quadratic-random-coef") return Kind::QuadraticRandomCoef;
    throw ValidationError("unknown g family: " + s);
}

std::string GFamily::kind_to_string(Kind k) {
    return k == Kind::ShiftedInvertible ? "shifted-invertible" : "quadratic-random-coef";
}

void Scenario::validate() const {
    h.validate();
    u1.validate("u1");
    u2.validate("u2");
    for (std::size_t k = 0; k < v.size(); ++k)
        v[k].validate("v[" + std::to_string(k) + "]");

    if (z_levels.empty())
        throw ValidationError("scenario: z_levels must be nonempty");
    auto hits = std::count(z_levels.begin(), z_levels.end(), baseline_z);
    if (hits == 0)
        throw ValidationError("scenario: z_levels must contain baseline_z");
    if (hits > 1)
        throw ValidationError("scenario: baseline_z appears more than once in z_levels");
    if (g.kind == GFamily::Kind::ShiftedInvertible && !(std::abs(g.c) < 1.0))
        throw ValidationError("scenario: shifted-invertible requires |c| < 1");
    if (v.size() != v_dim())
        throw ValidationError("scenario: g family needs " + std::to_string(v_dim()) +
                              " v component(s), got " + std::to_string(v.size()));
    if (!(u1_v_coupling >= -1.0 && u1_v_coupling <= 1.0))
        throw ValidationError("scenario: u1_v_coupling must lie in [-1, 1]");
}

int Scenario::baseline_index() const {
    for (std::size_t i = 0; i < z_levels.size(); ++i)
        if (z_levels[i] == baseline_z) return static_cast<int>(i);
    throw ValidationError("scenario: z_levels must contain baseline_z");
}

double Scenario::g_eval(double z, const double* vv) const {
    if (g.kind == GFamily::Kind::ShiftedInvertible) {
        double t = z + vv[0];
        return t + g.c * std::sin(t);
    }
    return 1.0 + vv[0] * z + vv[1] * z * z;
}

Scenario::NoiseDraw Scenario::draw_noise(Substream& rs) const {
    NoiseDraw d;
    double g1 = rs.next_normal();
    double g2 = rs.next_normal();
    double rho = u1_v_coupling;
    d.v[0] = v[0].from_std_normal(g1);
    d.u1 = u1.from_std_normal(rho * g1 + std::sqrt(1.0 - rho * rho) * g2);
    d.u2 = u2.sample(rs);
    for (std::size_t k = 1; k < v.size(); ++k)
        d.v[k] = v[k].sample(rs);
    return d;
}

namespace {

nlohmann::json dist_to_json(const DistributionSpec& d) {
    nlohmann::json j;
    j["kind"] = DistributionSpec::kind_to_string(d.kind);
    switch (d.kind) {
    case DistributionSpec::Kind::Normal:
        j["mean"] = d.a;
        j["sd"] = d.b;
        break;
    case DistributionSpec::Kind::PointMass:
        j["value"] = d.a;
        break;
    case DistributionSpec::Kind::Uniform:
        j["lower"] = d.a;
        j["upper"] = d.b;
        break;
    }
    return j;
}

DistributionSpec dist_from_json(const nlohmann::json& j) {
    DistributionSpec d;
    d.kind = DistributionSpec::kind_from_string(j.at("kind").get<std::string>());
    switch (d.kind) {
    case DistributionSpec::Kind::Normal:
        d.a = j.at("mean").get<double>();
        d.b = j.at("sd").get<double>();
        break;
    case DistributionSpec::Kind::PointMass:
        d.a = j.at("value").get<double>();
        d.b = 0.0;
        break;
    case DistributionSpec::Kind::Uniform:
        d.a = j.at("lower").get<double>();
        d.b = j.at("upper").get<double>();
        break;
    }
    return d;
}

} // namespace

void to_json(nlohmann::json& j, const Scenario& s) {
    j = nlohmann::json{
        {"id", s.id},
        {"h",
         {{"kind", SmoothFunctionSpec::kind_to_string(s.h.kind)},
          {"scale", s.h.scale},
          {"amplitude", s.h.amplitude}}},
        {"u1", dist_to_json(s.u1)},
        {"u2", dist_to_json(s.u2)},
        {"g", {{"family", GFamily::kind_to_string(s.g.kind)}, {"c", s.g.c}}},
        {"v", nlohmann::json::array()},
        {"z_levels", s.z_levels},
        {"baseline_z", s.baseline_z},
        {"u1_v_coupling", s.u1_v_coupling},
    };
    for (const auto& vd : s.v) j["v"].push_back(dist_to_json(vd));
}

void from_json(const nlohmann::json& j, Scenario& s) {
    s.id = j.value("id", std::string("scenario"));
    const auto& jh = j.at("h");
    s.h.kind = SmoothFunctionSpec::kind_from_string(jh.at("kind").get<std::string>());
    s.h.scale = jh.value("scale", 1.0);
    s.h.amplitude = jh.value("amplitude", 1.0);
    s.u1 = dist_from_json(j.at("u1"));
    s.u2 = dist_from_json(j.at("u2"));
    const auto& jg = j.at("g");
    s.g.kind = GFamily::kind_from_string(jg.at("family").get<std::string>());
    s.g.c = jg.value("c", 0.5);
    s.v.clear();
    for (const auto& jv : j.at("v")) s.v.push_back(dist_from_json(jv));
    s.z_levels = j.at("z_levels").get<std::vector<double>>();
    s.baseline_z = j.value("baseline_z", 0.0);
    s.u1_v_coupling = j.value("u1_v_coupling", 0.0);
}

Scenario scenario_s1() {
    Scenario s;
    s.id = "S1";
    s.h = {SmoothFunctionSpec::Kind::Tanh, 1.0, 1.0};
    s.u1 = DistributionSpec::normal(1.0, 0.5);
    s.u2 = DistributionSpec::normal(0.0, 1.0);
    s.g = {GFamily::Kind::ShiftedInvertible, 0.5};
    s.v = {DistributionSpec::normal(0.0, 1.0)};
    s.z_levels = {-2.0, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0};
    s.baseline_z = 0.0;
    s.u1_v_coupling = 0.0;
    return s;
}

Scenario scenario_null() {
    Scenario s = scenario_s1();
    s.id = "null";
    s.u1 = DistributionSpec::point_mass(0.0);
    return s;
}

Scenario scenario_quadratic() {
    Scenario s = scenario_s1();
    s.id = "quadratic";
    s.g = {GFamily::Kind::QuadraticRandomCoef, 0.0};
    s.v = {DistributionSpec::normal(0.0, 1.0), DistributionSpec::normal(0.0, 0.5)};
    return s;
}

} // namespace ivtheta
