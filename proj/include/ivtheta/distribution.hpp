#pragma once

#include "ivtheta/errors.hpp"
#include "ivtheta/rng.hpp"

#include <cmath>
#include <string>

namespace ivtheta {

// Univariate noise distribution. Sampling goes through from_std_normal so a
// Gaussian copula can couple two components by correlating their underlying
// standard normals.
struct DistributionSpec {
    enum class Kind { Normal, PointMass, Uniform };

    Kind kind = Kind::Normal;
    double a = 0.0; // Normal: mean, PointMass: value, Uniform: lower
    double b = 1.0; // Normal: sd,   Uniform: upper

    double mean() const {
        switch (kind) {
        case Kind::Normal: return a;
        case Kind::PointMass: return a;
        case Kind::Uniform: return 0.5 * (a + b);
        }
        return 0.0;
    }

    bool is_point_mass() const { return kind == Kind::PointMass; }

    // quantile(Phi(g)) for a standard normal g
    double from_std_normal(double g) const {
        switch (kind) {
        case Kind::Normal: return a + b * g;
        case Kind::PointMass: return a;
        case Kind::Uniform: return a + (b - a) * normal_cdf(g);
        }
        return 0.0;
    }

    double sample(Substream& rs) const { return from_std_normal(rs.next_normal()); }

    void validate(const std::string& who) const {
        if (kind == Kind::Normal && !(b >= 0.0))
            throw ValidationError(who + ": normal sd must be >= 0");
        if (kind == Kind::Uniform && !(b > a))
            throw ValidationError(who + ": uniform requires upper > lower");
    }

    static DistributionSpec normal(double mean, double sd) {
        return {Kind::Normal, mean, sd};
    }
    static DistributionSpec point_mass(double v) { return {Kind::PointMass, v, 0.0}; }
    static DistributionSpec uniform(double lo, double hi) {
        return {Kind::Uniform, lo, hi};
    }

    static Kind kind_from_string(const std::string& s) {
        if (s == "normal") return Kind::Normal;
        if (s == "point-mass") return Kind::PointMass;
        if (s == "uniform") return Kind::Uniform;
        throw ValidationError("unknown distribution kind: " + s);
    }
    static std::string kind_to_string(Kind k) {
        switch (k) {
        case Kind::Normal: return "normal";
        case Kind::PointMass: return "point-mass";
        case Kind::Uniform: return "uniform";
        }
        return "?";
    }
};

} // namespace ivtheta
