#pragma once

#include <string>

namespace ivtheta {

// Smooth bounded link h(x) with analytic first and second derivatives.
// All kinds satisfy sup|h| <= amplitude and have |h'|, |h''| dominated by a
// bounded integrable envelope (tails vanish far from the origin).
struct SmoothFunctionSpec {
    enum class Kind { Tanh, Logistic, GaussianBump, TabulatedSpline };

    Kind kind = Kind::Tanh;
    double scale = 1.0;     // horizontal stretch, > 0
    double amplitude = 1.0;

    double value(double x) const;
    double deriv1(double x) const;
    double deriv2(double x) const;

    void validate() const; // throws ValidationError

    static Kind kind_from_string(const std::string& s);
    static std::string kind_to_string(Kind k);
};

} // namespace ivtheta
