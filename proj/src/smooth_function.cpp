#include "ivtheta/smooth_function.hpp"
#include "ivtheta/errors.hpp"

#include <array>
#include <cmath>
#include <vector>

namespace ivtheta {

namespace {

// Fixed tabulation for the TabulatedSpline kind: a C^3-flat bump
// b(t) = (1 - (t/4)^2)^4 sampled on 33 uniform knots over [-4, 4],
// interpolated by a natural cubic spline and extended by zero outside.
struct SplineTable {
    static constexpr int kKnots = 33;
    static constexpr double kLo = -4.0, kHi = 4.0;
    std::array<double, kKnots> t{}, y{}, y2{}; // y2: spline second derivatives
    double h;

    SplineTable() {
        h = (kHi - kLo) / (kKnots - 1);
        for (int i = 0; i < kKnots; ++i) {
            t[i] = kLo + h * i;
            double w = 1.0 - (t[i] / 4.0) * (t[i] / 4.0);
            y[i] = (w > 0.0) ? w * w * w * w : 0.0;
        }
        // natural spline: tridiagonal solve for second derivatives
        std::array<double, kKnots> u{};
        y2[0] = u[0] = 0.0;
        for (int i = 1; i < kKnots - 1; ++i) {
            double p = 0.5 * y2[i - 1] + 2.0;
            y2[i] = -0.5 / p;
            double r = 3.0 * (y[i + 1] - 2.0 * y[i] + y[i - 1]) / (h * h);
            u[i] = (r - 0.5 * u[i - 1]) / p;
        }
        y2[kKnots - 1] = 0.0;
        for (int i = kKnots - 2; i >= 0; --i)
            y2[i] = y2[i] * y2[i + 1] + u[i];
    }

    // value and derivatives of the spline in the tabulated variable t
    void eval(double x, double& v, double& d1, double& d2) const {
        if (x <= kLo || x >= kHi) {
            v = d1 = d2 = 0.0;
            return;
        }
        int i = static_cast<int>((x - kLo) / h);
        if (i > kKnots - 2) i = kKnots - 2;
        double a = (t[i + 1] - x) / h;
        double b = (x - t[i]) / h;
        v = a * y[i] + b * y[i + 1] +
            ((a * a * a - a) * y2[i] + (b * b * b - b) * y2[i + 1]) * (h * h) / 6.0;
        d1 = (y[i + 1] - y[i]) / h -
             (3.0 * a * a - 1.0) / 6.0 * h * y2[i] +
             (3.0 * b * b - 1.0) / 6.0 * h * y2[i + 1];
        d2 = a * y2[i] + b * y2[i + 1];
    }
};

const SplineTable& spline_table() {
    static const SplineTable table;
    return table;
}

} // namespace

void SmoothFunctionSpec::validate() const {
    if (!(scale > 0.0))
        throw ValidationError("SmoothFunctionSpec: scale must be > 0");
    if (!(amplitude >= 0.0))
        throw ValidationError("SmoothFunctionSpec: amplitude must be >= 0");
}

double SmoothFunctionSpec::value(double x) const {
    double t = x / scale;
    switch (kind) {
    case Kind::Tanh:
        return amplitude * std::tanh(t);
    case Kind::Logistic:
        return amplitude / (1.0 + std::exp(-t));
    case Kind::GaussianBump:
        return amplitude * std::exp(-0.5 * t * t);
    case Kind::TabulatedSpline: {
        double v, d1, d2;
        spline_table().eval(t, v, d1, d2);
        return amplitude * v;
    }
    }
    return 0.0;
}

double SmoothFunctionSpec::deriv1(double x) const {
    double t = x / scale;
    switch (kind) {
    case Kind::Tanh: {
        double th = std::tanh(t);
        return amplitude / scale * (1.0 - th * th);
    }
    case Kind::Logistic: {
        double s = 1.0 / (1.0 + std::exp(-t));
        return amplitude / scale * s * (1.0 - s);
    }
    case Kind::GaussianBump:
        return -amplitude / scale * t * std::exp(-0.5 * t * t);
    case Kind::TabulatedSpline: {
        double v, d1, d2;
        spline_table().eval(t, v, d1, d2);
        return amplitude / scale * d1;
    }
    }
    return 0.0;
}

double SmoothFunctionSpec::deriv2(double x) const {
    double t = x / scale;
    double s2 = scale * scale;
    switch (kind) {
    case Kind::Tanh: {
        double th = std::tanh(t);
        return -2.0 * amplitude / s2 * th * (1.0 - th * th);
    }
    case Kind::Logistic: {
        double s = 1.0 / (1.0 + std::exp(-t));
        return amplitude / s2 * s * (1.0 - s) * (1.0 - 2.0 * s);
    }
    case Kind::GaussianBump:
        return amplitude / s2 * (t * t - 1.0) * std::exp(-0.5 * t * t);
    case Kind::TabulatedSpline: {
        double v, d1, d2;
        spline_table().eval(t, v, d1, d2);
        return amplitude / s2 * d2;
    }
    }
    return 0.0;
}

SmoothFunctionSpec::Kind SmoothFunctionSpec::kind_from_string(const std::string& s) {
    if (s == "tanh") return Kind::Tanh;
    if (s == "logistic") return Kind::Logistic;
    if (s == "gaussian-bump") return Kind::GaussianBump;
    if (s == "tabulated-spline") return Kind::TabulatedSpline;
    throw ValidationError("unknown smooth function kind: " + s);
}

std::string SmoothFunctionSpec::kind_to_string(Kind k) {
    switch (k) {
    case Kind::Tanh: return "tanh";
    case Kind::Logistic: return "logistic";
    case Kind::GaussianBump: return "gaussian-bump";
    case Kind::TabulatedSpline: return "tabulated-spline";
    }
    return "?";
}

} // namespace ivtheta
