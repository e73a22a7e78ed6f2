#pragma once

#include "ivtheta/errors.hpp"

#include <algorithm>
#include <vector>

namespace ivtheta {

// Right-continuous empirical CDF: F(x) = #{X_i <= x} / n.
class EmpiricalCdf {
public:
    explicit EmpiricalCdf(std::vector<double> samples) : sorted_(std::move(samples)) {
        if (sorted_.empty()) throw DataError("EmpiricalCdf: empty sample list");
        std::sort(sorted_.begin(), sorted_.end());
    }

    double operator()(double x) const {
        auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
        return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
    }

    std::size_t size() const { return sorted_.size(); }
    double min() const { return sorted_.front(); }
    double max() const { return sorted_.back(); }
    const std::vector<double>& sorted() const { return sorted_; }

private:
    std::vector<double> sorted_;
};

} // namespace ivtheta
