#include "ivtheta/estimation.hpp"
#include "ivtheta/ecdf.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace ivtheta {

MuEstimate estimate_mu(const SampleSet& sample_set, double z) {
    const auto& g = sample_set.group(z);
    if (g.empty()) throw DataError("estimate_mu: empty group");
    double sum = 0.0;
    for (const auto& o : g) sum += o.y;
    double n = static_cast<double>(g.size());
    double mean = sum / n;
    double ss = 0.0;
    for (const auto& o : g) ss += (o.y - mean) * (o.y - mean);
    double se = g.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
    return {z, mean, se, static_cast<long>(g.size())};
}

KernelMatrix build_kernel(const SampleSet& sample_set, const std::vector<double>& x_grid,
                          double baseline_z) {
    if (x_grid.size() < 2) throw DataError("build_kernel: x_grid needs >= 2 points");
    for (std::size_t j = 1; j < x_grid.size(); ++j)
        if (!(x_grid[j] > x_grid[j - 1]))
            throw DataError("build_kernel: x_grid must be strictly increasing");

    int bi;
    try {
        bi = sample_set.level_index(baseline_z);
    } catch (const DataError&) {
        throw DataError("build_kernel: baseline level missing from sample set");
    }

    std::vector<double> base_x;
    for (const auto& o : sample_set.groups[static_cast<std::size_t>(bi)]) base_x.push_back(o.x);
    EmpiricalCdf f0(std::move(base_x));

    KernelMatrix km;
    km.x_grid = x_grid;
    km.baseline_z = baseline_z;
    const auto J = static_cast<Eigen::Index>(x_grid.size());
    std::vector<Eigen::VectorXd> rows;
    for (std::size_t i = 0; i < sample_set.z_levels.size(); ++i) {
        if (static_cast<int>(i) == bi) continue;
        std::vector<double> xs;
        for (const auto& o : sample_set.groups[i]) xs.push_back(o.x);
        EmpiricalCdf fz(std::move(xs));
        Eigen::VectorXd row(J);
        for (Eigen::Index j = 0; j < J; ++j)
            row[j] = f0(x_grid[static_cast<std::size_t>(j)]) -
                     fz(x_grid[static_cast<std::size_t>(j)]);
        km.z_levels.push_back(sample_set.z_levels[i]);
        rows.push_back(std::move(row));
    }
    km.entries.resize(static_cast<Eigen::Index>(rows.size()), J);
    for (std::size_t i = 0; i < rows.size(); ++i)
        km.entries.row(static_cast<Eigen::Index>(i)) = rows[i];
    return km;
}

RhsVector build_rhs(const SampleSet& sample_set, double baseline_z) {
    int bi;
    try {
        bi = sample_set.level_index(baseline_z);
    } catch (const DataError&) {
        throw DataError("build_rhs: baseline level missing from sample set");
    }
    MuEstimate mu0 = estimate_mu(sample_set, baseline_z);

    std::vector<double> vals, noise;
    for (std::size_t i = 0; i < sample_set.z_levels.size(); ++i) {
        if (static_cast<int>(i) == bi) continue;
        MuEstimate mz = estimate_mu(sample_set, sample_set.z_levels[i]);
        vals.push_back(mz.mean - mu0.mean);
        noise.push_back(std::sqrt(mz.stderr_ * mz.stderr_ + mu0.stderr_ * mu0.stderr_));
    }
    RhsVector rhs;
    rhs.values = Eigen::Map<Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
    rhs.noise_scale =
        Eigen::Map<Eigen::VectorXd>(noise.data(), static_cast<Eigen::Index>(noise.size()));
    return rhs;
}

const GaussHermite& gauss_hermite(int n) {
    static std::map<int, GaussHermite> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    // Golub-Welsch: eigen-decomposition of the Jacobi matrix for Hermite
    // polynomials, off-diagonal sqrt(k/2).
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        double b = std::sqrt(static_cast<double>(k) / 2.0);
        jacobi(k, k - 1) = b;
        jacobi(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
    GaussHermite gh;
    gh.nodes = es.eigenvalues();
    gh.weights.resize(n);
    double sqrt_pi = std::sqrt(std::numbers::pi);
    for (int k = 0; k < n; ++k) {
        double v0 = es.eigenvectors()(0, k);
        gh.weights[k] = sqrt_pi * v0 * v0;
    }
    return cache.emplace(n, std::move(gh)).first->second;
}

namespace {
constexpr int kGhNodes = 41;
constexpr std::uint64_t kMuStream = 0; // shared by smoothed_mu and its reference
} // namespace

double smoothed_mu(const Scenario& scenario, double z, double sigma, long n,
                   std::uint64_t seed) {
    if (!(sigma > 0.0)) throw ValidationError("smoothed_mu: sigma must be > 0");
    if (n < 1) throw ValidationError("smoothed_mu: n must be >= 1");

    const auto& gh = gauss_hermite(kGhNodes);
    const double inv_sqrt_pi = 1.0 / std::sqrt(std::numbers::pi);
    const double sq2s = std::numbers::sqrt2 * sigma;
    const std::uint64_t sid = stream_id("smoothed_mu") + kMuStream;

    double acc = 0.0;
    for (long i = 0; i < n; ++i) {
        Substream rs(seed, sid, static_cast<std::uint64_t>(i));
        auto nd = scenario.draw_noise(rs);
        double xz = scenario.g_eval(z, nd.v);
        // integral phi_sigma(x - xz) f(x, u) dx with x = xz + sqrt(2) sigma t
        double q = 0.0;
        for (int k = 0; k < kGhNodes; ++k)
            q += gh.weights[k] * scenario.f_eval(xz + sq2s * gh.nodes[k], nd.u1, nd.u2);
        acc += q * inv_sqrt_pi;
    }
    return acc / static_cast<double>(n);
}

double smoothed_mu_reference(const Scenario& scenario, double z, long n,
                             std::uint64_t seed) {
    if (n < 1) throw ValidationError("smoothed_mu_reference: n must be >= 1");
    const std::uint64_t sid = stream_id("smoothed_mu") + kMuStream;
    double acc = 0.0;
    for (long i = 0; i < n; ++i) {
        Substream rs(seed, sid, static_cast<std::uint64_t>(i));
        auto nd = scenario.draw_noise(rs);
        double xz = scenario.g_eval(z, nd.v);
        acc += scenario.f_eval(xz, nd.u1, nd.u2);
    }
    return acc / static_cast<double>(n);
}

} // namespace ivtheta
