#include "ivtheta/io.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace ivtheta {

namespace {

using nlohmann::json;

json meta_json(const FileMeta& meta) {
    json j;
    j["seed"] = meta.seed;
    j["config_hash"] = meta.config_hash;
    if (!meta.scenario_id.empty()) j["scenario_id"] = meta.scenario_id;
    return j;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open for writing: " + path.string());
    return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open for reading: " + path.string());
    return in;
}

[[noreturn]] void parse_fail(const std::filesystem::path& path, long line,
                             const std::string& what) {
    throw DataError(path.string() + ":" + std::to_string(line) + ": " + what);
}

double parse_double(const std::filesystem::path& path, long line, const std::string& tok) {
    try {
        std::size_t pos = 0;
        double v = std::stod(tok, &pos);
        if (pos != tok.size()) parse_fail(path, line, "trailing characters in number: " + tok);
        return v;
    } catch (const std::invalid_argument&) {
        parse_fail(path, line, "not a number: " + tok);
    } catch (const std::out_of_range&) {
        parse_fail(path, line, "number out of range: " + tok);
    }
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(line);
    while (std::getline(is, cur, ',')) out.push_back(cur);
    return out;
}

json read_header_comment(const std::filesystem::path& path, const std::string& line) {
    try {
        return json::parse(line.substr(2));
    } catch (const json::exception& e) {
        throw DataError(path.string() + ":1: bad JSON header comment: " + e.what());
    }
}

} // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_samples_csv(const std::filesystem::path& path, const SampleSet& ss,
                       const FileMeta& meta) {
    auto out = open_out(path);
    json m = meta_json(meta);
    m["n_per_level"] = ss.n_per_level;
    out << "# " << m.dump() << "\n";
    out << "z,x,y\n";
    for (std::size_t i = 0; i < ss.z_levels.size(); ++i) {
        std::string z = format_double(ss.z_levels[i]);
        for (const auto& o : ss.groups[i])
            out << z << ',' << format_double(o.x) << ',' << format_double(o.y) << '\n';
    }
}

SampleSet read_samples_csv(const std::filesystem::path& path) {
    auto in = open_in(path);
    SampleSet ss;
    std::string line;
    long lineno = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (line.rfind("# {", 0) == 0) {
                json m = read_header_comment(path, line);
                ss.seed = m.value("seed", 0ull);
                ss.scenario_id = m.value("scenario_id", std::string());
            }
            continue;
        }
        if (!header_seen) {
            if (line != "z,x,y")
                parse_fail(path, lineno, "expected header 'z,x,y', got '" + line + "'");
            header_seen = true;
            continue;
        }
        auto toks = split_csv(line);
        if (toks.size() != 3) parse_fail(path, lineno, "expected 3 fields");
        double z = parse_double(path, lineno, toks[0]);
        double x = parse_double(path, lineno, toks[1]);
        double y = parse_double(path, lineno, toks[2]);
        std::size_t gi = 0;
        for (; gi < ss.z_levels.size(); ++gi)
            if (ss.z_levels[gi] == z) break;
        if (gi == ss.z_levels.size()) {
            ss.z_levels.push_back(z);
            ss.groups.emplace_back();
        }
        ss.groups[gi].push_back({x, y});
    }
    if (!header_seen) throw DataError(path.string() + ": missing 'z,x,y' header");
    if (ss.groups.empty()) throw DataError(path.string() + ": no data rows");
    // balanced data keeps the generated-set invariant, user data may not
    std::size_t n0 = ss.groups.front().size();
    bool balanced = true;
    for (const auto& g : ss.groups)
        if (g.size() != n0) balanced = false;
    ss.n_per_level = balanced ? static_cast<int>(n0) : 0;
    return ss;
}

void write_kernel_csv(const std::filesystem::path& path, const KernelMatrix& km,
                      const QuadratureGrid& grid, const FileMeta& meta) {
    auto out = open_out(path);
    json m = meta_json(meta);
    m["baseline_z"] = km.baseline_z;
    m["z_levels"] = km.z_levels;
    m["x_grid"] = km.x_grid;
    m["weights"] = grid.weights;
    out << "# " << m.dump() << "\n";
    for (Eigen::Index i = 0; i < km.entries.rows(); ++i) {
        for (Eigen::Index j = 0; j < km.entries.cols(); ++j) {
            if (j) out << ',';
            out << format_double(km.entries(i, j));
        }
        out << '\n';
    }
}

std::pair<KernelMatrix, QuadratureGrid> read_kernel_csv(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("# {", 0) != 0)
        throw DataError(path.string() + ":1: missing JSON header comment");
    json m = read_header_comment(path, line);

    KernelMatrix km;
    QuadratureGrid grid;
    try {
        km.baseline_z = m.at("baseline_z").get<double>();
        km.z_levels = m.at("z_levels").get<std::vector<double>>();
        km.x_grid = m.at("x_grid").get<std::vector<double>>();
        grid.weights = m.at("weights").get<std::vector<double>>();
    } catch (const json::exception& e) {
        throw DataError(path.string() + ":1: header missing field: " + std::string(e.what()));
    }
    grid.x_grid = km.x_grid;

    std::vector<std::vector<double>> rows;
    long lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto toks = split_csv(line);
        if (toks.size() != km.x_grid.size())
            parse_fail(path, lineno, "expected " + std::to_string(km.x_grid.size()) + " fields");
        std::vector<double> row;
        row.reserve(toks.size());
        for (const auto& t : toks) row.push_back(parse_double(path, lineno, t));
        rows.push_back(std::move(row));
    }
    if (rows.size() != km.z_levels.size())
        throw DataError(path.string() + ": row count does not match z_levels in header");
    km.entries.resize(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(km.x_grid.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            km.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return {std::move(km), std::move(grid)};
}

void write_rhs_csv(const std::filesystem::path& path, const std::vector<double>& z_levels,
                   const RhsVector& rhs, const FileMeta& meta) {
    auto out = open_out(path);
    out << "# " << meta_json(meta).dump() << "\n";
    out << "z,value,noise_scale\n";
    for (Eigen::Index i = 0; i < rhs.values.size(); ++i)
        out << format_double(z_levels[static_cast<std::size_t>(i)]) << ','
            << format_double(rhs.values[i]) << ',' << format_double(rhs.noise_scale[i])
            << '\n';
}

std::pair<std::vector<double>, RhsVector> read_rhs_csv(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::string line;
    long lineno = 0;
    std::vector<double> zs, vals, noise;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            if (line != "z,value,noise_scale")
                parse_fail(path, lineno, "expected header 'z,value,noise_scale'");
            header_seen = true;
            continue;
        }
        auto toks = split_csv(line);
        if (toks.size() != 3) parse_fail(path, lineno, "expected 3 fields");
        zs.push_back(parse_double(path, lineno, toks[0]));
        vals.push_back(parse_double(path, lineno, toks[1]));
        noise.push_back(parse_double(path, lineno, toks[2]));
    }
    if (vals.empty()) throw DataError(path.string() + ": no data rows");
    RhsVector rhs;
    rhs.values = Eigen::Map<Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
    rhs.noise_scale =
        Eigen::Map<Eigen::VectorXd>(noise.data(), static_cast<Eigen::Index>(noise.size()));
    return {std::move(zs), std::move(rhs)};
}

void write_theta_csv(const std::filesystem::path& path, const QuadratureGrid& grid,
                     const Eigen::VectorXd& theta, const FileMeta& meta) {
    auto out = open_out(path);
    out << "# " << meta_json(meta).dump() << "\n";
    out << "x,theta_hat\n";
    for (Eigen::Index j = 0; j < theta.size(); ++j)
        out << format_double(grid.x_grid[static_cast<std::size_t>(j)]) << ','
            << format_double(theta[j]) << '\n';
}

std::pair<std::vector<double>, Eigen::VectorXd> read_theta_csv(
    const std::filesystem::path& path) {
    auto in = open_in(path);
    std::string line;
    long lineno = 0;
    std::vector<double> xs, th;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            if (line != "x,theta_hat")
                parse_fail(path, lineno, "expected header 'x,theta_hat'");
            header_seen = true;
            continue;
        }
        auto toks = split_csv(line);
        if (toks.size() != 2) parse_fail(path, lineno, "expected 2 fields");
        xs.push_back(parse_double(path, lineno, toks[0]));
        th.push_back(parse_double(path, lineno, toks[1]));
    }
    if (xs.empty()) throw DataError(path.string() + ": no data rows");
    Eigen::VectorXd theta =
        Eigen::Map<Eigen::VectorXd>(th.data(), static_cast<Eigen::Index>(th.size()));
    return {std::move(xs), std::move(theta)};
}

void write_solution_json(const std::filesystem::path& path, const RegularizedSolution& sol,
                         const FileMeta& meta) {
    json j;
    j["meta"] = meta_json(meta);
    j["lambda"] = sol.lambda;
    j["penalty_kind"] = penalty_to_string(sol.penalty_kind);
    j["residual_norm"] = sol.residual_norm;
    j["solution_seminorm"] = sol.solution_seminorm;
    j["singular_values"] = sol.singular_values;
    if (sol.truncation_rank)
        j["truncation_rank"] = *sol.truncation_rank;
    else
        j["truncation_rank"] = nullptr;
    write_json(path, j);
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
    auto out = open_out(path);
    out << j.dump(2) << "\n";
}

nlohmann::json read_json(const std::filesystem::path& path) {
    auto in = open_in(path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw DataError(path.string() + ": JSON parse error: " + e.what());
    }
}

} // namespace ivtheta
