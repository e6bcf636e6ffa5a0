#pragma once

// JSON spec files and JSON/CSV reports. Every spec document carries "v": 1
// and a "kind" discriminator.

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <unistd.h>

#include "json.hpp"

#include "mixbound/adaptive_sim.hpp"
#include "mixbound/concentration.hpp"
#include "mixbound/discretize.hpp"
#include "mixbound/errors.hpp"
#include "mixbound/mixing.hpp"
#include "mixbound/norms.hpp"
#include "mixbound/process_model.hpp"
#include "mixbound/space.hpp"

namespace mixbound::io {

using json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

// Shortest text that reads back to the same double.
inline std::string format_number(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc()) return "nan";
    return std::string(buf, end);
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Writes through a temporary sibling and renames it into place, so readers
// never see a partial file. An empty path or "-" means stdout.
inline void write_atomic(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::fwrite(content.data(), 1, content.size(), stdout);
        std::fflush(stdout);
        return;
    }
    const std::string tmp = path + ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ExitCode::internal, "cannot write '" + tmp + "'");
        out << content;
        out.flush();
        if (!out) {
            std::filesystem::remove(tmp);
            throw Error(ExitCode::internal, "short write to '" + tmp + "'");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw Error(ExitCode::internal, "cannot rename into '" + path + "': " + ec.message());
    }
}

inline std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t offset) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

inline json parse_json(const std::string& text, const std::string& origin = "<input>") {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        // nlohmann reports the offset one past the offending byte
        auto [line, col] = line_column(text, e.byte > 0 ? e.byte - 1 : 0);
        std::string msg = e.what();
        if (auto p = msg.find("syntax error"); p != std::string::npos) msg = msg.substr(p);
        throw ParseError(origin + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + msg);
    }
}

// ---------------------------------------------------------------------------
// field access

inline const json& field(const json& j, const std::string& key) {
    if (!j.is_object()) throw ParseError("expected an object holding '" + key + "'");
    auto it = j.find(key);
    if (it == j.end()) throw ParseError("missing field '" + key + "'");
    return *it;
}

inline const json* optional_field(const json& j, const std::string& key) {
    auto it = j.find(key);
    return it == j.end() || it->is_null() ? nullptr : &*it;
}

inline double as_number(const json& j, const std::string& what) {
    if (!j.is_number()) throw ParseError("'" + what + "' must be a number");
    return j.get<double>();
}

inline std::size_t as_count(const json& j, const std::string& what) {
    const double v = as_number(j, what);
    if (!(v >= 0.0) || v != std::floor(v) || v > 9.0e15)
        throw ParseError("'" + what + "' must be a non-negative integer");
    return static_cast<std::size_t>(v);
}

inline std::string as_string(const json& j, const std::string& what) {
    if (!j.is_string()) throw ParseError("'" + what + "' must be a string");
    return j.get<std::string>();
}

inline double number_field(const json& j, const std::string& key) { return as_number(field(j, key), key); }
inline std::size_t count_field(const json& j, const std::string& key) { return as_count(field(j, key), key); }

inline std::optional<double> optional_number(const json& j, const std::string& key) {
    if (auto p = optional_field(j, key)) return as_number(*p, key);
    return std::nullopt;
}

inline std::vector<double> as_vector(const json& j, const std::string& what) {
    if (!j.is_array()) throw ParseError("'" + what + "' must be an array of numbers");
    std::vector<double> out;
    out.reserve(j.size());
    for (const auto& v : j) out.push_back(as_number(v, what));
    return out;
}

inline std::vector<std::vector<double>> as_matrix(const json& j, const std::string& what) {
    if (!j.is_array()) throw ParseError("'" + what + "' must be an array of rows");
    std::vector<std::vector<double>> out;
    for (const auto& row : j) out.push_back(as_vector(row, what));
    return out;
}

// Kind check shared by all loaders.
inline std::string document_kind(const json& doc) {
    if (!doc.is_object()) throw ParseError("spec document must be a JSON object");
    const auto& v = field(doc, "v");
    if (!v.is_number_integer() || v.get<long long>() != kSchemaVersion)
        throw ParseError("unsupported schema version (expected \"v\": 1)");
    return as_string(field(doc, "kind"), "kind");
}

inline void expect_kind(const json& doc, const std::string& kind) {
    if (const auto k = document_kind(doc); k != kind)
        throw ParseError("expected kind '" + kind + "', got '" + k + "'");
}

// A space is either a size or a list of labels.
inline FiniteSpace as_space(const json& j, const std::string& what) {
    if (j.is_number()) return FiniteSpace::indexed(as_count(j, what));
    if (!j.is_array()) throw ParseError("'" + what + "' must be a size or a list of labels");
    std::vector<std::string> labels;
    for (const auto& l : j) labels.push_back(as_string(l, what));
    return FiniteSpace(std::move(labels));
}

inline std::size_t as_state(const json& j, const FiniteSpace& space, const std::string& what) {
    if (j.is_string()) return space.index_of(j.get<std::string>());
    const std::size_t s = as_count(j, what);
    if (s >= space.size()) throw IndexOutOfRange("state " + std::to_string(s) + " outside the space");
    return s;
}

inline Distribution distribution_field(const json& doc, const std::string& key, const FiniteSpace& space) {
    return Distribution(space, as_vector(field(doc, key), key));
}

inline MarkovKernel as_kernel(const json& j, const FiniteSpace& source, const FiniteSpace& target,
                              const std::string& what) {
    return MarkovKernel(source, target, as_matrix(j, what));
}

// "kernel" (one matrix reused at every step) or "kernels" (one per step).
inline std::vector<MarkovKernel> step_kernels(const json& doc, const FiniteSpace& source,
                                              const FiniteSpace& target, std::size_t steps,
                                              const std::string& single, const std::string& plural) {
    std::vector<MarkovKernel> out;
    if (auto k = optional_field(doc, single)) {
        auto kernel = as_kernel(*k, source, target, single);
        out.assign(steps, kernel);
        return out;
    }
    const auto& ks = field(doc, plural);
    if (!ks.is_array()) throw ParseError("'" + plural + "' must be an array of matrices");
    for (const auto& k : ks) out.push_back(as_kernel(k, source, target, plural));
    return out;
}

// ---------------------------------------------------------------------------
// spec loaders

inline ChainSpec load_chain(const json& doc) {
    expect_kind(doc, "chain");
    auto space = as_space(field(doc, "space"), "space");
    const std::size_t n = count_field(doc, "n");
    if (n == 0) throw DomainError("horizon must be positive");
    auto init = distribution_field(doc, "initial", space);
    auto ks = step_kernels(doc, space, space, n - 1, "kernel", "kernels");
    return ChainSpec(space, n, std::move(init), std::move(ks));
}

inline MMCSpec load_mmc(const json& doc) {
    expect_kind(doc, "mmc");
    auto observed = as_space(field(doc, "observed"), "observed");
    auto hidden = as_space(field(doc, "hidden"), "hidden");
    const std::size_t n = count_field(doc, "n");
    if (n == 0) throw DomainError("horizon must be positive");
    auto joint = product_space(observed, hidden);
    auto init = distribution_field(doc, "initial", joint);
    auto ks = step_kernels(doc, joint, joint, n - 1, "kernel", "kernels");
    return MMCSpec(observed, hidden, n, std::move(init), std::move(ks));
}

inline AdaptiveChainSpec load_adaptive(const json& doc) {
    expect_kind(doc, "adaptive");
    auto space = as_space(field(doc, "space"), "space");
    auto indices = as_space(field(doc, "indices"), "indices");
    const std::size_t n = count_field(doc, "n");
    if (n == 0) throw DomainError("horizon must be positive");
    auto joint = product_space(space, indices);
    auto init = distribution_field(doc, "initial", joint);
    const auto& fam = field(doc, "family");
    if (!fam.is_array()) throw ParseError("'family' must be an array of matrices");
    std::vector<MarkovKernel> family;
    for (const auto& k : fam) family.push_back(as_kernel(k, space, space, "family"));
    auto rules = step_kernels(doc, joint, indices, n - 1, "adaptation_rule", "adaptation");
    return AdaptiveChainSpec(space, indices, n, std::move(init), std::move(family), std::move(rules));
}

// θ_1..θ_{n−1} given directly, or (theta, n), or (m0, n).
inline ContractionProfile load_profile(const json& doc) {
    expect_kind(doc, "profile");
    ContractionProfile p;
    p.m0 = optional_number(doc, "m0");
    if (auto t = optional_field(doc, "thetas")) {
        p.thetas = as_vector(*t, "thetas");
    } else {
        const std::size_t n = count_field(doc, "n");
        if (n == 0) throw DomainError("horizon must be positive");
        double theta;
        if (auto t1 = optional_number(doc, "theta")) theta = *t1;
        else if (p.m0) theta = minorization_theta(*p.m0);
        else throw ParseError("profile needs 'thetas', 'theta' or 'm0'");
        p.thetas.assign(n - 1, theta);
    }
    p.validate();
    return p;
}

struct FamilyConfig {
    MinorizedFamily family;
    AdaptationSchedule schedule;
    Distribution initial;
    std::vector<bool> target_set;
    double target_prob = 0.0;
    double t = 0.1;
    double epsilon = 0.02;
    std::size_t n = 1000;
    std::size_t replicates = 10000;
    std::size_t n0_replicates = 2000;
    std::optional<std::size_t> n0;  // skip the scan when given

    ScheduledChain chain() const { return ScheduledChain(family, schedule, initial); }
};

inline AdaptationSchedule load_schedule(const json& j) {
    AdaptationSchedule s;
    if (auto v = optional_number(j, "c")) s.c = *v;
    if (auto v = optional_number(j, "alpha")) s.alpha = *v;
    if (auto v = optional_number(j, "gamma0")) s.gamma0 = *v;
    if (auto r = optional_field(j, "rule")) {
        const auto name = as_string(*r, "rule");
        if (name == "constant") s.rule = AdaptationRule::Constant;
        else if (name == "toward_state") s.rule = AdaptationRule::TowardState;
        else throw ParseError("unknown adaptation rule '" + name + "'");
    }
    return s;
}

inline std::vector<bool> target_set_field(const json& doc, const FiniteSpace& space) {
    const auto& a = field(doc, "target_set");
    if (!a.is_array() || a.empty()) throw ParseError("'target_set' must be a non-empty array of states");
    std::vector<bool> in(space.size(), false);
    for (const auto& s : a) in[as_state(s, space, "target_set")] = true;
    return in;
}

// Residuals are listed directly, or built as Metropolis–Hastings kernels
// from "target" and "proposals" (ξ then defaults to the target).
inline FamilyConfig load_family(const json& doc) {
    expect_kind(doc, "family");
    auto space = as_space(field(doc, "space"), "space");
    std::vector<MarkovKernel> residuals;
    std::optional<Distribution> xi;
    if (auto props = optional_field(doc, "proposals")) {
        auto target = distribution_field(doc, "target", space);
        if (!props->is_array()) throw ParseError("'proposals' must be an array of matrices");
        for (const auto& q : *props) residuals.push_back(metropolis_kernel(target, as_kernel(q, space, space, "proposals")));
        xi = target;
    } else {
        const auto& rs = field(doc, "residuals");
        if (!rs.is_array()) throw ParseError("'residuals' must be an array of matrices");
        for (const auto& r : rs) residuals.push_back(as_kernel(r, space, space, "residuals"));
    }
    if (optional_field(doc, "xi")) xi = distribution_field(doc, "xi", space);
    if (!xi) throw ParseError("missing field 'xi'");
    MinorizedFamily family(*xi, number_field(doc, "m0"), std::move(residuals));

    AdaptationSchedule schedule;
    if (auto s = optional_field(doc, "schedule")) schedule = load_schedule(*s);
    schedule.validate(family.size());

    std::optional<Distribution> initial;
    if (auto x0 = optional_field(doc, "x0")) initial = Distribution::point_mass(space, as_state(*x0, space, "x0"));
    else initial = distribution_field(doc, "initial", space);

    FamilyConfig cfg{.family = std::move(family),
                     .schedule = schedule,
                     .initial = std::move(*initial),
                     .target_set = target_set_field(doc, space),
                     .n0 = std::nullopt};
    const auto pi = common_stationary(cfg.family.kernels());
    cfg.target_prob = set_probability(pi, cfg.target_set);
    if (auto v = optional_number(doc, "t")) cfg.t = *v;
    if (auto v = optional_number(doc, "epsilon")) cfg.epsilon = *v;
    if (auto p = optional_field(doc, "n")) cfg.n = as_count(*p, "n");
    if (auto p = optional_field(doc, "replicates")) cfg.replicates = as_count(*p, "replicates");
    if (auto p = optional_field(doc, "n0_replicates")) cfg.n0_replicates = as_count(*p, "n0_replicates");
    if (auto p = optional_field(doc, "n0")) cfg.n0 = as_count(*p, "n0");
    if (!(cfg.t >= 0.0) || !(cfg.epsilon > 0.0)) throw DomainError("need t >= 0 and epsilon > 0");
    if (cfg.n == 0 || cfg.replicates == 0) throw DomainError("n and replicates must be positive");
    return cfg;
}

// Grid CSV rows "x,y,k"; an optional non-numeric header line is skipped.
inline ContinuousKernel1D load_grid_kernel(const std::string& text, const std::string& origin) {
    std::map<std::pair<double, double>, double> cells;
    std::set<double> xs, ys;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        std::vector<double> v;
        std::size_t pos = 0;
        bool numeric = true;
        while (pos <= line.size() && v.size() < 4) {
            const std::size_t comma = std::min(line.find(',', pos), line.size());
            std::string cell = line.substr(pos, comma - pos);
            const auto b = cell.find_first_not_of(" \t"), e = cell.find_last_not_of(" \t");
            cell = b == std::string::npos ? "" : cell.substr(b, e - b + 1);
            double d = 0.0;
            auto [end, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), d);
            if (ec != std::errc() || end != cell.data() + cell.size()) numeric = false;
            v.push_back(d);
            pos = comma + 1;
        }
        if (!numeric && lineno == 1 && cells.empty()) continue;
        if (!numeric || v.size() != 3)
            throw ParseError(origin + ":" + std::to_string(lineno) + ":1: expected 'x,y,k'");
        cells[{v[0], v[1]}] = v[2];
        xs.insert(v[0]);
        ys.insert(v[1]);
    }
    std::vector<double> gx(xs.begin(), xs.end()), gy(ys.begin(), ys.end()), values;
    for (double x : gx)
        for (double y : gy) {
            auto it = cells.find({x, y});
            if (it == cells.end())
                throw ParseError(origin + ": grid is missing the point (" + format_number(x) + ", " +
                                 format_number(y) + ")");
            values.push_back(it->second);
        }
    return tabulated_kernel(std::move(gx), std::move(gy), std::move(values));
}

struct ContinuousConfig {
    ContinuousKernel1D kernel;
    std::vector<PartitionSpec> partitions;
    std::size_t n = 2;
    QuadratureConfig quadrature;
};

// "kernel": {"name", "params"} or {"grid": "file.csv"} (relative to `base`);
// "partitions": cell counts for uniform partitions, or breakpoint arrays.
inline ContinuousConfig load_continuous(const json& doc, const std::filesystem::path& base = {}) {
    expect_kind(doc, "continuous");
    const auto& kj = field(doc, "kernel");
    ContinuousKernel1D kernel;
    std::optional<std::pair<double, double>> support;
    if (auto s = optional_field(doc, "support")) {
        auto v = as_vector(*s, "support");
        if (v.size() != 2) throw ParseError("'support' must be [lo, hi]");
        support = {v[0], v[1]};
    }
    if (auto g = optional_field(kj, "grid")) {
        const auto path = base / as_string(*g, "grid");
        kernel = load_grid_kernel(read_file(path), path.string());
        if (support && (support->first != kernel.lo || support->second != kernel.hi))
            throw SupportMismatch("grid does not span the declared support");
    } else {
        if (!support) throw ParseError("missing field 'support'");
        KernelParams params;
        if (auto p = optional_field(kj, "params")) {
            if (!p->is_object()) throw ParseError("'params' must be an object");
            for (auto it = p->begin(); it != p->end(); ++it) params[it.key()] = as_number(it.value(), it.key());
        }
        kernel = make_kernel(as_string(field(kj, "name"), "name"), params, support->first, support->second);
    }
    ContinuousConfig cfg;
    cfg.kernel = std::move(kernel);
    const auto& parts = field(doc, "partitions");
    if (!parts.is_array() || parts.empty()) throw ParseError("'partitions' must be a non-empty array");
    for (const auto& p : parts) {
        if (p.is_number())
            cfg.partitions.push_back(PartitionSpec::uniform(cfg.kernel.lo, cfg.kernel.hi, as_count(p, "partitions")));
        else
            cfg.partitions.emplace_back(cfg.kernel.lo, cfg.kernel.hi, as_vector(p, "partitions"));
    }
    if (auto p = optional_field(doc, "n")) cfg.n = as_count(*p, "n");
    if (auto p = optional_field(doc, "points_per_cell")) cfg.quadrature.points_per_cell = as_count(*p, "points_per_cell");
    if (cfg.quadrature.points_per_cell == 0) throw DomainError("points_per_cell must be positive");
    return cfg;
}

// ---------------------------------------------------------------------------
// path functions

// JSON: {"space", "n", "values"} with values in lexicographic path order.
inline PathFunction load_path_function_json(const json& doc) {
    auto space = as_space(field(doc, "space"), "space");
    return PathFunction(space, count_field(doc, "n"), as_vector(field(doc, "values"), "values"));
}

// CSV: "path,value" where path lists state labels separated by spaces. Every
// path must appear exactly once.
inline PathFunction load_path_function_csv(const std::string& text, const FiniteSpace& space, std::size_t n,
                                           const std::string& origin = "<csv>") {
    PathIndexer idx(space.size(), n);
    std::vector<double> values(idx.count(), 0.0);
    std::vector<bool> seen(idx.count(), false);
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto comma = line.rfind(',');
        auto fail = [&](const std::string& why) {
            throw ParseError(origin + ":" + std::to_string(lineno) + ":1: " + why);
        };
        if (comma == std::string::npos) fail("expected 'path,value'");
        const std::string value = line.substr(comma + 1);
        double v = 0.0;
        auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
        if (ec != std::errc() || end != value.data() + value.size()) {
            if (lineno == 1) continue;  // header
            fail("value is not a number");
        }
        std::istringstream labels(line.substr(0, comma));
        Path path;
        for (std::string l; labels >> l;) path.push_back(space.index_of(l));
        if (path.size() != n) fail("path has " + std::to_string(path.size()) + " states, expected " + std::to_string(n));
        const auto t = idx.encode(path);
        if (seen[t]) fail("duplicate path");
        seen[t] = true;
        values[t] = v;
    }
    for (std::size_t t = 0; t < seen.size(); ++t)
        if (!seen[t]) throw ParseError(origin + ": no value for path #" + std::to_string(t));
    return PathFunction(space, n, std::move(values));
}

// ---------------------------------------------------------------------------
// reports

inline json to_json(const MixingMatrix& m) {
    json upper = json::array();
    for (std::size_t i = 1; i < m.size(); ++i) {
        json row = json::array();
        for (std::size_t j = i + 1; j <= m.size(); ++j) row.push_back(m.at(i, j));
        upper.push_back(std::move(row));
    }
    json out;
    out["n"] = m.size();
    out["provenance"] = to_string(m.provenance());
    out["norm"] = delta_norm(m);
    out["upper"] = std::move(upper);
    return out;
}

inline std::string to_csv(const MixingMatrix& m) {
    std::string s = "i,j,eta\n";
    for (std::size_t i = 1; i < m.size(); ++i)
        for (std::size_t j = i + 1; j <= m.size(); ++j)
            s += std::to_string(i) + "," + std::to_string(j) + "," + format_number(m.at(i, j)) + "\n";
    return s;
}

inline json to_json(const ConcentrationCertificate& c) {
    json out;
    out["n"] = c.n;
    out["t"] = c.t;
    out["epsilon"] = c.epsilon;
    out["deltaNorm"] = c.delta_norm;
    out["source"] = to_string(c.source);
    out["bound"] = c.bound;
    out["probability"] = c.probability;
    out["clipped"] = c.clipped;
    return out;
}

inline std::string to_csv(const ConcentrationCertificate& c) {
    return "n,t,epsilon,deltaNorm,source,bound,probability,clipped\n" + std::to_string(c.n) + "," +
           format_number(c.t) + "," + format_number(c.epsilon) + "," + format_number(c.delta_norm) + "," +
           to_string(c.source) + "," + format_number(c.bound) + "," + format_number(c.probability) + "," +
           (c.clipped ? "true" : "false") + "\n";
}

inline json to_json(const N0Estimate& e) {
    json trace = json::array();
    for (const auto& p : e.trace)
        trace.push_back({{"n", p.n}, {"mean", p.mean}, {"standardError", p.standard_error}, {"bias", p.bias}});
    return {{"n0", e.n0}, {"bias", e.bias}, {"standardError", e.standard_error}, {"trace", std::move(trace)}};
}

inline json to_json(const SimulationReport& r, const FiniteSpace& space) {
    json set = json::array();
    for (auto s : r.target_set) set.push_back(space.label(s));
    json out;
    out["replicates"] = r.replicates;
    out["n"] = r.n;
    out["targetSet"] = std::move(set);
    out["targetProb"] = r.target_prob;
    out["t"] = r.t;
    out["epsilon"] = r.epsilon;
    out["theta"] = r.theta;
    out["n0"] = r.n0 ? json(*r.n0) : json(nullptr);
    out["certificate"] = to_json(r.certificate);
    out["exceedances"] = r.exceedances;
    out["frequency"] = r.frequency;
    out["mcStandardError"] = r.mc_standard_error;
    out["tolerance"] = r.tolerance;
    out["pass"] = r.pass;
    return out;
}

inline std::string deviations_csv(const SimulationReport& r) {
    std::string s = "replicate,deviation,exceeds\n";
    for (std::size_t i = 0; i < r.deviations.size(); ++i)
        s += std::to_string(i) + "," + format_number(r.deviations[i]) + "," +
             (r.deviations[i] > r.t + r.epsilon ? "1" : "0") + "\n";
    return s;
}

inline json to_json(const AssumptionReport& a) {
    json out;
    out["m0"] = a.m0;
    out["xi"] = a.xi;
    out["kappa"] = a.kappa;
    if (!a.lambdas.empty()) out["lambdas"] = a.lambdas;
    out["thetaBound"] = a.theta_bound;
    out["c"] = a.c;
    out["alpha"] = a.alpha;
    out["tailAtOne"] = std::isfinite(a.tail_at_one) ? json(a.tail_at_one) : json(nullptr);
    out["sharedStationary"] = a.shared_stationary;
    out["diminishingAdaptation"] = a.diminishing_adaptation;
    out["minorization"] = a.minorization;
    out["feller"] = a.feller;
    return out;
}

inline json to_json(const CoefficientTrace& t) {
    json levels = json::array();
    for (const auto& l : t.levels) {
        json lv;
        lv["cells"] = l.cells;
        lv["theta"] = l.theta;
        lv["change"] = l.change ? json(*l.change) : json(nullptr);
        lv["deltaNorm"] = l.delta_norm;
        lv["etaBounds"] = l.eta_bounds;
        lv["m0"] = l.m0 ? json(*l.m0) : json(nullptr);
        levels.push_back(std::move(lv));
    }
    json out;
    out["kernel"] = t.kernel;
    out["horizon"] = t.horizon;
    out["levels"] = std::move(levels);
    out["fellerAssumed"] = t.feller_assumed;
    return out;
}

inline std::string to_csv(const CoefficientTrace& t) {
    std::string s = "cells,theta,change,deltaNorm,m0\n";
    for (const auto& l : t.levels)
        s += std::to_string(l.cells) + "," + format_number(l.theta) + "," +
             (l.change ? format_number(*l.change) : "") + "," + format_number(l.delta_norm) + "," +
             (l.m0 ? format_number(*l.m0) : "") + "\n";
    return s;
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace mixbound::io
