#pragma once

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "mixbound/io.hpp"

namespace mixbound::cli {

using io::json;

struct RunConfig {
    std::string command;
    std::string input;
    std::string output;
    std::string format = "json";
    std::string deviations;  // verify: per-replicate CSV
    std::string method = "exact";
    std::uint64_t seed = 0;
    std::optional<std::size_t> replicates, n;
    std::optional<double> t, epsilon, theta, m0, delta;
    std::size_t max_table = EnumerationLimits{}.max_table;
};

inline bool csv(const RunConfig& cfg) { return cfg.format == "csv"; }

inline json load_input(const RunConfig& cfg) {
    if (cfg.input.empty()) throw ParseError("--in is required for '" + cfg.command + "'");
    std::string text;
    if (cfg.input == "-") {
        text.assign(std::istreambuf_iterator<char>(std::cin), {});
    } else {
        text = io::read_file(cfg.input);
    }
    return io::parse_json(text, cfg.input);
}

inline std::filesystem::path input_dir(const RunConfig& cfg) {
    if (cfg.input.empty() || cfg.input == "-") return {};
    return std::filesystem::path(cfg.input).parent_path();
}

inline std::string render_mixing(const RunConfig& cfg, const json& doc) {
    const auto kind = io::document_kind(doc);
    const EnumerationLimits lim{cfg.max_table};
    const bool bound = cfg.method == "contraction";
    if (cfg.method != "exact" && !bound) throw DomainError("--method must be 'exact' or 'contraction'");

    auto emit = [&](const MixingMatrix& m) { return csv(cfg) ? io::to_csv(m) : io::dump(io::to_json(m)); };
    if (kind == "profile") {
        auto p = io::load_profile(doc);
        const bool minorized = p.m0 && !doc.contains("thetas") && !doc.contains("theta");
        return emit(mmc_delta_bound(p, minorized ? MixingProvenance::MinorizationBound
                                                 : MixingProvenance::ContractionBound));
    }
    if (kind == "chain") {
        auto spec = io::load_chain(doc);
        return emit(bound ? mmc_delta_bound(chain_profile(spec)) : delta_exact(materialize_chain(spec, lim)));
    }
    if (kind == "mmc") {
        auto spec = io::load_mmc(doc);
        return emit(bound ? mmc_delta_bound(mmc_profile(spec)) : delta_exact(materialize_mmc(spec, lim)));
    }
    if (kind == "adaptive") {
        auto spec = io::load_adaptive(doc);
        return emit(bound ? mmc_delta_bound(adaptive_profile(spec), MixingProvenance::AdaptiveBound)
                          : delta_exact(materialize_adaptive(spec, lim)));
    }
    throw ParseError("'mixing' accepts kinds chain, mmc, adaptive or profile, not '" + kind + "'");
}

// Flags win over fields of an optional {"kind": "bound"} document.
struct BoundInputs {
    std::size_t n = 0;
    double t = 0.0, epsilon = 0.0;
    std::optional<double> theta, m0, delta;
};

inline BoundInputs bound_inputs(const RunConfig& cfg, const std::string& kind) {
    BoundInputs b;
    json doc = json::object();
    if (!cfg.input.empty()) {
        doc = load_input(cfg);
        io::expect_kind(doc, kind);
    }
    auto num = [&](const std::optional<double>& flag, const char* key) -> std::optional<double> {
        if (flag) return flag;
        return io::optional_number(doc, key);
    };
    if (cfg.n) b.n = *cfg.n;
    else if (auto p = io::optional_field(doc, "n")) b.n = io::as_count(*p, "n");
    auto t = num(cfg.t, "t");
    if (!t) throw ParseError("missing deviation t (--t)");
    b.t = *t;
    b.epsilon = num(cfg.epsilon, "epsilon").value_or(0.0);
    b.theta = num(cfg.theta, "theta");
    b.m0 = num(cfg.m0, "m0");
    b.delta = num(cfg.delta, "delta");
    if (b.theta && b.m0) throw DomainError("give either theta or m0, not both");
    if (!b.theta && !b.m0) throw ParseError("missing theta (--theta) or m0 (--m0)");
    if (b.m0 && !(*b.m0 >= 0.0 && *b.m0 <= 1.0)) throw DomainError("m0 must lie in [0,1]");
    return b;
}

inline std::string render_bound(const RunConfig& cfg, std::ostream& warn) {
    auto b = bound_inputs(cfg, "bound");
    if (b.n == 0) throw DomainError("horizon n must be positive (--n)");
    double theta;
    CertificateSource source;
    if (b.m0) {
        theta = 1.0 - *b.m0;
        source = CertificateSource::DeltaMinorization;
        if (*b.m0 == 0.0) warn << "warning: m0 = 0 gives no contraction; the bound uses deltaNorm = n\n";
    } else {
        theta = *b.theta;
        source = CertificateSource::DeltaContraction;
    }
    auto cert = slln_tail_bound(b.n, b.t, b.epsilon, geometric_delta_norm(theta, b.n), source);
    return csv(cfg) ? io::to_csv(cert) : io::dump(io::to_json(cert));
}

inline std::string render_sample_size(const RunConfig& cfg) {
    auto b = bound_inputs(cfg, "sample_size");
    if (!b.delta) throw ParseError("missing confidence delta (--delta)");
    const double theta = b.m0 ? 1.0 - *b.m0 : *b.theta;
    const std::size_t n = sample_size(b.t, b.epsilon, *b.delta, theta);
    if (csv(cfg))
        return "t,epsilon,delta,theta,n\n" + io::format_number(b.t) + "," + io::format_number(b.epsilon) + "," +
               io::format_number(*b.delta) + "," + io::format_number(theta) + "," + std::to_string(n) + "\n";
    json out;
    out["t"] = b.t;
    out["epsilon"] = b.epsilon;
    out["delta"] = *b.delta;
    out["theta"] = theta;
    out["n"] = n;
    out["bound"] = slln_tail_value(n, b.t, geometric_delta_cap(theta));
    return io::dump(out);
}

template <class Sampler>
std::string render_paths(const RunConfig& cfg, const Sampler& sampler, std::size_t n, std::size_t replicates) {
    const auto& space = sampler.space();
    if (csv(cfg)) {
        std::string s = "replicate,step,state,gamma\n";
        for (std::size_t r = 0; r < replicates; ++r) {
            auto p = simulate(sampler, n, cfg.seed, r);
            for (std::size_t i = 0; i < n; ++i)
                s += std::to_string(r) + "," + std::to_string(i + 1) + "," + space.label(p.states[i]) + "," +
                     io::format_number(p.gammas[i]) + "\n";
        }
        return s;
    }
    json paths = json::array();
    for (std::size_t r = 0; r < replicates; ++r) {
        auto p = simulate(sampler, n, cfg.seed, r);
        json states = json::array();
        for (auto x : p.states) states.push_back(space.label(x));
        paths.push_back({{"states", std::move(states)}, {"gamma", p.gammas}});
    }
    json out;
    out["seed"] = cfg.seed;
    out["n"] = n;
    out["paths"] = std::move(paths);
    return io::dump(out);
}

inline std::string render_simulate(const RunConfig& cfg, const json& doc) {
    const auto kind = io::document_kind(doc);
    const std::size_t replicates = cfg.replicates.value_or(1);
    if (kind == "family") {
        auto fam = io::load_family(doc);
        return render_paths(cfg, fam.chain(), cfg.n.value_or(fam.n), replicates);
    }
    if (kind == "adaptive") {
        AdaptiveSpecSampler sampler(io::load_adaptive(doc));
        return render_paths(cfg, sampler, cfg.n.value_or(sampler.spec().horizon()), replicates);
    }
    throw ParseError("'simulate' accepts kinds family or adaptive, not '" + kind + "'");
}

struct VerifyOutput {
    std::string report;
    std::string deviations;
};

inline VerifyOutput render_verify(const RunConfig& cfg, const json& doc) {
    auto fam = io::load_family(doc);
    if (cfg.n) fam.n = *cfg.n;
    if (cfg.replicates) fam.replicates = *cfg.replicates;
    if (cfg.t) fam.t = *cfg.t;
    if (cfg.epsilon) fam.epsilon = *cfg.epsilon;
    auto chain = fam.chain();
    auto assumptions = check_assumptions(fam.family, fam.schedule);
    std::optional<N0Estimate> scan;
    std::size_t n0;
    if (fam.n0) {
        n0 = *fam.n0;
    } else {
        scan = estimate_n0(chain, fam.target_set, fam.target_prob, fam.epsilon, fam.n0_replicates, cfg.seed);
        n0 = scan->n0;
    }
    auto rep = verify_certificate(chain, fam.target_set, fam.target_prob, fam.t, fam.epsilon, fam.n,
                                  fam.replicates, cfg.seed, minorization_theta(fam.family.m0()),
                                  CertificateSource::DeltaMinorization, n0);
    json out = io::to_json(rep, chain.space());
    out["seed"] = cfg.seed;
    if (scan) out["n0Scan"] = io::to_json(*scan);
    out["assumptions"] = io::to_json(assumptions);
    return {io::dump(out), io::deviations_csv(rep)};
}

inline std::string render_discretize(const RunConfig& cfg, const json& doc) {
    auto c = io::load_continuous(doc, input_dir(cfg));
    auto trace = coefficient_trace(c.kernel, c.partitions, c.n, c.quadrature);
    return csv(cfg) ? io::to_csv(trace) : io::dump(io::to_json(trace));
}

}  // namespace mixbound::cli
