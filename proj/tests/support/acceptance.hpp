#pragma once

// The acceptance suite: each check draws seeded random instances and compares
// the library against the brute-force oracles.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "mixbound/adaptive_sim.hpp"
#include "mixbound/concentration.hpp"
#include "mixbound/discretize.hpp"
#include "mixbound/mixing.hpp"
#include "mixbound/norms.hpp"
#include "mixbound/process_model.hpp"

#include "generators.hpp"
#include "oracles.hpp"

namespace acceptance {

using namespace mixbound;

struct Outcome {
    Outcome() = default;
    Outcome(int i, std::string n) : id(i), name(std::move(n)) {}

    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

inline std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

inline double max_abs_diff(std::span<const double> a, const std::vector<double>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

// Product measures have no mixing: Δ_n is the identity.
inline Outcome product_identity() {
    Outcome o{1, "product-measure identity"};
    gen::Engine rng(101);
    double worst_eta = 0.0, worst_norm = 0.0;
    for (int rep = 0; rep < 50; ++rep) {
        const std::size_t k = gen::pick(rng, 2, 3), n = gen::pick(rng, 3, 5);
        // A chain whose kernel at step s has every row equal to μ_{s+1}.
        auto init = gen::simplex(rng, k);
        std::vector<gen::Mat> ks;
        for (std::size_t s = 0; s + 1 < n; ++s) ks.emplace_back(k, gen::simplex(rng, k));
        auto probs = oracle::chain_measure(init, ks, n);
        auto m = delta_exact(PathMeasure(FiniteSpace::indexed(k), n, probs));
        for (std::size_t i = 1; i < n; ++i)
            for (std::size_t j = i + 1; j <= n; ++j) worst_eta = std::max(worst_eta, m.at(i, j));
        worst_norm = std::max(worst_norm, std::abs(delta_norm(m) - 1.0));
    }
    o.pass = worst_eta < 1e-9 && worst_norm < 1e-9;
    o.detail = fmt("50 measures, max off-diagonal %.3g, max |norm-1| %.3g", worst_eta, worst_norm);
    return o;
}

struct SlackLog {
    double min_slack = 1e300, max_slack = 0.0;
    std::size_t entries = 0, tight = 0, violations = 0;
    double worst_measure = 0.0, worst_eta = 0.0;

    void add(const MixingMatrix& exact, const MixingMatrix& bound, const std::vector<double>& oracle_eta) {
        std::size_t e = 0;
        for (std::size_t i = 1; i < exact.size(); ++i)
            for (std::size_t j = i + 1; j <= exact.size(); ++j, ++e) {
                const double slack = bound.at(i, j) - exact.at(i, j);
                min_slack = std::min(min_slack, slack);
                max_slack = std::max(max_slack, slack);
                ++entries;
                if (slack < -1e-9) ++violations;
                if (std::abs(slack) <= 1e-9) ++tight;
                worst_eta = std::max(worst_eta, std::abs(exact.at(i, j) - oracle_eta[e]));
            }
    }
};

inline std::vector<double> oracle_etas(const std::vector<double>& pm, std::size_t k, std::size_t n) {
    std::vector<double> out;
    for (std::size_t i = 1; i < n; ++i)
        for (std::size_t j = i + 1; j <= n; ++j) out.push_back(oracle::eta(pm, k, n, i, j));
    return out;
}

// Exact η̄_ij never exceed the product of contraction coefficients.
inline Outcome contraction_domination() {
    Outcome o{2, "contraction domination"};
    gen::Engine rng(202);
    SlackLog chains, adaptive;
    for (int rep = 0; rep < 100; ++rep) {
        auto d = gen::chain(rng, 3, 5);
        auto spec = d.spec();
        auto pm = materialize_chain(spec);
        auto ref = oracle::chain_measure(d.init, d.kernels, d.n);
        chains.worst_measure = std::max(chains.worst_measure, max_abs_diff(pm.probs(), ref));
        chains.add(delta_exact(pm), mmc_delta_bound(chain_profile(spec)), oracle_etas(ref, d.k, d.n));
    }
    for (int rep = 0; rep < 100; ++rep) {
        auto d = gen::adaptive(rng, 3, 2, 5);
        auto spec = d.spec();
        auto pm = materialize_adaptive(spec);
        auto ref = oracle::adaptive_measure(d.init, d.family, d.rules, d.k, d.n);
        adaptive.worst_measure = std::max(adaptive.worst_measure, max_abs_diff(pm.probs(), ref));
        adaptive.add(delta_exact(pm), mmc_delta_bound(adaptive_profile(spec), MixingProvenance::AdaptiveBound),
                     oracle_etas(ref, d.k, d.n));
    }
    o.pass = chains.violations == 0 && adaptive.violations == 0 && chains.worst_measure < 1e-12 &&
             adaptive.worst_measure < 1e-12 && chains.worst_eta < 1e-9 && adaptive.worst_eta < 1e-9;
    o.detail = fmt("chains: %zu entries, %zu violations, slack in [%.3g, %.3g], %zu tight; "
                   "adaptive: %zu entries, %zu violations, slack in [%.3g, %.3g], %zu tight; "
                   "oracle gaps %.2g/%.2g",
                   chains.entries, chains.violations, chains.min_slack, chains.max_slack, chains.tight,
                   adaptive.entries, adaptive.violations, adaptive.min_slack, adaptive.max_slack, adaptive.tight,
                   std::max(chains.worst_measure, chains.worst_eta),
                   std::max(adaptive.worst_measure, adaptive.worst_eta));
    return o;
}

struct NormTable {
    std::size_t n;
    std::vector<double> values;
};

// Shared by the Ψ-domination and sandwich checks.
inline const std::vector<NormTable>& norm_tables() {
    static const std::vector<NormTable> tables = [] {
        gen::Engine rng(303);
        std::vector<NormTable> t;
        for (int rep = 0; rep < 200; ++rep) {
            const std::size_t n = rep % 2 == 0 ? 2 : 3;
            t.push_back({n, gen::table(rng, oracle::ipow(2, n), 2.0)});
        }
        return t;
    }();
    return tables;
}

inline Outcome psi_domination() {
    Outcome o{3, "psi domination"};
    const auto space = FiniteSpace::indexed(2);
    std::size_t failures = 0, lp_checks = 0;
    double min_slack = 1e300, worst_lp = 0.0, worst_psi = 0.0;
    for (const auto& tab : norm_tables()) {
        PathFunction f(space, tab.n, tab.values);
        const double phi = phi_norm(f), psi = psi_norm(f);
        min_slack = std::min(min_slack, psi - phi);
        if (phi > psi + 1e-9) ++failures;
        auto neg = tab.values;
        for (double& v : neg) v = -v;
        const double psi_ref = std::max(oracle::psi(tab.values, 2, tab.n), oracle::psi(neg, 2, tab.n));
        worst_psi = std::max(worst_psi, std::abs(psi - psi_ref));
        for (int sign : {1, -1}) {
            auto g = sign > 0 ? f : -f;
            auto sol = phi_sup(g);
            if (!is_phi_feasible(space, tab.n, sol.g)) ++failures;
            if (tab.n == 2) {
                ++lp_checks;
                worst_lp = std::max(worst_lp, std::abs(sol.value - oracle::phi_integer(sign > 0 ? tab.values : neg, 2, 2)));
            }
        }
    }
    o.pass = failures == 0 && worst_lp < 1e-9 && worst_psi < 1e-9;
    o.detail = fmt("200 tables, %zu failures, min psi-phi %.3g, LP vs integer search max gap %.2g over %zu, "
                   "psi vs direct sum %.2g",
                   failures, min_slack, worst_lp, lp_checks, worst_psi);
    return o;
}

inline Outcome norm_sandwich() {
    Outcome o{4, "norm sandwich"};
    const auto space = FiniteSpace::indexed(2);
    std::size_t failures = 0;
    double low = 1e300, high = 1e300;
    for (const auto& tab : norm_tables()) {
        PathFunction f(space, tab.n, tab.values);
        auto r = norm_report(f);
        const double n = static_cast<double>(tab.n);
        for (double v : {r.phi, r.psi}) {
            low = std::min(low, v - 0.5 * r.l1);
            high = std::min(high, n * r.l1 - v);
            if (v < 0.5 * r.l1 - 1e-9 || v > n * r.l1 + 1e-9) ++failures;
        }
    }
    o.pass = failures == 0;
    o.detail = fmt("200 tables, %zu failures, min lower margin %.3g, min upper margin %.3g", failures, low, high);
    return o;
}

inline Outcome martingale_bound() {
    Outcome o{5, "martingale-difference bound"};
    gen::Engine rng(505);
    const auto space = FiniteSpace::indexed(2);
    std::size_t failures = 0;
    double worst_gap = 0.0, min_slack = 1e300;
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t n = gen::pick(rng, 2, 4);
        std::vector<double> probs;
        if (rep % 2 == 0) {
            probs = gen::simplex(rng, oracle::ipow(2, n), 0.2);
        } else {
            auto init = gen::simplex(rng, 2, 0.2);
            probs = oracle::chain_measure(init, gen::stochastic_list(rng, n - 1, 2, 2, 0.2), n);
        }
        auto values = gen::table(rng, probs.size());
        PathMeasure pm(space, n, probs);
        PathFunction f(space, n, values);
        auto rep_ = check_mgale_bound(pm, f, delta_exact(pm));
        if (!rep_.holds) ++failures;
        std::vector<double> v, vhat;
        oracle::martingale_norms(probs, values, 2, n, v, vhat);
        worst_gap = std::max(worst_gap, std::abs(rep_.lipschitz - oracle::lipschitz(values, 2, n)));
        worst_gap = std::max(worst_gap, std::abs(rep_.delta_norm - oracle::delta_norm(probs, 2, n)));
        for (std::size_t i = 0; i < n; ++i) {
            worst_gap = std::max(worst_gap, std::abs(rep_.profile.sup_norms[i] - v[i]));
            worst_gap = std::max(worst_gap, std::abs(rep_.profile.hat_sup_norms[i] - vhat[i]));
            if (rep_.profile.sup_norms[i] > rep_.profile.hat_sup_norms[i] + 1e-9) ++failures;
            min_slack = std::min(min_slack, rep_.slacks[i]);
        }
    }
    o.pass = failures == 0 && worst_gap < 1e-9;
    o.detail = fmt("100 pairs, %zu failures, min slack %.3g, oracle gap %.2g", failures, min_slack, worst_gap);
    return o;
}

struct SweepConfig {
    std::size_t states, indices, n;
    double m0, t;
    std::uint64_t seed;
};

inline std::vector<SweepConfig> sweep_configs() {
    const double m0s[] = {0.3, 0.5, 1.0};
    const std::size_t ns[] = {500, 1000, 2000, 4000, 8000};
    const double ts[] = {0.1, 0.15, 0.2};
    std::vector<SweepConfig> out;
    for (std::size_t c = 0; c < 50; ++c)
        out.push_back({2 + (c / 3) % 2, 1 + (c / 2) % 3, ns[c % 5], m0s[c % 3], ts[(c / 5) % 3], 6000 + c});
    return out;
}

inline Outcome certificate_sweep(std::size_t replicates = 10000) {
    Outcome o{6, "certificate validity sweep"};
    std::size_t failures = 0, exceeded_bound = 0;
    double worst_ratio = 0.0;
    std::string first_failure;
    for (const auto& cfg : sweep_configs()) {
        gen::Engine rng(cfg.seed);
        const auto space = FiniteSpace::indexed(cfg.states);
        Distribution pi(space, gen::simplex(rng, cfg.states));
        std::vector<MarkovKernel> residuals;
        for (std::size_t g = 0; g < cfg.indices; ++g)
            residuals.push_back(metropolis_kernel(pi, MarkovKernel(space, gen::symmetric_proposal(rng, cfg.states))));
        MinorizedFamily family(pi, cfg.m0, residuals);
        const auto start = static_cast<std::size_t>(
            std::min_element(pi.weights().begin(), pi.weights().end()) - pi.weights().begin());
        ScheduledChain chain(family, AdaptationSchedule{0.5, 1.5, 0.0, AdaptationRule::TowardState},
                             Distribution::point_mass(space, start));
        std::vector<bool> in_set(cfg.states, false);
        in_set[gen::pick(rng, 0, cfg.states - 1)] = true;
        const double target = set_probability(common_stationary(family.kernels()), in_set);
        const double epsilon = 0.02;
        try {
            auto n0 = estimate_n0(chain, in_set, target, epsilon, 2000, cfg.seed);
            auto rep = verify_certificate(chain, in_set, target, cfg.t, epsilon, cfg.n, replicates, cfg.seed,
                                          1.0 - cfg.m0, CertificateSource::DeltaMinorization, n0.n0);
            if (!rep.pass) ++failures;
            if (rep.frequency > rep.certificate.bound) ++exceeded_bound;
            worst_ratio = std::max(worst_ratio, rep.frequency / rep.tolerance);
            if (!rep.pass && first_failure.empty())
                first_failure = fmt(" first failure seed %llu: freq %.4g > %.4g",
                                    static_cast<unsigned long long>(cfg.seed), rep.frequency, rep.tolerance);
        } catch (const Error& e) {
            ++failures;
            if (first_failure.empty()) first_failure = std::string(" ") + e.what();
        }
    }
    o.pass = failures == 0;
    o.detail = fmt("50 configs x %zu replicates, %zu failures, %zu above raw bound, max freq/tolerance %.3g",
                   replicates, failures, exceeded_bound, worst_ratio) +
               first_failure;
    return o;
}

inline Outcome sample_size_round_trip() {
    Outcome o{7, "sample-size round trip"};
    const double ts[] = {0.05, 0.1, 0.2, 0.3, 0.5};
    const double deltas[] = {0.01, 0.05, 0.1, 0.5};
    const double thetas[] = {0.0, 0.3, 0.5, 0.7, 0.9};
    std::size_t failures = 0, points = 0;
    for (std::size_t a = 0; a < 5; ++a)
        for (std::size_t b = 0; b < 4; ++b) {
            const double t = ts[a], d = deltas[b], th = thetas[(a + b) % 5];
            const std::size_t n = sample_size(t, 0.0, d, th);
            ++points;
            if (oracle::tail_bound(n, t, th) > d) ++failures;
            if (n > 1 && !(oracle::tail_bound(n - 1, t, th) > d)) ++failures;
        }
    const std::size_t worked = sample_size(0.1, 0.0, 0.05, 0.0);
    const std::size_t worked2 = sample_size(0.2, 0.02, 0.05, 0.7);
    o.pass = failures == 0 && worked == 738 && worked2 == 2050;
    o.detail = fmt("%zu grid points, %zu failures, n(0.1, 0.05, 0) = %zu, n(0.2, 0.05, 0.7) = %zu", points,
                   failures, worked, worked2);
    return o;
}

inline Outcome discretization_convergence() {
    Outcome o{8, "discretization convergence"};
    std::vector<PartitionSpec> parts;
    for (std::size_t m : {8, 16, 32, 64}) parts.push_back(PartitionSpec::uniform(-3.0, 3.0, m));
    auto ar = coefficient_trace(gaussian_ar_kernel(0.5, 1.0, -3.0, 3.0), parts, 5);
    bool decreasing = true;
    for (std::size_t l = 2; l < ar.levels.size(); ++l)
        decreasing = decreasing && *ar.levels[l].change < *ar.levels[l - 1].change;
    const double last = *ar.levels.back().change;
    auto mix = coefficient_trace(mixture_minorized_kernel(0.3, 0.5, 1.0, -3.0, 3.0), parts, 5);
    double worst_theta = 0.0, worst_m0 = 1.0;
    for (const auto& l : mix.levels) {
        worst_theta = std::max(worst_theta, l.theta);
        worst_m0 = std::min(worst_m0, l.m0.value_or(0.0));
    }
    o.pass = decreasing && last < 0.02 && worst_theta <= 0.71 && worst_m0 >= 0.29;
    std::string thetas;
    for (const auto& l : ar.levels) thetas += fmt(" %.4f", l.theta);
    o.detail = fmt("AR theta:%s; last change %.4f; minorized max theta %.4f, min induced m0 %.4f",
                   thetas.c_str(), last, worst_theta, worst_m0);
    return o;
}

inline Outcome simulator_exactness(std::size_t replicates = 100000) {
    Outcome o{9, "simulator exactness"};
    gen::Engine rng(909);
    gen::AdaptiveDraw d;
    d.k = 3;
    d.ng = 2;
    d.n = 4;
    d.init = gen::simplex(rng, d.k * d.ng);
    d.family = gen::stochastic_list(rng, d.ng, d.k, d.k, 0.2);
    d.rules = gen::stochastic_list(rng, d.n - 1, d.k * d.ng, d.ng, 0.2);
    AdaptiveSpecSampler sampler(d.spec());
    auto exact = oracle::adaptive_measure(d.init, d.family, d.rules, d.k, d.n);
    std::vector<std::size_t> counts(exact.size(), 0);
    for (std::size_t r = 0; r < replicates; ++r)
        ++counts[oracle::rank(simulate(sampler, d.n, 9, r).states, d.k)];
    const double R = static_cast<double>(replicates);
    std::size_t failures = 0;
    double worst_z = 0.0;
    for (std::size_t t = 0; t < exact.size(); ++t) {
        const double p = exact[t], freq = static_cast<double>(counts[t]) / R;
        const double sigma = std::sqrt(p * (1.0 - p) / R);
        if (std::abs(freq - p) > 4.0 * sigma + 1e-15) ++failures;
        if (sigma > 0.0) worst_z = std::max(worst_z, std::abs(freq - p) / sigma);
    }
    o.pass = failures == 0;
    o.detail = fmt("%zu paths, %zu replicates, %zu outside 4 sigma, max |z| %.2f", exact.size(), replicates,
                   failures, worst_z);
    return o;
}

struct Check {
    int id;
    const char* name;
    std::function<Outcome()> run;
};

inline std::vector<Check> library_checks() {
    return {{1, "product-measure identity", product_identity},
            {2, "contraction domination", contraction_domination},
            {3, "psi domination", psi_domination},
            {4, "norm sandwich", norm_sandwich},
            {5, "martingale-difference bound", martingale_bound},
            {6, "certificate validity sweep", [] { return certificate_sweep(); }},
            {7, "sample-size round trip", sample_size_round_trip},
            {8, "discretization convergence", discretization_convergence},
            {9, "simulator exactness", [] { return simulator_exactness(); }}};
}

inline Outcome timed(const Check& check) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o{check.id, check.name};
    try {
        o = check.run();
    } catch (const std::exception& e) {
        o.pass = false;
        o.detail = std::string("threw: ") + e.what();
    }
    o.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return o;
}

inline std::string line(const Outcome& o) {
    return fmt("[%s] criterion %d %s (%.2f s): ", o.pass ? "PASS" : "FAIL", o.id, o.name.c_str(), o.seconds) +
           o.detail;
}

}  // namespace acceptance
