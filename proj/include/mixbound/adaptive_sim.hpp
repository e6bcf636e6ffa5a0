#pragma once

// Simulation of adaptive chains whose kernels share a minorizing component,
// and Monte Carlo checks of the resulting concentration certificates.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mixbound/concentration.hpp"
#include "mixbound/errors.hpp"
#include "mixbound/mixing.hpp"
#include "mixbound/parallel.hpp"
#include "mixbound/process_model.hpp"
#include "mixbound/rng.hpp"
#include "mixbound/space.hpp"

namespace mixbound {

enum class AdaptationRule {
    Constant,     // γ never moves
    TowardState,  // γ drifts toward (|Γ|−1)·x/(|Ω|−1)
};

inline const char* to_string(AdaptationRule r) {
    return r == AdaptationRule::Constant ? "constant" : "toward_state";
}

// Γ_{t+1} = Γ_t + c·t^{−α}·clamp(target(X_{t+1}) − Γ_t, −1, 1), so that
// |Γ_{t+1} − Γ_t| ≤ c·t^{−α}. Γ is a real coordinate on [0, |Γ|−1].
struct AdaptationSchedule {
    double c = 0.5;
    double alpha = 1.5;
    double gamma0 = 0.0;
    AdaptationRule rule = AdaptationRule::TowardState;

    void validate(std::size_t family_size) const {
        if (!(c >= 0.0) || !std::isfinite(c)) throw DomainError("schedule constant c must be finite and >= 0");
        if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("schedule exponent must be positive");
        if (!(gamma0 >= 0.0 && gamma0 <= static_cast<double>(family_size - 1)))
            throw DomainError("initial adaptation index outside the family");
    }

    double step_bound(std::size_t t) const { return c * std::pow(static_cast<double>(t), -alpha); }

    // Upper bound on c·Σ_{s≥t} s^{−α}; infinite when the series diverges.
    double tail(std::size_t t) const {
        if (c == 0.0) return 0.0;
        if (alpha <= 1.0) return std::numeric_limits<double>::infinity();
        const double tt = static_cast<double>(t);
        return c * (std::pow(tt, -alpha) + std::pow(tt, 1.0 - alpha) / (alpha - 1.0));
    }

    bool summable() const { return c == 0.0 || alpha > 1.0; }

    double update(double gamma, std::size_t x, std::size_t t, std::size_t states,
                  std::size_t indices) const {
        return update_with_step(gamma, x, step_bound(t), states, indices);
    }

    double update_with_step(double gamma, std::size_t x, double step, std::size_t states,
                            std::size_t indices) const {
        if (rule == AdaptationRule::Constant || indices <= 1) return gamma;
        const double top = static_cast<double>(indices - 1);
        const double target = states > 1 ? top * static_cast<double>(x) / static_cast<double>(states - 1) : 0.0;
        return std::clamp(gamma + std::clamp(target - gamma, -1.0, 1.0) * step, 0.0, top);
    }
};

// Kernels K_γ = m0·ξ + (1 − m0)·R_γ; a real index γ interpolates linearly
// between neighbouring residuals, which keeps the m0·ξ floor.
class MinorizedFamily {
public:
    MinorizedFamily(Distribution xi, double m0, std::vector<MarkovKernel> residuals)
        : xi_(std::move(xi)), m0_(m0), residuals_(std::move(residuals)) {
        if (!(m0_ > 0.0 && m0_ <= 1.0)) throw DomainError("minorization weight must lie in (0,1]");
        if (residuals_.empty()) throw DomainError("family needs at least one residual kernel");
        const auto& space = xi_.space();
        for (const auto& r : residuals_)
            if (r.rows() != space.size() || r.cols() != space.size())
                throw SpaceMismatch("residual kernels must act on the space of ξ");
        for (const auto& r : residuals_) {
            std::vector<std::vector<double>> rows(space.size(), std::vector<double>(space.size()));
            for (std::size_t a = 0; a < space.size(); ++a)
                for (std::size_t b = 0; b < space.size(); ++b)
                    rows[a][b] = m0_ * xi_[b] + (1.0 - m0_) * r(a, b);
            kernels_.emplace_back(space, std::move(rows));
        }
    }

    const FiniteSpace& space() const noexcept { return xi_.space(); }
    const Distribution& xi() const noexcept { return xi_; }
    double m0() const noexcept { return m0_; }
    std::size_t size() const noexcept { return residuals_.size(); }
    const std::vector<MarkovKernel>& residuals() const noexcept { return residuals_; }
    const std::vector<MarkovKernel>& kernels() const noexcept { return kernels_; }

    std::vector<double> row_at(double gamma, std::size_t x) const {
        auto [lo, frac] = locate(gamma);
        const std::size_t hi = std::min(lo + 1, size() - 1);
        std::vector<double> out(space().size());
        for (std::size_t b = 0; b < out.size(); ++b)
            out[b] = m0_ * xi_[b] +
                     (1.0 - m0_) * ((1.0 - frac) * residuals_[lo](x, b) + frac * residuals_[hi](x, b));
        return out;
    }

    // One draw from K_γ(x, ·) using a single uniform.
    std::size_t sample(double gamma, std::size_t x, double u) const {
        if (u < m0_) return sample_index(xi_.weights(), u / m0_);
        u = (u - m0_) / (1.0 - m0_);
        auto [lo, frac] = locate(gamma);
        if (frac == 0.0 || u < 1.0 - frac) return sample_index(residuals_[lo].row(x), frac == 0.0 ? u : u / (1.0 - frac));
        return sample_index(residuals_[lo + 1].row(x), (u - (1.0 - frac)) / frac);
    }

private:
    std::pair<std::size_t, double> locate(double gamma) const {
        const double top = static_cast<double>(size() - 1);
        gamma = std::clamp(gamma, 0.0, top);
        std::size_t lo = static_cast<std::size_t>(std::floor(gamma));
        if (lo >= size() - 1) return {size() - 1, 0.0};
        return {lo, gamma - static_cast<double>(lo)};
    }

    Distribution xi_;
    double m0_;
    std::vector<MarkovKernel> residuals_;
    std::vector<MarkovKernel> kernels_;
};

inline MinorizedFamily build_minorized_family(Distribution xi, double m0, std::vector<MarkovKernel> residuals) {
    return MinorizedFamily(std::move(xi), m0, std::move(residuals));
}

// Metropolis–Hastings kernel targeting `target` with proposal q.
inline MarkovKernel metropolis_kernel(const Distribution& target, const MarkovKernel& proposal) {
    const std::size_t k = target.size();
    if (proposal.rows() != k || proposal.cols() != k) throw SpaceMismatch("proposal must act on the target space");
    std::vector<std::vector<double>> rows(k, std::vector<double>(k, 0.0));
    for (std::size_t x = 0; x < k; ++x) {
        double stay = 1.0;
        for (std::size_t y = 0; y < k; ++y) {
            if (y == x || proposal(x, y) == 0.0) continue;
            const double num = target[y] * proposal(y, x);
            const double den = target[x] * proposal(x, y);
            const double accept = den > 0.0 ? std::min(1.0, num / den) : 1.0;
            rows[x][y] = proposal(x, y) * accept;
            stay -= rows[x][y];
        }
        rows[x][x] = std::max(0.0, stay);
        double total = 0.0;
        for (double v : rows[x]) total += v;
        for (double& v : rows[x]) v /= total;
    }
    return MarkovKernel(target.space(), std::move(rows));
}

// Stationary law by power iteration on the lazy kernel (I + K)/2.
inline std::vector<double> stationary_distribution(const MarkovKernel& k, double tol = 1e-15,
                                                   std::size_t max_iter = 1'000'000) {
    const std::size_t s = k.rows();
    std::vector<double> pi(s, 1.0 / static_cast<double>(s)), next(s);
    for (std::size_t it = 0; it < max_iter; ++it) {
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t a = 0; a < s; ++a)
            for (std::size_t b = 0; b < s; ++b) next[b] += 0.5 * pi[a] * k(a, b);
        for (std::size_t a = 0; a < s; ++a) next[a] += 0.5 * pi[a];
        double diff = 0.0;
        for (std::size_t a = 0; a < s; ++a) diff += std::abs(next[a] - pi[a]);
        pi.swap(next);
        if (diff < tol) return pi;
    }
    throw NonConvergence("power iteration did not converge");
}

// The law π of the averaged kernel, after checking that every member leaves
// it invariant.
inline std::vector<double> common_stationary(std::span<const MarkovKernel> family, double tol = 1e-9) {
    if (family.empty()) throw DomainError("empty kernel family");
    const std::size_t s = family.front().rows();
    std::vector<std::vector<double>> avg(s, std::vector<double>(s, 0.0));
    for (const auto& k : family)
        for (std::size_t a = 0; a < s; ++a)
            for (std::size_t b = 0; b < s; ++b) avg[a][b] += k(a, b) / static_cast<double>(family.size());
    for (auto& row : avg) {
        double t = 0.0;
        for (double v : row) t += v;
        for (double& v : row) v /= t;
    }
    auto pi = stationary_distribution(MarkovKernel(family.front().source(), std::move(avg)));
    for (const auto& k : family) {
        double diff = 0.0;
        for (std::size_t b = 0; b < s; ++b) {
            double mass = 0.0;
            for (std::size_t a = 0; a < s; ++a) mass += pi[a] * k(a, b);
            diff += std::abs(mass - pi[b]);
        }
        if (diff > tol) throw DomainError("family members do not share a stationary law");
    }
    return pi;
}

// MinorizedFamily driven by an AdaptationSchedule.
class ScheduledChain {
public:
    struct State {
        std::size_t x = 0;
        double gamma = 0.0;
        std::size_t t = 1;
    };

    ScheduledChain(MinorizedFamily family, AdaptationSchedule schedule, Distribution initial)
        : family_(std::move(family)), schedule_(schedule), initial_(std::move(initial)) {
        schedule_.validate(family_.size());
        if (initial_.size() != family_.space().size())
            throw SpaceMismatch("initial law must live on the family's space");
        steps_.resize(kStepTable);
        for (std::size_t t = 1; t < kStepTable; ++t) steps_[t] = schedule_.step_bound(t);
    }

    const MinorizedFamily& family() const noexcept { return family_; }
    const AdaptationSchedule& schedule() const noexcept { return schedule_; }
    const Distribution& initial() const noexcept { return initial_; }
    const FiniteSpace& space() const noexcept { return family_.space(); }
    std::size_t max_steps() const noexcept { return std::numeric_limits<std::size_t>::max(); }

    State start(CounterRng& rng) const {
        return State{sample_index(initial_.weights(), rng.uniform()), schedule_.gamma0, 1};
    }

    void advance(State& s, CounterRng& rng) const {
        s.x = family_.sample(s.gamma, s.x, rng.uniform());
        const double step = s.t < kStepTable ? steps_[s.t] : schedule_.step_bound(s.t);
        s.gamma = schedule_.update_with_step(s.gamma, s.x, step, space().size(), family_.size());
        ++s.t;
    }

    double gamma(const State& s) const { return s.gamma; }

private:
    static constexpr std::size_t kStepTable = 1u << 16;

    MinorizedFamily family_;
    AdaptationSchedule schedule_;
    Distribution initial_;
    std::vector<double> steps_;  // c·t^{−α} for small t
};

// Draws paths from a finite AdaptiveChainSpec (at most its horizon).
class AdaptiveSpecSampler {
public:
    struct State {
        std::size_t x = 0;
        std::size_t g = 0;
        std::size_t t = 1;
    };

    explicit AdaptiveSpecSampler(AdaptiveChainSpec spec) : spec_(std::move(spec)) {}

    const AdaptiveChainSpec& spec() const noexcept { return spec_; }
    const FiniteSpace& space() const noexcept { return spec_.space(); }
    std::size_t max_steps() const noexcept { return spec_.horizon(); }

    State start(CounterRng& rng) const {
        const std::size_t w = sample_index(spec_.initial().weights(), rng.uniform());
        const std::size_t ng = spec_.indices().size();
        return State{w / ng, w % ng, 1};
    }

    void advance(State& s, CounterRng& rng) const {
        if (s.t >= spec_.horizon()) throw DomainError("adaptive spec horizon exhausted");
        const std::size_t ng = spec_.indices().size();
        const std::size_t x2 = sample_index(spec_.family()[s.g].row(s.x), rng.uniform());
        const std::size_t g2 = sample_index(spec_.adaptation()[s.t - 1].row(s.x * ng + s.g), rng.uniform());
        s.x = x2;
        s.g = g2;
        ++s.t;
    }

    double gamma(const State& s) const { return static_cast<double>(s.g); }

private:
    AdaptiveChainSpec spec_;
};

struct SimulatedPath {
    std::vector<std::size_t> states;
    std::vector<double> gammas;
};

template <class Sampler>
SimulatedPath simulate(const Sampler& sampler, std::size_t n, std::uint64_t seed, std::uint64_t stream = 0) {
    if (n == 0) throw DomainError("path length must be positive");
    if (n > sampler.max_steps()) throw DomainError("requested path exceeds the sampler's horizon");
    CounterRng rng(seed, stream);
    SimulatedPath out;
    out.states.reserve(n);
    out.gammas.reserve(n);
    auto s = sampler.start(rng);
    for (std::size_t t = 0;; ++t) {
        out.states.push_back(s.x);
        out.gammas.push_back(sampler.gamma(s));
        if (t + 1 == n) break;
        sampler.advance(s, rng);
    }
    return out;
}

// P̂_n(A) = (1/n)·#{i : x_i ∈ A}.
inline double empirical_measure(std::span<const std::size_t> path, const std::vector<bool>& in_set) {
    if (path.empty()) throw DomainError("empirical measure of an empty path");
    std::size_t hits = 0;
    for (auto x : path) hits += in_set.at(x) ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(path.size());
}

inline double set_probability(std::span<const double> law, const std::vector<bool>& in_set) {
    double p = 0.0;
    for (std::size_t i = 0; i < law.size(); ++i)
        if (in_set.at(i)) p += law[i];
    return p;
}

// Stream namespaces keep the n₀ scan and the certificate check independent.
inline constexpr std::uint64_t kN0StreamBase = 1ULL << 40;
inline constexpr std::uint64_t kVerifyStreamBase = 2ULL << 40;

struct N0GridPoint {
    std::size_t n = 0;
    double mean = 0.0;
    double standard_error = 0.0;
    double bias = 0.0;  // |mean − π(A)|
};

struct N0Estimate {
    std::size_t n0 = 0;
    double bias = 0.0;
    double standard_error = 0.0;
    std::vector<N0GridPoint> trace;
};

// Scans n = 1, 2, 4, … and returns the first n with
// |mean P̂_n(A) − π(A)| + 2·SE < ε. Each replicate is one path extended
// across the grid.
template <class Sampler>
N0Estimate estimate_n0(const Sampler& sampler, const std::vector<bool>& in_set, double target_prob,
                       double epsilon, std::size_t replicates, std::uint64_t seed,
                       std::size_t max_n = 1u << 16) {
    if (!(epsilon > 0.0)) throw DomainError("epsilon must be positive");
    if (replicates < 2) throw DomainError("need at least two replicates");
    max_n = std::min(max_n, sampler.max_steps());
    using State = typename Sampler::State;
    std::vector<CounterRng> rngs;
    std::vector<State> states(replicates);
    std::vector<std::size_t> hits(replicates, 0);
    rngs.reserve(replicates);
    for (std::size_t r = 0; r < replicates; ++r) rngs.emplace_back(seed, kN0StreamBase + r);
    for (std::size_t r = 0; r < replicates; ++r) {
        states[r] = sampler.start(rngs[r]);
        hits[r] = in_set.at(states[r].x) ? 1 : 0;
    }

    N0Estimate est;
    std::size_t reached = 1;
    for (std::size_t n = 1; n <= max_n; n *= 2) {
        parallel_for(replicates, [&](std::size_t r) {
            for (std::size_t step = reached; step < n; ++step) {
                sampler.advance(states[r], rngs[r]);
                hits[r] += in_set.at(states[r].x) ? 1 : 0;
            }
        });
        reached = n;
        double sum = 0.0, sq = 0.0;
        for (std::size_t r = 0; r < replicates; ++r) {
            const double p = static_cast<double>(hits[r]) / static_cast<double>(n);
            sum += p;
            sq += p * p;
        }
        const double R = static_cast<double>(replicates);
        const double mean = sum / R;
        const double var = std::max(0.0, (sq - R * mean * mean) / (R - 1.0));
        N0GridPoint pt{n, mean, std::sqrt(var / R), std::abs(mean - target_prob)};
        est.trace.push_back(pt);
        if (pt.bias + 2.0 * pt.standard_error < epsilon) {
            est.n0 = n;
            est.bias = pt.bias;
            est.standard_error = pt.standard_error;
            return est;
        }
    }
    throw NonConvergence("no grid point up to n = " + std::to_string(max_n) +
                         " brought the bias below epsilon");
}

struct SimulationReport {
    std::size_t replicates = 0;
    std::size_t n = 0;
    std::vector<std::size_t> target_set;
    double target_prob = 0.0;
    double t = 0.0;
    double epsilon = 0.0;
    double theta = 0.0;
    std::optional<std::size_t> n0;
    ConcentrationCertificate certificate;
    std::size_t exceedances = 0;
    double frequency = 0.0;
    double mc_standard_error = 0.0;
    double tolerance = 0.0;  // bound + Monte Carlo slack
    bool pass = false;
    std::vector<double> deviations;  // |P̂_n(A) − π(A)| per replicate
};

// Binomial 3σ slack around the bound plus a 3/√R cushion.
inline double certificate_tolerance(double bound, std::size_t replicates) {
    const double R = static_cast<double>(replicates);
    const double b = std::min(bound, 1.0);
    return bound + 3.0 * std::sqrt(b * (1.0 - b) / R) + 3.0 / std::sqrt(R);
}

template <class Sampler>
SimulationReport verify_certificate(const Sampler& sampler, const std::vector<bool>& in_set,
                                    double target_prob, double t, double epsilon, std::size_t n,
                                    std::size_t replicates, std::uint64_t seed, double theta,
                                    CertificateSource source = CertificateSource::DeltaMinorization,
                                    std::optional<std::size_t> n0 = std::nullopt) {
    if (replicates == 0) throw DomainError("need at least one replicate");
    if (n0 && n <= *n0)
        throw PreconditionFailed("precondition n > n0 unmet (n = " + std::to_string(n) +
                                 ", n0 = " + std::to_string(*n0) + ")");
    if (n > sampler.max_steps()) throw DomainError("horizon exceeds the sampler's horizon");

    SimulationReport rep;
    rep.replicates = replicates;
    rep.n = n;
    for (std::size_t i = 0; i < in_set.size(); ++i)
        if (in_set[i]) rep.target_set.push_back(i);
    rep.target_prob = target_prob;
    rep.t = t;
    rep.epsilon = epsilon;
    rep.theta = theta;
    rep.n0 = n0;
    rep.certificate = slln_tail_bound(n, t, epsilon, geometric_delta_norm(theta, n), source);

    rep.deviations.assign(replicates, 0.0);
    parallel_for(replicates, [&](std::size_t r) {
        CounterRng rng(seed, kVerifyStreamBase + r);
        auto s = sampler.start(rng);
        std::size_t hits = in_set.at(s.x) ? 1 : 0;
        for (std::size_t step = 1; step < n; ++step) {
            sampler.advance(s, rng);
            hits += in_set.at(s.x) ? 1 : 0;
        }
        rep.deviations[r] = std::abs(static_cast<double>(hits) / static_cast<double>(n) - target_prob);
    });
    for (double d : rep.deviations)
        if (d > t + epsilon) ++rep.exceedances;
    const double R = static_cast<double>(replicates);
    rep.frequency = static_cast<double>(rep.exceedances) / R;
    rep.mc_standard_error = std::sqrt(rep.frequency * (1.0 - rep.frequency) / R);
    rep.tolerance = certificate_tolerance(rep.certificate.bound, replicates);
    rep.pass = rep.frequency <= rep.tolerance;
    return rep;
}

struct AssumptionReport {
    double m0 = 0.0;
    std::vector<double> xi;
    double kappa = 0.0;
    std::vector<double> lambdas;  // only for finite adaptation rules
    double theta_bound = 1.0;     // 1 − m0
    double c = 0.0;
    double alpha = 0.0;
    double tail_at_one = 0.0;
    bool shared_stationary = false;
    bool diminishing_adaptation = false;  // summable c·t^{−α}, α > 1
    bool minorization = false;            // m0 > 0 with a common stationary law
    bool feller = true;                   // automatic on finite spaces
};

inline AssumptionReport check_assumptions(std::span<const MarkovKernel> family,
                                          const AdaptationSchedule& schedule) {
    AssumptionReport r;
    auto minor = best_minorization(family);
    r.m0 = minor.m0;
    r.xi = minor.xi;
    for (std::size_t a = 0; a < family.size(); ++a)
        for (std::size_t b = a; b < family.size(); ++b)
            for (std::size_t x = 0; x < family[a].rows(); ++x)
                for (std::size_t y = 0; y < family[b].rows(); ++y)
                    r.kappa = std::max(r.kappa, tv_distance(family[a].row(x), family[b].row(y)));
    r.theta_bound = 1.0 - r.m0;
    r.c = schedule.c;
    r.alpha = schedule.alpha;
    r.tail_at_one = schedule.tail(1);
    try {
        common_stationary(family);
        r.shared_stationary = true;
    } catch (const Error&) {
        r.shared_stationary = false;
    }
    r.diminishing_adaptation = schedule.c >= 0.0 && schedule.alpha > 1.0;
    r.minorization = r.m0 > 0.0 && r.shared_stationary;
    return r;
}

inline AssumptionReport check_assumptions(const MinorizedFamily& family, const AdaptationSchedule& schedule) {
    return check_assumptions(std::span<const MarkovKernel>(family.kernels()), schedule);
}

inline AssumptionReport check_assumptions(const AdaptiveChainSpec& spec, const AdaptationSchedule& schedule) {
    auto r = check_assumptions(std::span<const MarkovKernel>(spec.family()), schedule);
    auto profile = adaptive_profile(spec);
    r.lambdas = profile.lambdas;
    return r;
}

// θ_i = 1 − m0 at every step.
inline ContractionProfile minorized_profile(double m0, std::size_t n) {
    ContractionProfile p;
    p.m0 = m0;
    p.thetas.assign(n > 0 ? n - 1 : 0, minorization_theta(m0));
    return p;
}

}  // namespace mixbound
