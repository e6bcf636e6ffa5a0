#pragma once

// Hamming-metric Lipschitz constants, the coordinate projection π, the
// recursive Ψ functional and the Φ norm (a difference-constraint LP) for
// functions on a finite product space Ω^n with counting measure.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "mixbound/errors.hpp"
#include "mixbound/lp.hpp"
#include "mixbound/space.hpp"

namespace mixbound {

inline std::size_t hamming(std::span<const std::size_t> x, std::span<const std::size_t> y) {
    if (x.size() != y.size()) throw LengthMismatch("Hamming distance needs equal-length paths");
    std::size_t d = 0;
    for (std::size_t i = 0; i < x.size(); ++i) d += x[i] != y[i];
    return d;
}

// Real function on Ω^n, stored densely in lexicographic path order. n = 0 is
// allowed and holds a single scalar.
class PathFunction {
public:
    PathFunction(FiniteSpace space, std::size_t horizon, std::vector<double> values)
        : space_(std::move(space)), indexer_(space_.size(), horizon), values_(std::move(values)) {
        if (values_.size() != indexer_.count())
            throw LengthMismatch("function table must have |Ω|^n entries");
        for (double v : values_)
            if (!std::isfinite(v)) throw DomainError("function values must be finite");
    }

    template <class F>
    static PathFunction from(FiniteSpace space, std::size_t horizon, F&& f) {
        PathIndexer idx(space.size(), horizon);
        std::vector<double> v(idx.count());
        for (std::size_t t = 0; t < v.size(); ++t) v[t] = f(idx.decode(t));
        return PathFunction(std::move(space), horizon, std::move(v));
    }

    // (1/n)·#{i : x_i ∈ A}.
    static PathFunction occupation_fraction(FiniteSpace space, std::size_t horizon,
                                            const std::vector<bool>& in_set) {
        return from(std::move(space), horizon, [&](const Path& x) {
            double c = 0.0;
            for (auto s : x) c += in_set.at(s) ? 1.0 : 0.0;
            return c / static_cast<double>(x.size());
        });
    }

    const FiniteSpace& space() const noexcept { return space_; }
    std::size_t horizon() const noexcept { return indexer_.length(); }
    const PathIndexer& indexer() const noexcept { return indexer_; }
    std::span<const double> values() const noexcept { return values_; }
    double operator()(std::span<const std::size_t> x) const { return values_[indexer_.encode(x)]; }
    double operator[](std::size_t t) const { return values_[t]; }

    double l1() const {
        double s = 0.0;
        for (double v : values_) s += std::abs(v);
        return s;
    }

    PathFunction scaled(double a) const {
        auto v = values_;
        for (double& x : v) x *= a;
        return PathFunction(space_, horizon(), std::move(v));
    }

    PathFunction operator-() const { return scaled(-1.0); }

    friend PathFunction operator+(const PathFunction& a, const PathFunction& b) {
        if (!(a.space_ == b.space_) || a.horizon() != b.horizon())
            throw SpaceMismatch("functions live on different product spaces");
        auto v = a.values_;
        for (std::size_t i = 0; i < v.size(); ++i) v[i] += b.values_[i];
        return PathFunction(a.space_, a.horizon(), std::move(v));
    }

private:
    FiniteSpace space_;
    PathIndexer indexer_;
    std::vector<double> values_;
};

// Largest |f(x) − f(y)| over Hamming-adjacent pairs. On a product space this
// equals the supremum over all pairs divided by their distance.
inline double lipschitz_constant(const PathFunction& f) {
    const std::size_t k = f.space().size(), n = f.horizon();
    const std::size_t count = f.values().size();
    double best = 0.0;
    std::size_t stride = 1;
    for (std::size_t c = 0; c < n; ++c, stride *= k) {
        for (std::size_t t = 0; t < count; ++t) {
            const std::size_t digit = (t / stride) % k;
            const std::size_t base = t - digit * stride;
            for (std::size_t d = digit + 1; d < k; ++d)
                best = std::max(best, std::abs(f[t] - f[base + d * stride]));
        }
    }
    return best;
}

// Integrates out the first coordinate against `weights` (counting measure
// when empty).
inline PathFunction project(const PathFunction& f, std::span<const double> weights = {}) {
    const std::size_t k = f.space().size(), n = f.horizon();
    if (n == 0) throw DomainError("cannot project a function of zero coordinates");
    if (!weights.empty() && weights.size() != k) throw LengthMismatch("one weight per state required");
    const std::size_t rest = f.values().size() / k;
    std::vector<double> out(rest, 0.0);
    for (std::size_t x1 = 0; x1 < k; ++x1) {
        const double w = weights.empty() ? 1.0 : weights[x1];
        for (std::size_t r = 0; r < rest; ++r) out[r] += w * f[x1 * rest + r];
    }
    return PathFunction(f.space(), n - 1, std::move(out));
}

// Ψ_0 = 0,  Ψ_n(f) = Ψ_{n−1}(πf) + Σ_x (f(x))₊.
inline double psi_functional(const PathFunction& f) {
    if (f.horizon() == 0) return 0.0;
    double pos = 0.0;
    for (double v : f.values()) pos += std::max(v, 0.0);
    return pos + psi_functional(project(f));
}

inline double psi_norm(const PathFunction& f) {
    return std::max(psi_functional(f), psi_functional(-f));
}

struct NormLimits {
    std::size_t max_table = 256;  // |Ω|^n for the Φ-norm LP
};

struct PhiSolution {
    double value = 0.0;         // sup over Φ_n of ⟨f, g⟩ (one-sided)
    std::vector<double> g;      // a maximizer
};

// Largest grid diameter of Φ_n's range: n for |Ω| ≥ 2, 0 when Ω is a singleton.
inline double phi_range(const FiniteSpace& space, std::size_t n) {
    return space.size() >= 2 ? static_cast<double>(n) : 0.0;
}

// sup ⟨f, g⟩ over g: Ω^n → [0, n] with Hamming-Lipschitz constant ≤ 1.
inline PhiSolution phi_sup(const PathFunction& f, const NormLimits& lim = {}) {
    const std::size_t k = f.space().size(), n = f.horizon(), count = f.values().size();
    if (checked_power(k, n) > lim.max_table)
        throw OptimizationLimitExceeded("Φ-norm LP over " + std::to_string(k) + "^" +
                                        std::to_string(n) + " variables exceeds the limit of " +
                                        std::to_string(lim.max_table));
    const double cap = phi_range(f.space(), n);
    PhiSolution out;
    out.g.assign(count, 0.0);
    if (cap == 0.0) return out;

    lp::Problem prob;
    prob.vars = count;
    prob.objective.assign(f.values().begin(), f.values().end());
    for (std::size_t t = 0; t < count; ++t) {
        std::vector<double> row(count, 0.0);
        row[t] = 1.0;
        prob.add_row(std::move(row), cap);
    }
    std::size_t stride = 1;
    for (std::size_t c = 0; c < n; ++c, stride *= k)
        for (std::size_t t = 0; t < count; ++t) {
            const std::size_t digit = (t / stride) % k;
            const std::size_t base = t - digit * stride;
            for (std::size_t d = digit + 1; d < k; ++d) {
                const std::size_t u = base + d * stride;
                std::vector<double> up(count, 0.0), down(count, 0.0);
                up[t] = 1.0, up[u] = -1.0;
                down[t] = -1.0, down[u] = 1.0;
                prob.add_row(std::move(up), 1.0);
                prob.add_row(std::move(down), 1.0);
            }
        }
    auto sol = lp::maximize(prob);
    if (sol.status != lp::Status::Optimal) throw NonConvergence("Φ-norm LP did not reach optimality");
    out.value = sol.value;
    out.g = std::move(sol.x);
    return out;
}

inline double phi_norm(const PathFunction& f, const NormLimits& lim = {}) {
    return std::max(phi_sup(f, lim).value, phi_sup(-f, lim).value);
}

struct NormReport {
    double l1 = 0.0;
    double phi = 0.0;
    double psi = 0.0;
    double psi_plus = 0.0;
    double psi_minus = 0.0;
};

inline NormReport norm_report(const PathFunction& f, const NormLimits& lim = {}) {
    NormReport r;
    r.l1 = f.l1();
    r.phi = phi_norm(f, lim);
    r.psi_plus = psi_functional(f);
    r.psi_minus = psi_functional(-f);
    r.psi = std::max(r.psi_plus, r.psi_minus);
    return r;
}

struct DominationReport {
    double psi = 0.0;      // Ψ_n(f)
    double phi_sup = 0.0;  // sup_g ⟨f, g⟩
    double slack = 0.0;    // psi − phi_sup
    std::vector<double> maximizer;
    bool dominated = false;
};

// Checks sup_{g ∈ Φ_n} ⟨f, g⟩ ≤ Ψ_n(f) with the LP maximizer.
inline DominationReport check_psi_domination(const PathFunction& f, const NormLimits& lim = {},
                                             double tol = 1e-9) {
    DominationReport r;
    r.psi = psi_functional(f);
    auto sol = phi_sup(f, lim);
    r.phi_sup = sol.value;
    r.maximizer = std::move(sol.g);
    r.slack = r.psi - r.phi_sup;
    r.dominated = r.slack >= -tol;
    return r;
}

// Verifies 0 ≤ g ≤ n and |g(x) − g(y)| ≤ 1 on Hamming-adjacent pairs.
inline bool is_phi_feasible(const FiniteSpace& space, std::size_t n, std::span<const double> g,
                            double tol = 1e-9) {
    const std::size_t k = space.size();
    const double cap = phi_range(space, n);
    if (g.size() != checked_power(k, n)) return false;
    for (double v : g)
        if (v < -tol || v > cap + tol) return false;
    std::size_t stride = 1;
    for (std::size_t c = 0; c < n; ++c, stride *= k)
        for (std::size_t t = 0; t < g.size(); ++t) {
            const std::size_t digit = (t / stride) % k;
            const std::size_t base = t - digit * stride;
            for (std::size_t d = digit + 1; d < k; ++d)
                if (std::abs(g[t] - g[base + d * stride]) > 1.0 + tol) return false;
        }
    return true;
}

}  // namespace mixbound
