#pragma once

// Finite-state chains induced by partitions of a compact interval, for 1-D
// continuous kernels given as transition densities.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <iterator>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "mixbound/errors.hpp"
#include "mixbound/mixing.hpp"
#include "mixbound/process_model.hpp"
#include "mixbound/space.hpp"

namespace mixbound {

// Cells [lo, b_1), [b_1, b_2), …, [b_{m−1}, hi].
class PartitionSpec {
public:
    PartitionSpec(double lo, double hi, std::vector<double> breakpoints)
        : lo_(lo), hi_(hi), breaks_(std::move(breakpoints)) {
        if (!(lo_ < hi_) || !std::isfinite(lo_) || !std::isfinite(hi_))
            throw DomainError("partition support must be a finite interval lo < hi");
        double prev = lo_;
        for (double b : breaks_) {
            if (!(b > prev)) throw DomainError("breakpoints must be strictly increasing inside (lo, hi)");
            prev = b;
        }
        if (!breaks_.empty() && !(breaks_.back() < hi_))
            throw DomainError("breakpoints must lie strictly inside (lo, hi)");
    }

    static PartitionSpec uniform(double lo, double hi, std::size_t cells) {
        if (cells == 0) throw DomainError("partition needs at least one cell");
        std::vector<double> b;
        for (std::size_t k = 1; k < cells; ++k)
            b.push_back(lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(cells));
        return PartitionSpec(lo, hi, std::move(b));
    }

    double lo() const noexcept { return lo_; }
    double hi() const noexcept { return hi_; }
    const std::vector<double>& breakpoints() const noexcept { return breaks_; }
    std::size_t cells() const noexcept { return breaks_.size() + 1; }
    double left(std::size_t k) const { return k == 0 ? lo_ : breaks_.at(k - 1); }
    double right(std::size_t k) const { return k + 1 == cells() ? hi_ : breaks_.at(k); }

    std::size_t cell_of(double x) const {
        return static_cast<std::size_t>(std::upper_bound(breaks_.begin(), breaks_.end(), x) - breaks_.begin());
    }

    friend bool operator==(const PartitionSpec&, const PartitionSpec&) = default;

private:
    double lo_, hi_;
    std::vector<double> breaks_;
};

// The coarsest common refinement: the sorted union of breakpoints.
inline PartitionSpec refine(const PartitionSpec& a, const PartitionSpec& b) {
    if (a.lo() != b.lo() || a.hi() != b.hi()) throw SupportMismatch("partitions cover different intervals");
    std::vector<double> u;
    std::set_union(a.breakpoints().begin(), a.breakpoints().end(), b.breakpoints().begin(),
                   b.breakpoints().end(), std::back_inserter(u));
    u.erase(std::unique(u.begin(), u.end()), u.end());
    return PartitionSpec(a.lo(), a.hi(), std::move(u));
}

// True when every cell of `fine` lies inside a single cell of `coarse`.
inline bool refines(const PartitionSpec& fine, const PartitionSpec& coarse) {
    if (fine.lo() != coarse.lo() || fine.hi() != coarse.hi()) return false;
    for (std::size_t k = 0; k < fine.cells(); ++k) {
        const std::size_t c = coarse.cell_of(fine.left(k));
        if (fine.right(k) > coarse.right(c)) return false;
    }
    return true;
}

struct DeclaredMinorization {
    double m0 = 0.0;
    std::function<double(double)> xi;  // density on the support
};

struct ContinuousKernel1D {
    std::string name;
    double lo = 0.0, hi = 1.0;
    std::function<double(double, double)> density;  // k(x, y), a density in y
    std::optional<DeclaredMinorization> minorization;
    // Optional y ↦ k(x, y) for a fixed source x, hoisting per-source work.
    std::function<std::function<double(double)>(double)> section;

    std::function<double(double)> at(double x) const {
        if (section) return section(x);
        return [this, x](double y) { return density(x, y); };
    }
};

inline double standard_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// AR(1) step y = ρx + σZ conditioned to stay in [lo, hi].
inline ContinuousKernel1D gaussian_ar_kernel(double rho, double sigma, double lo, double hi) {
    if (!(sigma > 0.0)) throw DomainError("gaussian_ar needs sigma > 0");
    if (!(lo < hi)) throw DomainError("support must satisfy lo < hi");
    ContinuousKernel1D k;
    k.name = "gaussian_ar";
    k.lo = lo;
    k.hi = hi;
    k.section = [=](double x) {
        const double mean = rho * x;
        const double z = standard_normal_cdf((hi - mean) / sigma) - standard_normal_cdf((lo - mean) / sigma);
        const double scale = 1.0 / (sigma * std::sqrt(2.0 * std::numbers::pi) * z);
        return std::function<double(double)>([=](double y) {
            const double u = (y - mean) / sigma;
            return scale * std::exp(-0.5 * u * u);
        });
    };
    k.density = [s = k.section](double x, double y) { return s(x)(y); };
    return k;
}

// m0·Uniform[lo, hi] + (1 − m0)·gaussian_ar; declares the uniform floor.
inline ContinuousKernel1D mixture_minorized_kernel(double m0, double rho, double sigma, double lo, double hi) {
    if (!(m0 > 0.0 && m0 <= 1.0)) throw DomainError("mixture_minorized needs m0 in (0,1]");
    auto ar = gaussian_ar_kernel(rho, sigma, lo, hi);
    const double flat = 1.0 / (hi - lo);
    ContinuousKernel1D k;
    k.name = "mixture_minorized";
    k.lo = lo;
    k.hi = hi;
    k.section = [=, s = ar.section](double x) {
        return std::function<double(double)>([=, g = s(x)](double y) { return m0 * flat + (1.0 - m0) * g(y); });
    };
    k.density = [s = k.section](double x, double y) { return s(x)(y); };
    k.minorization = DeclaredMinorization{m0, [flat](double) { return flat; }};
    return k;
}

// y uniform on [x − w, x + w] ∩ [lo, hi].
inline ContinuousKernel1D uniform_jitter_kernel(double width, double lo, double hi) {
    if (!(width > 0.0)) throw DomainError("uniform_jitter needs width > 0");
    ContinuousKernel1D k;
    k.name = "uniform_jitter";
    k.lo = lo;
    k.hi = hi;
    k.density = [=](double x, double y) {
        const double a = std::max(lo, x - width), b = std::min(hi, x + width);
        return (y >= a && y <= b && b > a) ? 1.0 / (b - a) : 0.0;
    };
    return k;
}

// k(x, y) tabulated on a rectangular grid; bilinear in between.
inline ContinuousKernel1D tabulated_kernel(std::vector<double> xs, std::vector<double> ys,
                                           std::vector<double> values) {
    if (xs.size() < 2 || ys.size() < 2) throw DomainError("tabulated kernel needs at least a 2x2 grid");
    if (values.size() != xs.size() * ys.size()) throw LengthMismatch("grid values must be |xs|·|ys|");
    if (!std::is_sorted(xs.begin(), xs.end()) || !std::is_sorted(ys.begin(), ys.end()) ||
        std::adjacent_find(xs.begin(), xs.end()) != xs.end() ||
        std::adjacent_find(ys.begin(), ys.end()) != ys.end())
        throw DomainError("grid coordinates must be strictly increasing");
    if (xs.front() != ys.front() || xs.back() != ys.back())
        throw SupportMismatch("source and target grids must span the same interval");
    for (double v : values)
        if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError("densities must be finite and >= 0");
    ContinuousKernel1D k;
    k.name = "tabulated";
    k.lo = xs.front();
    k.hi = xs.back();
    k.density = [xs = std::move(xs), ys = std::move(ys), v = std::move(values)](double x, double y) {
        auto bracket = [](const std::vector<double>& g, double p) {
            std::size_t i = static_cast<std::size_t>(std::upper_bound(g.begin(), g.end(), p) - g.begin());
            i = std::clamp<std::size_t>(i, 1, g.size() - 1) - 1;
            const double f = std::clamp((p - g[i]) / (g[i + 1] - g[i]), 0.0, 1.0);
            return std::pair{i, f};
        };
        auto [i, fx] = bracket(xs, x);
        auto [j, fy] = bracket(ys, y);
        const std::size_t w = ys.size();
        return (1 - fx) * (1 - fy) * v[i * w + j] + (1 - fx) * fy * v[i * w + j + 1] +
               fx * (1 - fy) * v[(i + 1) * w + j] + fx * fy * v[(i + 1) * w + j + 1];
    };
    return k;
}

using KernelParams = std::map<std::string, double>;

inline double param(const KernelParams& p, const std::string& key, std::optional<double> fallback = {}) {
    if (auto it = p.find(key); it != p.end()) return it->second;
    if (fallback) return *fallback;
    throw DomainError("missing kernel parameter '" + key + "'");
}

// Built-in kernels by name: gaussian_ar(rho, sigma), mixture_minorized(m0,
// rho, sigma), uniform_jitter(width).
inline ContinuousKernel1D make_kernel(const std::string& name, const KernelParams& p, double lo, double hi) {
    if (name == "gaussian_ar") return gaussian_ar_kernel(param(p, "rho"), param(p, "sigma"), lo, hi);
    if (name == "mixture_minorized")
        return mixture_minorized_kernel(param(p, "m0"), param(p, "rho"), param(p, "sigma"), lo, hi);
    if (name == "uniform_jitter") return uniform_jitter_kernel(param(p, "width"), lo, hi);
    throw DomainError("unknown kernel '" + name + "'");
}

struct QuadratureConfig {
    std::size_t points_per_cell = 64;  // midpoint nodes per cell per axis
    double mass_tolerance = 1e-3;
};

// Midpoint-rule integral of a 1-D function over [a, b].
inline double integrate(const std::function<double(double)>& f, double a, double b, std::size_t nodes) {
    const double h = (b - a) / static_cast<double>(nodes);
    double s = 0.0;
    for (std::size_t q = 0; q < nodes; ++q) s += f(a + (static_cast<double>(q) + 0.5) * h);
    return s * h;
}

// Row k' of the induced kernel is P(next ∈ V_k | current uniform on V_k').
inline MarkovKernel induce_kernel(const ContinuousKernel1D& k, const PartitionSpec& p,
                                  const QuadratureConfig& quad = {}) {
    if (p.lo() != k.lo || p.hi() != k.hi) throw SupportMismatch("partition and kernel supports differ");
    const std::size_t m = p.cells(), q = quad.points_per_cell;
    const FiniteSpace space = FiniteSpace::indexed(m);
    std::vector<std::vector<double>> rows(m, std::vector<double>(m, 0.0));
    for (std::size_t a = 0; a < m; ++a) {
        const double xa = p.left(a), hx = (p.right(a) - xa) / static_cast<double>(q);
        for (std::size_t qx = 0; qx < q; ++qx) {
            const double x = xa + (static_cast<double>(qx) + 0.5) * hx;
            const auto row = k.at(x);
            for (std::size_t b = 0; b < m; ++b) {
                const double yb = p.left(b), hy = (p.right(b) - yb) / static_cast<double>(q);
                double s = 0.0;
                for (std::size_t qy = 0; qy < q; ++qy) s += row(yb + (static_cast<double>(qy) + 0.5) * hy);
                rows[a][b] += s * hy / static_cast<double>(q);
            }
        }
        double total = 0.0;
        for (double v : rows[a]) total += v;
        if (!(std::abs(total - 1.0) <= quad.mass_tolerance))
            throw QuadratureFailure("row " + std::to_string(a) + " integrates to " + std::to_string(total));
        for (double& v : rows[a]) v /= total;
    }
    return MarkovKernel(space, std::move(rows));
}

// Homogeneous n-step chain on the cells. A null initial density means uniform
// on the support.
inline ChainSpec induce_chain(const ContinuousKernel1D& k, const PartitionSpec& p, std::size_t steps,
                              const std::function<double(double)>& initial_density = {},
                              const QuadratureConfig& quad = {}) {
    auto kernel = induce_kernel(k, p, quad);
    std::vector<double> init(p.cells());
    for (std::size_t c = 0; c < p.cells(); ++c)
        init[c] = initial_density ? integrate(initial_density, p.left(c), p.right(c), quad.points_per_cell)
                                  : p.right(c) - p.left(c);
    double total = 0.0;
    for (double v : init) total += v;
    if (!(total > 0.0)) throw DomainError("initial density has no mass on the support");
    for (double& v : init) v /= total;
    const auto& space = kernel.source();
    return ChainSpec::homogeneous(space, steps, Distribution(space, std::move(init)), kernel);
}

// ∫_{V_k} ξ for each cell, normalized.
inline std::vector<double> cell_masses(const std::function<double(double)>& density, const PartitionSpec& p,
                                       std::size_t nodes = 64) {
    std::vector<double> out(p.cells());
    double total = 0.0;
    for (std::size_t c = 0; c < p.cells(); ++c) total += out[c] = integrate(density, p.left(c), p.right(c), nodes);
    for (double& v : out) v /= total;
    return out;
}

struct TraceLevel {
    std::size_t cells = 0;
    double theta = 0.0;
    std::optional<double> change;    // |θ − θ_previous|
    double delta_norm = 1.0;         // norm of the n-step contraction bound
    std::vector<double> eta_bounds;  // θ^{j−1} for j = 2..n (first row of Δ_n)
    std::optional<double> m0;        // induced minorization against cell-integrated ξ
};

struct CoefficientTrace {
    std::string kernel;
    std::size_t horizon = 0;
    std::vector<TraceLevel> levels;
    // Feller continuity is assumed, not checked.
    bool feller_assumed = true;
};

inline CoefficientTrace coefficient_trace(const ContinuousKernel1D& k, const std::vector<PartitionSpec>& partitions,
                                          std::size_t n, const QuadratureConfig& quad = {}) {
    if (n < 2) throw DomainError("trace horizon must be at least 2");
    CoefficientTrace trace;
    trace.kernel = k.name;
    trace.horizon = n;
    for (std::size_t l = 0; l < partitions.size(); ++l) {
        if (l > 0 && !refines(partitions[l], partitions[l - 1]))
            throw DomainError("partition " + std::to_string(l) + " does not refine its predecessor");
        auto kernel = induce_kernel(k, partitions[l], quad);
        TraceLevel lv;
        lv.cells = partitions[l].cells();
        lv.theta = contraction_coefficient(kernel);
        if (l > 0) lv.change = std::abs(lv.theta - trace.levels.back().theta);
        ContractionProfile prof;
        prof.thetas.assign(n - 1, lv.theta);
        auto bound = mmc_delta_bound(prof);
        lv.delta_norm = delta_norm(bound);
        for (std::size_t j = 2; j <= n; ++j) lv.eta_bounds.push_back(bound.at(1, j));
        if (k.minorization) {
            auto xi = cell_masses(k.minorization->xi, partitions[l], quad.points_per_cell);
            lv.m0 = check_minorization(kernel, Distribution(kernel.target(), std::move(xi)));
        }
        trace.levels.push_back(std::move(lv));
    }
    return trace;
}

// Same arithmetic as tensorize; the continuous-state product-structure bound.
inline double continuous_tensor_bound(double alpha, double beta) { return tensorize(alpha, beta); }

}  // namespace mixbound
