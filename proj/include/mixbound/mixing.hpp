#pragma once

// η-mixing coefficients, computed exactly from a path measure or bounded
// through kernel contraction coefficients.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mixbound/errors.hpp"
#include "mixbound/process_model.hpp"
#include "mixbound/space.hpp"

namespace mixbound {

inline double tv_distance(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) throw SpaceMismatch("total variation needs equal-length vectors");
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) acc += std::abs(p[i] - q[i]);
    return std::min(1.0, 0.5 * acc);
}

inline double tv_distance(const Distribution& p, const Distribution& q) {
    if (!(p.space() == q.space())) throw SpaceMismatch("distributions live on different spaces");
    return tv_distance(p.weights(), q.weights());
}

enum class MixingProvenance { Exact, ContractionBound, AdaptiveBound, MinorizationBound };

inline const char* to_string(MixingProvenance p) {
    switch (p) {
        case MixingProvenance::Exact: return "Exact";
        case MixingProvenance::ContractionBound: return "ContractionBound";
        case MixingProvenance::AdaptiveBound: return "AdaptiveBound";
        case MixingProvenance::MinorizationBound: return "MinorizationBound";
    }
    return "?";
}

// Upper-triangular Δ_n with unit diagonal. Indices are 1-based.
class MixingMatrix {
public:
    MixingMatrix(std::size_t n, MixingProvenance provenance)
        : n_(n), provenance_(provenance), entries_(n * n, 0.0) {
        if (n == 0) throw DomainError("mixing matrix needs n >= 1");
        for (std::size_t i = 0; i < n; ++i) entries_[i * n + i] = 1.0;
    }

    std::size_t size() const noexcept { return n_; }
    MixingProvenance provenance() const noexcept { return provenance_; }

    double at(std::size_t i, std::size_t j) const {
        check(i, j);
        return j < i ? 0.0 : entries_[(i - 1) * n_ + (j - 1)];
    }

    void set(std::size_t i, std::size_t j, double eta) {
        check(i, j);
        if (i >= j) throw IndexOutOfRange("only entries above the diagonal are settable");
        if (!(eta >= -1e-12 && eta <= 1.0 + 1e-12))
            throw DomainError("mixing coefficient " + std::to_string(eta) + " outside [0,1]");
        entries_[(i - 1) * n_ + (j - 1)] = std::clamp(eta, 0.0, 1.0);
    }

private:
    void check(std::size_t i, std::size_t j) const {
        if (i < 1 || j < 1 || i > n_ || j > n_) throw IndexOutOfRange("matrix index outside 1..n");
    }

    std::size_t n_;
    MixingProvenance provenance_;
    std::vector<double> entries_;
};

// ℓ∞ operator norm: the largest row sum 1 + Σ_{j>i} η̄_ij.
inline double delta_norm(const MixingMatrix& m) {
    const std::size_t n = m.size();
    double best = 1.0;
    for (std::size_t i = 1; i < n; ++i) {
        double row = 1.0;
        for (std::size_t j = i + 1; j <= n; ++j) row += m.at(i, j);
        best = std::max(best, row);
    }
    return best;
}

// η̄_ij: the largest total-variation distance between the laws of X_{j:n}
// given two positive-probability histories that differ only at coordinate i.
inline double eta_exact(const PathMeasure& pm, std::size_t i, std::size_t j) {
    const std::size_t n = pm.horizon(), k = pm.space().size();
    if (!(1 <= i && i < j && j <= n)) throw IndexOutOfRange("eta needs 1 <= i < j <= n");
    const std::size_t prefixes = checked_power(k, i);
    const std::size_t block = checked_power(k, n - i);
    const std::size_t suffixes = checked_power(k, n - j + 1);
    const std::size_t mids = block / suffixes;
    const auto probs = pm.probs();

    std::vector<double> mass(prefixes, 0.0);
    std::vector<double> laws(prefixes * suffixes, 0.0);
    for (std::size_t a = 0; a < prefixes; ++a) {
        double* law = laws.data() + a * suffixes;
        for (std::size_t mid = 0; mid < mids; ++mid)
            for (std::size_t s = 0; s < suffixes; ++s) law[s] += probs[a * block + mid * suffixes + s];
        for (std::size_t s = 0; s < suffixes; ++s) mass[a] += law[s];
        if (mass[a] > 0.0)
            for (std::size_t s = 0; s < suffixes; ++s) law[s] /= mass[a];
    }

    double best = 0.0;
    for (std::size_t y = 0; y < prefixes / k; ++y)
        for (std::size_t w = 0; w < k; ++w) {
            const std::size_t a = y * k + w;
            if (!(mass[a] > 0.0)) continue;
            for (std::size_t w2 = w + 1; w2 < k; ++w2) {
                const std::size_t b = y * k + w2;
                if (!(mass[b] > 0.0)) continue;
                best = std::max(best, tv_distance(std::span<const double>(laws).subspan(a * suffixes, suffixes),
                                                  std::span<const double>(laws).subspan(b * suffixes, suffixes)));
            }
        }
    return best;
}

inline MixingMatrix delta_exact(const PathMeasure& pm) {
    const std::size_t n = pm.horizon();
    MixingMatrix m(n, MixingProvenance::Exact);
    for (std::size_t i = 1; i < n; ++i)
        for (std::size_t j = i + 1; j <= n; ++j) m.set(i, j, eta_exact(pm, i, j));
    return m;
}

// Dobrushin coefficient: the largest TV distance between two kernel rows.
inline double contraction_coefficient(const MarkovKernel& k) {
    double best = 0.0;
    for (std::size_t a = 0; a < k.rows(); ++a)
        for (std::size_t b = a + 1; b < k.rows(); ++b)
            best = std::max(best, tv_distance(k.row(a), k.row(b)));
    return best;
}

// TV of product measures is at most α + β − αβ.
inline double tensorize(double alpha, double beta) {
    if (!(alpha >= 0.0 && alpha <= 1.0 && beta >= 0.0 && beta <= 1.0))
        throw DomainError("tensorize needs arguments in [0,1]");
    return 1.0 - (1.0 - alpha) * (1.0 - beta);
}

inline double minorization_theta(double m0) {
    if (!(m0 > 0.0 && m0 <= 1.0)) throw DomainError("minorization constant must lie in (0,1]");
    return 1.0 - m0;
}

struct ContractionProfile {
    std::vector<double> thetas;                      // θ_1..θ_{n-1}
    std::optional<double> kappa;                     // adaptive kernel-family coefficient
    std::vector<double> lambdas;                     // adaptive rule coefficients, one per step
    std::vector<double> alphas, betas;               // product-structure components
    std::optional<double> m0;

    void validate() const {
        for (double t : thetas)
            if (!(t >= 0.0 && t <= 1.0)) throw DomainError("contraction coefficients must lie in [0,1]");
        if (m0) {
            if (!(*m0 > 0.0 && *m0 <= 1.0)) throw DomainError("minorization constant must lie in (0,1]");
            for (double t : thetas)
                if (t > 1.0 - *m0 + 1e-12)
                    throw DomainError("contraction coefficient exceeds 1 - m0");
        }
    }

    std::size_t horizon() const noexcept { return thetas.size() + 1; }
};

inline ContractionProfile chain_profile(const ChainSpec& spec) {
    ContractionProfile p;
    for (const auto& k : spec.kernels()) p.thetas.push_back(contraction_coefficient(k));
    return p;
}

inline ContractionProfile mmc_profile(const MMCSpec& spec) {
    return chain_profile(spec.joint_chain());
}

// η̄_ij ≤ θ_i θ_{i+1} ⋯ θ_{j−1}.
inline MixingMatrix mmc_delta_bound(const ContractionProfile& profile,
                                    MixingProvenance provenance = MixingProvenance::ContractionBound) {
    profile.validate();
    const std::size_t n = profile.horizon();
    MixingMatrix m(n, provenance);
    for (std::size_t i = 1; i < n; ++i) {
        double prod = 1.0;
        for (std::size_t j = i + 1; j <= n; ++j) {
            prod *= profile.thetas[j - 2];
            m.set(i, j, prod);
        }
    }
    return m;
}

// κ over the kernel family, λ_i over each adaptation rule, θ_i = κ ⊕ λ_i.
inline ContractionProfile adaptive_profile(const AdaptiveChainSpec& spec) {
    std::vector<std::span<const double>> rows;
    for (const auto& k : spec.family())
        for (std::size_t r = 0; r < k.rows(); ++r) rows.push_back(k.row(r));
    double kappa = 0.0;
    for (std::size_t a = 0; a < rows.size(); ++a)
        for (std::size_t b = a + 1; b < rows.size(); ++b)
            kappa = std::max(kappa, tv_distance(rows[a], rows[b]));

    ContractionProfile p;
    p.kappa = kappa;
    for (const auto& g : spec.adaptation()) {
        const double lambda = contraction_coefficient(g);
        p.lambdas.push_back(lambda);
        p.thetas.push_back(tensorize(kappa, lambda));
    }
    return p;
}

// Largest m0 with K(r, ·) ≥ m0·ξ for every row r, clipped to [0,1].
inline double check_minorization(const MarkovKernel& k, const Distribution& xi) {
    if (xi.size() != k.cols())
        throw SpaceMismatch("minorizing measure must live on the kernel's target space");
    double m0 = 1.0;
    for (std::size_t r = 0; r < k.rows(); ++r)
        for (std::size_t s = 0; s < k.cols(); ++s) {
            if (!(xi[s] > 0.0)) continue;
            if (k(r, s) == 0.0) return 0.0;
            m0 = std::min(m0, k(r, s) / xi[s]);
        }
    return std::clamp(m0, 0.0, 1.0);
}

struct Minorization {
    std::vector<double> xi;  // normalized column minima (uniform when m0 = 0)
    double m0 = 0.0;
};

// Column minima over every row of every kernel; normalizing them gives the
// ξ with the largest uniform minorization constant.
inline Minorization best_minorization(std::span<const MarkovKernel> kernels) {
    if (kernels.empty()) throw DomainError("need at least one kernel");
    const std::size_t cols = kernels.front().cols();
    std::vector<double> floor(cols, 1.0);
    for (const auto& k : kernels) {
        if (k.cols() != cols) throw SpaceMismatch("kernels must share a target space");
        for (std::size_t r = 0; r < k.rows(); ++r)
            for (std::size_t s = 0; s < cols; ++s) floor[s] = std::min(floor[s], k(r, s));
    }
    Minorization out;
    for (double v : floor) out.m0 += v;
    out.m0 = std::min(out.m0, 1.0);
    if (out.m0 > 0.0) {
        out.xi = floor;
        for (double& v : out.xi) v /= out.m0;
    } else {
        out.xi.assign(cols, 1.0 / static_cast<double>(cols));
    }
    return out;
}

inline Minorization best_minorization(const MarkovKernel& k) {
    return best_minorization(std::span<const MarkovKernel>(&k, 1));
}

}  // namespace mixbound
