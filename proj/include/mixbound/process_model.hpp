#pragma once

// Chain specifications (plain, marginal-of-bivariate, adaptive) and their
// exact joint path measures.
//
// Coordinates along a path are numbered 1..n in every public signature that
// takes a time index; state indices are 0-based.

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mixbound/errors.hpp"
#include "mixbound/space.hpp"

namespace mixbound {

struct EnumerationLimits {
    std::size_t max_table = 2'000'000;  // dense |Ω|^n entries
};

inline void require_enumerable(std::size_t alphabet, std::size_t n, const EnumerationLimits& lim,
                               const char* what) {
    const std::size_t count = checked_power(alphabet, n);
    if (count > lim.max_table)
        throw EnumerationLimitExceeded(std::string(what) + ": " + std::to_string(alphabet) + "^" +
                                       std::to_string(n) + " paths exceed the limit of " +
                                       std::to_string(lim.max_table));
}

// Inhomogeneous Markov chain X_1..X_n; kernels[i] moves X_{i+1} to X_{i+2}
// (0-based storage, so there are n-1 of them).
class ChainSpec {
public:
    ChainSpec(FiniteSpace space, std::size_t horizon, Distribution initial,
              std::vector<MarkovKernel> kernels)
        : space_(std::move(space)), n_(horizon), initial_(std::move(initial)),
          kernels_(std::move(kernels)) {
        if (n_ == 0) throw DomainError("horizon must be positive");
        if (!(initial_.space() == space_)) throw SpaceMismatch("initial law is not on the chain space");
        if (kernels_.size() != n_ - 1)
            throw LengthMismatch("chain of horizon " + std::to_string(n_) + " needs " +
                                 std::to_string(n_ - 1) + " kernels, got " +
                                 std::to_string(kernels_.size()));
        for (const auto& k : kernels_)
            if (!(k.source() == space_) || !(k.target() == space_))
                throw SpaceMismatch("chain kernels must be endomorphisms of the chain space");
    }

    static ChainSpec homogeneous(FiniteSpace space, std::size_t horizon, Distribution initial,
                                 const MarkovKernel& kernel) {
        std::vector<MarkovKernel> ks(horizon > 0 ? horizon - 1 : 0, kernel);
        return ChainSpec(std::move(space), horizon, std::move(initial), std::move(ks));
    }

    const FiniteSpace& space() const noexcept { return space_; }
    std::size_t horizon() const noexcept { return n_; }
    const Distribution& initial() const noexcept { return initial_; }
    const std::vector<MarkovKernel>& kernels() const noexcept { return kernels_; }

private:
    FiniteSpace space_;
    std::size_t n_;
    Distribution initial_;
    std::vector<MarkovKernel> kernels_;
};

// Bivariate chain W_t = (X_t, Y_t) on observed×hidden; only X is reported.
// The pair (o, h) has index o·|hidden| + h.
class MMCSpec {
public:
    MMCSpec(FiniteSpace observed, FiniteSpace hidden, std::size_t horizon, Distribution initial,
            std::vector<MarkovKernel> kernels)
        : observed_(std::move(observed)), hidden_(std::move(hidden)),
          joint_(product_space(observed_, hidden_)),
          chain_(joint_, horizon, rebase(initial, joint_), rebase_all(std::move(kernels), joint_)) {}

    const FiniteSpace& observed() const noexcept { return observed_; }
    const FiniteSpace& hidden() const noexcept { return hidden_; }
    const FiniteSpace& joint_space() const noexcept { return joint_; }
    std::size_t horizon() const noexcept { return chain_.horizon(); }
    const Distribution& initial() const noexcept { return chain_.initial(); }
    const std::vector<MarkovKernel>& kernels() const noexcept { return chain_.kernels(); }
    // The underlying Markov chain on the product space.
    const ChainSpec& joint_chain() const noexcept { return chain_; }

private:
    static Distribution rebase(const Distribution& d, const FiniteSpace& joint) {
        if (d.size() != joint.size()) throw SpaceMismatch("initial law must live on observed×hidden");
        return Distribution(joint, std::vector<double>(d.weights().begin(), d.weights().end()));
    }
    static std::vector<MarkovKernel> rebase_all(std::vector<MarkovKernel> ks, const FiniteSpace& joint) {
        std::vector<MarkovKernel> out;
        out.reserve(ks.size());
        for (auto& k : ks) {
            if (k.rows() != joint.size() || k.cols() != joint.size())
                throw SpaceMismatch("MMC kernels must act on observed×hidden");
            out.emplace_back(joint, k.to_rows());
        }
        return out;
    }

    FiniteSpace observed_;
    FiniteSpace hidden_;
    FiniteSpace joint_;
    ChainSpec chain_;
};

// Adaptive chain: X_{i+1} ~ K_{γ_i}(·|x_i) and γ_{i+1} ~ g_i(·|x_i, γ_i),
// started from a joint law on Ω×Γ (pair (x, γ) has index x·|Γ| + γ).
// adaptation[i] is a kernel from Ω×Γ to Γ.
class AdaptiveChainSpec {
public:
    AdaptiveChainSpec(FiniteSpace space, FiniteSpace indices, std::size_t horizon,
                      Distribution initial, std::vector<MarkovKernel> family,
                      std::vector<MarkovKernel> adaptation)
        : space_(std::move(space)), indices_(std::move(indices)),
          joint_(product_space(space_, indices_)), n_(horizon), initial_(std::move(initial)),
          family_(std::move(family)), adaptation_(std::move(adaptation)) {
        if (n_ == 0) throw DomainError("horizon must be positive");
        if (initial_.size() != joint_.size())
            throw SpaceMismatch("adaptive initial law must live on space×indices");
        initial_ = Distribution(joint_, std::vector<double>(initial_.weights().begin(),
                                                            initial_.weights().end()));
        if (family_.size() != indices_.size())
            throw LengthMismatch("every adaptation index needs a kernel");
        for (const auto& k : family_)
            if (k.rows() != space_.size() || k.cols() != space_.size())
                throw SpaceMismatch("family kernels must be endomorphisms of the state space");
        if (adaptation_.size() != n_ - 1)
            throw LengthMismatch("adaptive chain of horizon " + std::to_string(n_) + " needs " +
                                 std::to_string(n_ - 1) + " adaptation rules");
        for (const auto& g : adaptation_)
            if (g.rows() != joint_.size() || g.cols() != indices_.size())
                throw SpaceMismatch("adaptation rules map space×indices to indices");
    }

    const FiniteSpace& space() const noexcept { return space_; }
    const FiniteSpace& indices() const noexcept { return indices_; }
    const FiniteSpace& joint_space() const noexcept { return joint_; }
    std::size_t horizon() const noexcept { return n_; }
    const Distribution& initial() const noexcept { return initial_; }
    const std::vector<MarkovKernel>& family() const noexcept { return family_; }
    const std::vector<MarkovKernel>& adaptation() const noexcept { return adaptation_; }

    // The equivalent MMC with observed = Ω and hidden = Γ.
    MMCSpec to_mmc() const {
        const std::size_t nx = space_.size(), ng = indices_.size(), nw = nx * ng;
        std::vector<MarkovKernel> ks;
        ks.reserve(n_ - 1);
        for (std::size_t i = 0; i + 1 < n_; ++i) {
            std::vector<std::vector<double>> rows(nw, std::vector<double>(nw, 0.0));
            for (std::size_t x = 0; x < nx; ++x)
                for (std::size_t g = 0; g < ng; ++g) {
                    const std::size_t from = x * ng + g;
                    for (std::size_t x2 = 0; x2 < nx; ++x2)
                        for (std::size_t g2 = 0; g2 < ng; ++g2)
                            rows[from][x2 * ng + g2] = adaptation_[i](from, g2) * family_[g](x, x2);
                }
            ks.emplace_back(joint_, std::move(rows));
        }
        return MMCSpec(space_, indices_, n_, initial_, std::move(ks));
    }

private:
    FiniteSpace space_;
    FiniteSpace indices_;
    FiniteSpace joint_;
    std::size_t n_;
    Distribution initial_;
    std::vector<MarkovKernel> family_;
    std::vector<MarkovKernel> adaptation_;
};

// Dense joint law on Ω^n in lexicographic path order.
class PathMeasure {
public:
    PathMeasure(FiniteSpace space, std::size_t horizon, std::vector<double> probs)
        : space_(std::move(space)), indexer_(space_.size(), horizon), probs_(std::move(probs)) {
        if (probs_.size() != indexer_.count())
            throw LengthMismatch("path table must have |Ω|^n entries");
        double total = 0.0;
        for (double p : probs_) {
            if (!(p >= 0.0) || !std::isfinite(p)) throw InvalidDistribution("negative path probability");
            total += p;
        }
        if (std::abs(total - 1.0) > kNormalizationTolerance)
            throw InvalidDistribution("path probabilities sum to " + std::to_string(total));
    }

    const FiniteSpace& space() const noexcept { return space_; }
    std::size_t horizon() const noexcept { return indexer_.length(); }
    const PathIndexer& indexer() const noexcept { return indexer_; }
    std::span<const double> probs() const noexcept { return probs_; }
    double prob(std::span<const std::size_t> path) const { return probs_[indexer_.encode(path)]; }

    // P(X_{1:len} = prefix).
    double prefix_probability(std::span<const std::size_t> prefix) const {
        const std::size_t k = space_.size(), n = horizon();
        if (prefix.size() > n) throw LengthMismatch("prefix longer than horizon");
        std::size_t start = 0;
        for (auto s : prefix) {
            if (s >= k) throw IndexOutOfRange("state index out of range");
            start = start * k + s;
        }
        const std::size_t block = checked_power(k, n - prefix.size());
        double total = 0.0;
        for (std::size_t t = 0; t < block; ++t) total += probs_[start * block + t];
        return total;
    }

private:
    FiniteSpace space_;
    PathIndexer indexer_;
    std::vector<double> probs_;
};

inline PathMeasure materialize_chain(const ChainSpec& spec, const EnumerationLimits& lim = {}) {
    const std::size_t k = spec.space().size(), n = spec.horizon();
    require_enumerable(k, n, lim, "materialize_chain");
    std::vector<double> cur(spec.initial().weights().begin(), spec.initial().weights().end());
    for (std::size_t step = 0; step + 1 < n; ++step) {
        const auto& K = spec.kernels()[step];
        std::vector<double> next(cur.size() * k);
        for (std::size_t a = 0; a < cur.size(); ++a) {
            const std::size_t last = a % k;
            for (std::size_t s = 0; s < k; ++s) next[a * k + s] = cur[a] * K(last, s);
        }
        cur = std::move(next);
    }
    return PathMeasure(spec.space(), n, std::move(cur));
}

// Forward recursion over observed prefixes carrying the hidden-state vector.
inline PathMeasure materialize_mmc(const MMCSpec& spec, const EnumerationLimits& lim = {}) {
    const std::size_t no = spec.observed().size(), nh = spec.hidden().size(), n = spec.horizon();
    require_enumerable(no * nh, n, lim, "materialize_mmc");
    // alpha[a * nh + h] = P(X_{1:i} = prefix a, Y_i = h)
    std::vector<double> alpha(spec.initial().weights().begin(), spec.initial().weights().end());
    std::size_t prefixes = no;
    for (std::size_t step = 0; step + 1 < n; ++step) {
        const auto& K = spec.kernels()[step];
        std::vector<double> next(prefixes * no * nh, 0.0);
        for (std::size_t a = 0; a < prefixes; ++a) {
            const std::size_t last = a % no;
            for (std::size_t h = 0; h < nh; ++h) {
                const double mass = alpha[a * nh + h];
                if (mass == 0.0) continue;
                const std::size_t from = last * nh + h;
                for (std::size_t o2 = 0; o2 < no; ++o2)
                    for (std::size_t h2 = 0; h2 < nh; ++h2)
                        next[(a * no + o2) * nh + h2] += mass * K(from, o2 * nh + h2);
            }
        }
        alpha = std::move(next);
        prefixes *= no;
    }
    std::vector<double> probs(prefixes, 0.0);
    for (std::size_t a = 0; a < prefixes; ++a)
        for (std::size_t h = 0; h < nh; ++h) probs[a] += alpha[a * nh + h];
    return PathMeasure(spec.observed(), n, std::move(probs));
}

inline PathMeasure materialize_adaptive(const AdaptiveChainSpec& spec,
                                        const EnumerationLimits& lim = {}) {
    require_enumerable(spec.joint_space().size(), spec.horizon(), lim, "materialize_adaptive");
    return materialize_mmc(spec.to_mmc(), lim);
}

// Joint law of independent blocks P on Ω^m and Q on Ω^k, as a measure on Ω^{m+k}.
inline PathMeasure tensor_product(const PathMeasure& p, const PathMeasure& q,
                                  const EnumerationLimits& lim = {}) {
    if (!(p.space() == q.space())) throw SpaceMismatch("tensor factors must share a state space");
    require_enumerable(p.space().size(), p.horizon() + q.horizon(), lim, "tensor_product");
    std::vector<double> out;
    out.reserve(p.probs().size() * q.probs().size());
    for (double a : p.probs())
        for (double b : q.probs()) out.push_back(a * b);
    return PathMeasure(p.space(), p.horizon() + q.horizon(), std::move(out));
}

// Space Ω^len with comma-joined labels, used for block laws.
inline FiniteSpace block_space(const FiniteSpace& space, std::size_t len) {
    PathIndexer idx(space.size(), len);
    std::vector<std::string> labels;
    labels.reserve(idx.count());
    for (std::size_t t = 0; t < idx.count(); ++t) {
        auto path = idx.decode(t);
        std::string s;
        for (std::size_t c = 0; c < path.size(); ++c) {
            if (c) s += ',';
            s += space.label(path[c]);
        }
        labels.push_back(std::move(s));
    }
    if (labels.empty()) labels.emplace_back("");
    return FiniteSpace(std::move(labels));
}

// Law of X_{from:n} given X_{1:len} = prefix. `from` is 1-based.
inline Distribution conditional_law(const PathMeasure& pm, std::span<const std::size_t> prefix,
                                    std::size_t from) {
    const std::size_t n = pm.horizon(), k = pm.space().size();
    if (prefix.size() > n) throw LengthMismatch("prefix longer than horizon");
    if (from < 1 || from > n) throw IndexOutOfRange("block start must lie in 1..n");
    const double mass = pm.prefix_probability(prefix);
    if (!(mass > 0.0)) throw ZeroProbabilityPrefix("conditioning prefix has probability zero");

    const std::size_t suffix_len = n - from + 1;
    const std::size_t suffix_count = checked_power(k, suffix_len);
    std::vector<double> law(suffix_count, 0.0);
    Path path(n, 0);
    const auto& idx = pm.indexer();
    std::size_t t = 0;
    do {
        const double p = pm.probs()[t++];
        if (p == 0.0) continue;
        bool match = true;
        for (std::size_t c = 0; c < prefix.size() && match; ++c) match = path[c] == prefix[c];
        if (!match) continue;
        std::size_t s = 0;
        for (std::size_t c = from - 1; c < n; ++c) s = s * k + path[c];
        law[s] += p / mass;
    } while (idx.next(path));
    double total = 0.0;
    for (double v : law) total += v;
    for (double& v : law) v /= total;
    return Distribution(block_space(pm.space(), suffix_len), std::move(law));
}

}  // namespace mixbound
