#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <numeric>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "mixbound/errors.hpp"

namespace mixbound {

// Inputs whose mass deviates from one by less than this are renormalized
// silently; anything further off is rejected.
inline constexpr double kNormalizationTolerance = 1e-10;

using Path = std::vector<std::size_t>;

// Ordered set of opaque state labels. Numerics are index based; labels only
// matter for I/O. Copies share the label storage.
class FiniteSpace {
public:
    FiniteSpace() = default;

    explicit FiniteSpace(std::vector<std::string> labels)
        : labels_(std::make_shared<const std::vector<std::string>>(std::move(labels))) {
        if (labels_->empty()) throw DomainError("state space must be non-empty");
        std::unordered_set<std::string> seen;
        for (const auto& l : *labels_)
            if (!seen.insert(l).second) throw DomainError("duplicate state label '" + l + "'");
    }

    // Space {"0", "1", ..., "size-1"}.
    static FiniteSpace indexed(std::size_t size) {
        std::vector<std::string> labels(size);
        for (std::size_t i = 0; i < size; ++i) labels[i] = std::to_string(i);
        return FiniteSpace(std::move(labels));
    }

    std::size_t size() const noexcept { return labels_ ? labels_->size() : 0; }
    const std::string& label(std::size_t i) const { return labels_->at(i); }
    const std::vector<std::string>& labels() const { return *labels_; }

    std::size_t index_of(const std::string& label) const {
        auto it = std::find(labels_->begin(), labels_->end(), label);
        if (it == labels_->end()) throw DomainError("unknown state label '" + label + "'");
        return static_cast<std::size_t>(it - labels_->begin());
    }

    friend bool operator==(const FiniteSpace& a, const FiniteSpace& b) {
        if (a.labels_ == b.labels_) return true;
        if (!a.labels_ || !b.labels_) return false;
        return *a.labels_ == *b.labels_;
    }

private:
    std::shared_ptr<const std::vector<std::string>> labels_;
};

// Cartesian product a×b; the pair (i, j) has index i·|b| + j.
inline FiniteSpace product_space(const FiniteSpace& a, const FiniteSpace& b) {
    std::vector<std::string> labels;
    labels.reserve(a.size() * b.size());
    for (const auto& x : a.labels())
        for (const auto& y : b.labels()) labels.push_back(x + "|" + y);
    return FiniteSpace(std::move(labels));
}

// |base|^exponent with an overflow guard; returns SIZE_MAX on overflow.
inline std::size_t checked_power(std::size_t base, std::size_t exponent) {
    std::size_t out = 1;
    for (std::size_t i = 0; i < exponent; ++i) {
        if (base != 0 && out > SIZE_MAX / base) return SIZE_MAX;
        out *= base;
    }
    return out;
}

// Lexicographic (first coordinate most significant) encoding of Ω^n.
class PathIndexer {
public:
    PathIndexer(std::size_t alphabet, std::size_t length)
        : alphabet_(alphabet), length_(length), count_(checked_power(alphabet, length)) {}

    std::size_t alphabet() const noexcept { return alphabet_; }
    std::size_t length() const noexcept { return length_; }
    std::size_t count() const noexcept { return count_; }

    std::size_t encode(std::span<const std::size_t> path) const {
        if (path.size() != length_) throw LengthMismatch("path length does not match horizon");
        std::size_t idx = 0;
        for (auto s : path) {
            if (s >= alphabet_) throw IndexOutOfRange("state index out of range");
            idx = idx * alphabet_ + s;
        }
        return idx;
    }

    Path decode(std::size_t index) const {
        Path out(length_);
        for (std::size_t k = length_; k-- > 0;) {
            out[k] = index % alphabet_;
            index /= alphabet_;
        }
        return out;
    }

    // Advances `path` to its lexicographic successor; false after the last.
    bool next(Path& path) const {
        for (std::size_t k = length_; k-- > 0;) {
            if (++path[k] < alphabet_) return true;
            path[k] = 0;
        }
        return false;
    }

private:
    std::size_t alphabet_;
    std::size_t length_;
    std::size_t count_;
};

namespace detail {

inline std::vector<double> validated_weights(std::vector<double> w, std::size_t expected,
                                             const char* what) {
    if (w.size() != expected)
        throw LengthMismatch(std::string(what) + ": expected " + std::to_string(expected) +
                             " weights, got " + std::to_string(w.size()));
    double total = 0.0;
    for (double v : w) {
        if (!std::isfinite(v) || v < 0.0)
            throw InvalidDistribution(std::string(what) + ": weights must be finite and >= 0");
        total += v;
    }
    if (std::abs(total - 1.0) > kNormalizationTolerance)
        throw InvalidDistribution(std::string(what) + ": weights sum to " +
                                  std::to_string(total) + ", not 1");
    for (double& v : w) v /= total;
    return w;
}

}  // namespace detail

class Distribution {
public:
    Distribution(FiniteSpace space, std::vector<double> weights)
        : space_(std::move(space)),
          weights_(detail::validated_weights(std::move(weights), space_.size(), "distribution")) {}

    static Distribution point_mass(FiniteSpace space, std::size_t state) {
        std::vector<double> w(space.size(), 0.0);
        w.at(state) = 1.0;
        return Distribution(std::move(space), std::move(w));
    }

    static Distribution uniform(FiniteSpace space) {
        std::vector<double> w(space.size(), 1.0 / static_cast<double>(space.size()));
        return Distribution(std::move(space), std::move(w));
    }

    const FiniteSpace& space() const noexcept { return space_; }
    std::span<const double> weights() const noexcept { return weights_; }
    double operator[](std::size_t i) const { return weights_[i]; }
    std::size_t size() const noexcept { return weights_.size(); }

private:
    FiniteSpace space_;
    std::vector<double> weights_;
};

// Row-stochastic matrix; row r is the law of the next state given source r.
class MarkovKernel {
public:
    MarkovKernel(FiniteSpace source, FiniteSpace target, std::vector<std::vector<double>> rows)
        : source_(std::move(source)), target_(std::move(target)) {
        if (rows.size() != source_.size())
            throw LengthMismatch("kernel must have one row per source state");
        probs_.reserve(source_.size() * target_.size());
        for (auto& r : rows) {
            auto v = detail::validated_weights(std::move(r), target_.size(), "kernel row");
            probs_.insert(probs_.end(), v.begin(), v.end());
        }
    }

    // Endomorphism of `space`.
    MarkovKernel(const FiniteSpace& space, std::vector<std::vector<double>> rows)
        : MarkovKernel(space, space, std::move(rows)) {}

    static MarkovKernel constant(const FiniteSpace& source, const Distribution& law) {
        std::vector<std::vector<double>> rows(source.size(),
                                              std::vector<double>(law.weights().begin(),
                                                                  law.weights().end()));
        return MarkovKernel(source, law.space(), std::move(rows));
    }

    static MarkovKernel identity(const FiniteSpace& space) {
        std::vector<std::vector<double>> rows(space.size(), std::vector<double>(space.size()));
        for (std::size_t i = 0; i < space.size(); ++i) rows[i][i] = 1.0;
        return MarkovKernel(space, std::move(rows));
    }

    const FiniteSpace& source() const noexcept { return source_; }
    const FiniteSpace& target() const noexcept { return target_; }
    std::size_t rows() const noexcept { return source_.size(); }
    std::size_t cols() const noexcept { return target_.size(); }

    std::span<const double> row(std::size_t r) const {
        return std::span<const double>(probs_).subspan(r * cols(), cols());
    }
    double operator()(std::size_t from, std::size_t to) const { return probs_[from * cols() + to]; }

    Distribution row_distribution(std::size_t r) const {
        auto s = row(r);
        return Distribution(target_, std::vector<double>(s.begin(), s.end()));
    }

    std::vector<std::vector<double>> to_rows() const {
        std::vector<std::vector<double>> out(rows());
        for (std::size_t r = 0; r < rows(); ++r) out[r].assign(row(r).begin(), row(r).end());
        return out;
    }

    bool is_endomorphism() const { return source_ == target_; }

private:
    FiniteSpace source_;
    FiniteSpace target_;
    std::vector<double> probs_;
};

}  // namespace mixbound
