#pragma once

// Exact martingale differences, Azuma-type tail bounds and the Δ-norm tail
// bound for empirical measures, together with its inversion into a sample
// size.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "mixbound/errors.hpp"
#include "mixbound/mixing.hpp"
#include "mixbound/norms.hpp"
#include "mixbound/process_model.hpp"

namespace mixbound {

// ‖V_i‖_∞ and ‖V̂_i‖_∞ for i = 1..n (stored 0-based).
struct MartingaleProfile {
    std::vector<double> sup_norms;
    std::vector<double> hat_sup_norms;

    double max_sup() const {
        double m = 0.0;
        for (double v : sup_norms) m = std::max(m, v);
        return m;
    }
};

// Conditional expectations E[f | X_{1:i}] over positive-probability prefixes.
inline MartingaleProfile martingale_profile(const PathMeasure& pm, const PathFunction& f) {
    if (!(pm.space() == f.space()) || pm.horizon() != f.horizon())
        throw SpaceMismatch("measure and function live on different product spaces");
    const std::size_t n = pm.horizon(), k = pm.space().size();

    // level[i] holds (mass, Σ p·f) for every prefix of length i.
    std::vector<std::vector<double>> mass(n + 1), moment(n + 1);
    mass[n].assign(pm.probs().begin(), pm.probs().end());
    moment[n].resize(mass[n].size());
    for (std::size_t t = 0; t < mass[n].size(); ++t) moment[n][t] = mass[n][t] * f[t];
    for (std::size_t i = n; i-- > 0;) {
        const std::size_t count = mass[i + 1].size() / k;
        mass[i].assign(count, 0.0);
        moment[i].assign(count, 0.0);
        for (std::size_t a = 0; a < count; ++a)
            for (std::size_t s = 0; s < k; ++s) {
                mass[i][a] += mass[i + 1][a * k + s];
                moment[i][a] += moment[i + 1][a * k + s];
            }
    }
    auto cond = [&](std::size_t i, std::size_t a) { return moment[i][a] / mass[i][a]; };

    MartingaleProfile out;
    out.sup_norms.assign(n, 0.0);
    out.hat_sup_norms.assign(n, 0.0);
    for (std::size_t i = 1; i <= n; ++i) {
        double v = 0.0, vhat = 0.0;
        for (std::size_t y = 0; y < mass[i - 1].size(); ++y) {
            if (!(mass[i - 1][y] > 0.0)) continue;
            const double parent = cond(i - 1, y);
            for (std::size_t w = 0; w < k; ++w) {
                const std::size_t a = y * k + w;
                if (!(mass[i][a] > 0.0)) continue;
                v = std::max(v, std::abs(cond(i, a) - parent));
                for (std::size_t w2 = w + 1; w2 < k; ++w2) {
                    const std::size_t b = y * k + w2;
                    if (mass[i][b] > 0.0) vhat = std::max(vhat, std::abs(cond(i, a) - cond(i, b)));
                }
            }
        }
        out.sup_norms[i - 1] = v;
        out.hat_sup_norms[i - 1] = vhat;
    }
    return out;
}

// P(|f − Ef| > t) ≤ 2·exp(−t² / (2 Σ ‖V_i‖²_∞)).
inline double azuma_bound(const MartingaleProfile& profile, double t) {
    if (!(t >= 0.0)) throw DomainError("deviation t must be non-negative");
    double s = 0.0;
    for (double v : profile.sup_norms) s += v * v;
    if (s == 0.0) return t == 0.0 ? 2.0 : 0.0;
    return 2.0 * std::exp(-t * t / (2.0 * s));
}

// Every difference replaced by the largest one.
inline MartingaleProfile uniform_profile(const MartingaleProfile& p) {
    MartingaleProfile u = p;
    const double h = p.max_sup();
    std::fill(u.sup_norms.begin(), u.sup_norms.end(), h);
    return u;
}

struct MartingaleBoundReport {
    double lipschitz = 0.0;
    double delta_norm = 0.0;
    MartingaleProfile profile;
    std::vector<double> slacks;  // Lip·‖Δ‖ − ‖V_i‖_∞
    bool holds = false;
};

// Checks max_i ‖V_i‖_∞ ≤ Lip(f)·‖Δ_n‖_∞.
inline MartingaleBoundReport check_mgale_bound(const PathMeasure& pm, const PathFunction& f,
                                               const MixingMatrix& m, double tol = 1e-9) {
    if (m.size() != pm.horizon()) throw LengthMismatch("mixing matrix size differs from horizon");
    MartingaleBoundReport r;
    r.lipschitz = lipschitz_constant(f);
    r.delta_norm = delta_norm(m);
    r.profile = martingale_profile(pm, f);
    r.holds = true;
    for (double v : r.profile.sup_norms) {
        r.slacks.push_back(r.lipschitz * r.delta_norm - v);
        if (r.slacks.back() < -tol) r.holds = false;
    }
    return r;
}

enum class CertificateSource { AzumaExact, DeltaExact, DeltaContraction, DeltaMinorization };

inline const char* to_string(CertificateSource s) {
    switch (s) {
        case CertificateSource::AzumaExact: return "AzumaExact";
        case CertificateSource::DeltaExact: return "DeltaExact";
        case CertificateSource::DeltaContraction: return "DeltaContraction";
        case CertificateSource::DeltaMinorization: return "DeltaMinorization";
    }
    return "?";
}

// Asserts P(|P̂_n(A) − ν(A)| > t + ε) ≤ bound for every n beyond the
// caller's n₀(ε). `bound` is the raw formula value in (0, 2]; `probability`
// caps it at 1 and `clipped` records that the cap was active.
struct ConcentrationCertificate {
    std::size_t n = 0;
    double t = 0.0;
    double epsilon = 0.0;
    double delta_norm = 1.0;
    double bound = 2.0;
    double probability = 1.0;
    bool clipped = true;
    CertificateSource source = CertificateSource::DeltaExact;
};

// 2·exp(−n t² / (2 ‖Δ_n‖²_∞)).
inline double slln_tail_value(std::size_t n, double t, double delta_norm) {
    return 2.0 * std::exp(-static_cast<double>(n) * t * t / (2.0 * delta_norm * delta_norm));
}

inline ConcentrationCertificate slln_tail_bound(std::size_t n, double t, double epsilon,
                                                double delta_norm,
                                                CertificateSource source = CertificateSource::DeltaExact) {
    if (n == 0) throw DomainError("horizon must be positive");
    if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("deviation t must be finite and >= 0");
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw DomainError("epsilon must be finite and >= 0");
    if (!(delta_norm >= 1.0) || !std::isfinite(delta_norm))
        throw DomainError("mixing-matrix norm must be finite and >= 1");
    if (source == CertificateSource::AzumaExact)
        throw DomainError("the Δ-norm tail bound needs a Δ source");
    ConcentrationCertificate c;
    c.n = n;
    c.t = t;
    c.epsilon = epsilon;
    c.delta_norm = delta_norm;
    c.source = source;
    c.bound = std::clamp(slln_tail_value(n, t, delta_norm), 0.0, 2.0);
    c.probability = std::min(c.bound, 1.0);
    c.clipped = c.bound > 1.0;
    return c;
}

// 1 + θ + … + θ^{n−1}, the norm of Δ_n with entries θ^{j−i}. θ = 1 yields
// the vacuous value n.
inline double geometric_delta_norm(double theta, std::size_t n) {
    if (!(theta >= 0.0 && theta <= 1.0)) throw DomainError("theta must lie in [0,1]");
    if (n == 0) throw DomainError("horizon must be positive");
    if (theta == 1.0) return static_cast<double>(n);
    return (1.0 - std::pow(theta, static_cast<double>(n))) / (1.0 - theta);
}

// Horizon-free cap 1/(1 − θ).
inline double geometric_delta_cap(double theta) {
    if (!(theta >= 0.0 && theta < 1.0)) throw DomainError("theta must lie in [0,1)");
    return 1.0 / (1.0 - theta);
}

// Smallest n with 2·exp(−n t² / (2M²)) ≤ δ, M = 1/(1 − θ_cap).
inline std::size_t sample_size(double t, double epsilon, double delta, double theta_cap) {
    if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("deviation t must be positive");
    if (!(epsilon >= 0.0)) throw DomainError("epsilon must be non-negative");
    if (!(delta > 0.0)) throw DomainError("confidence delta must be positive");
    const double M = geometric_delta_cap(theta_cap);
    if (delta >= 2.0) return 1;
    const double raw = std::ceil(2.0 * M * M * std::log(2.0 / delta) / (t * t));
    if (!(raw < 1e18)) throw DomainError("required sample size overflows");
    std::size_t n = std::max<std::size_t>(1, static_cast<std::size_t>(raw));
    while (n > 1 && slln_tail_value(n - 1, t, M) <= delta) --n;
    while (slln_tail_value(n, t, M) > delta) ++n;
    return n;
}

// Σ_{n ≥ 1} 2·exp(−n t²/(2M²)) is geometric; compares a partial sum with the
// closed form.
struct BoundSeries {
    double partial = 0.0;
    double last_term = 0.0;
    double limit = 0.0;
};

inline BoundSeries bound_series(double t, double theta_cap, std::size_t terms) {
    if (!(t > 0.0)) throw DomainError("deviation t must be positive");
    const double M = geometric_delta_cap(theta_cap);
    const double r = std::exp(-t * t / (2.0 * M * M));
    BoundSeries s;
    s.limit = 2.0 * r / (1.0 - r);
    for (std::size_t n = 1; n <= terms; ++n) {
        s.last_term = slln_tail_value(n, t, M);
        s.partial += s.last_term;
    }
    return s;
}

}  // namespace mixbound
