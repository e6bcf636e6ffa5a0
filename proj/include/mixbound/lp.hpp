#pragma once

// Dense primal simplex for   maximize c·x   s.t.   A x ≤ b,  x ≥ 0,  b ≥ 0.
// With b ≥ 0 the slack basis is feasible, so no phase one is needed. Pivots
// follow Bland's rule, which cannot cycle.

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "mixbound/errors.hpp"

namespace mixbound::lp {

struct Problem {
    std::size_t vars = 0;
    std::vector<double> objective;           // size vars
    std::vector<std::vector<double>> rows;   // each size vars
    std::vector<double> rhs;                 // size rows, all ≥ 0

    void add_row(std::vector<double> coeffs, double bound) {
        rows.push_back(std::move(coeffs));
        rhs.push_back(bound);
    }
};

enum class Status { Optimal, Unbounded, IterationLimit };

struct Solution {
    Status status = Status::Optimal;
    double value = 0.0;
    std::vector<double> x;
    std::size_t pivots = 0;
};

inline Solution maximize(const Problem& p, double tol = 1e-11, std::size_t max_pivots = 1'000'000) {
    const std::size_t m = p.rows.size(), nv = p.vars, width = nv + m + 1;
    if (p.objective.size() != nv || p.rhs.size() != m)
        throw DomainError("inconsistent linear program dimensions");

    // Row r < m: constraint r with slack column nv + r; row m: reduced costs.
    std::vector<double> t((m + 1) * width, 0.0);
    auto at = [&](std::size_t r, std::size_t c) -> double& { return t[r * width + c]; };
    std::vector<std::size_t> basis(m);
    for (std::size_t r = 0; r < m; ++r) {
        if (p.rows[r].size() != nv) throw DomainError("constraint row has the wrong width");
        if (p.rhs[r] < 0.0) throw DomainError("right-hand sides must be non-negative");
        for (std::size_t c = 0; c < nv; ++c) at(r, c) = p.rows[r][c];
        at(r, nv + r) = 1.0;
        at(r, width - 1) = p.rhs[r];
        basis[r] = nv + r;
    }
    for (std::size_t c = 0; c < nv; ++c) at(m, c) = -p.objective[c];

    Solution sol;
    for (;;) {
        std::size_t enter = width;
        for (std::size_t c = 0; c + 1 < width; ++c)
            if (at(m, c) < -tol) {
                enter = c;
                break;
            }
        if (enter == width) break;

        std::size_t leave = m;
        double best_ratio = std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < m; ++r) {
            const double a = at(r, enter);
            if (a <= tol) continue;
            const double ratio = at(r, width - 1) / a;
            if (ratio < best_ratio - tol || (std::abs(ratio - best_ratio) <= tol && basis[r] < basis[leave])) {
                best_ratio = ratio;
                leave = r;
            }
        }
        if (leave == m) {
            sol.status = Status::Unbounded;
            return sol;
        }
        if (++sol.pivots > max_pivots) {
            sol.status = Status::IterationLimit;
            return sol;
        }

        const double piv = at(leave, enter);
        for (std::size_t c = 0; c < width; ++c) at(leave, c) /= piv;
        for (std::size_t r = 0; r <= m; ++r) {
            if (r == leave) continue;
            const double f = at(r, enter);
            if (f == 0.0) continue;
            for (std::size_t c = 0; c < width; ++c) at(r, c) -= f * at(leave, c);
        }
        basis[leave] = enter;
    }

    sol.x.assign(nv, 0.0);
    for (std::size_t r = 0; r < m; ++r)
        if (basis[r] < nv) sol.x[basis[r]] = at(r, width - 1);
    sol.value = 0.0;
    for (std::size_t c = 0; c < nv; ++c) sol.value += p.objective[c] * sol.x[c];
    return sol;
}

}  // namespace mixbound::lp
