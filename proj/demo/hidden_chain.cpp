// Exact mixing matrix of a two-regime hidden chain, next to the bound the
// joint kernel's contraction coefficients give.
#include <cstdio>

#include "mixbound/concentration.hpp"
#include "mixbound/mixing.hpp"
#include "mixbound/process_model.hpp"

using namespace mixbound;

int main() {
    FiniteSpace observed({"low", "high"}), regime({"calm", "busy"});
    const std::size_t n = 6;

    // pair (o, h) has index 2·o + h; the regime persists and shifts emissions
    MarkovKernel step(product_space(observed, regime), {{0.63, 0.07, 0.27, 0.03},
                                                        {0.08, 0.32, 0.12, 0.48},
                                                        {0.63, 0.07, 0.27, 0.03},
                                                        {0.08, 0.32, 0.12, 0.48}});
    std::vector<MarkovKernel> kernels(n - 1, step);
    MMCSpec spec(observed, regime, n, Distribution::uniform(product_space(observed, regime)), kernels);

    auto exact = delta_exact(materialize_mmc(spec));
    auto bound = mmc_delta_bound(mmc_profile(spec));

    std::printf("   i  j     exact    bound\n");
    for (std::size_t i = 1; i < n; ++i)
        for (std::size_t j = i + 1; j <= n; ++j)
            std::printf("  %2zu %2zu  %8.5f %8.5f\n", i, j, exact.at(i, j), bound.at(i, j));
    std::printf("norm: exact %.5f, bound %.5f\n", delta_norm(exact), delta_norm(bound));

    auto cert = slln_tail_bound(n, 0.5, 0.0, delta_norm(exact));
    std::printf("P(|f - Ef| > 0.5) <= %.4f for the occupation fraction\n", cert.probability);
}
