// Quick look at how the three evaluation paths line up: Gauss-Hermite
// ensemble average, Monte Carlo, and the closed-form damped-rotation model.
// Prints purity of a diagonal input in the compensated cavity.

#include <cstdio>

#include "ringpol/analytic.hpp"
#include "ringpol/engine.hpp"
#include "ringpol/presets.hpp"

int main() {
    using namespace ringpol;

    CavityConfig cavity{Layout::ZCompensated, {}};
    PhaseDistribution dist{kDefaultPhi0, kDefaultSigmaPhi};
    Vec3 input = named_input("D");
    const int n_max = 25;

    EvolutionResult quad = evolve(cavity, dist, QuadratureMethod{128}, input, n_max);
    EvolutionResult mc = evolve(cavity, dist, MonteCarloMethod{200000, 7}, input, n_max);
    ExpansionCoeffs coeffs = expansion_coeffs(cavity, dist.phi0);

    std::printf("# compensated cavity, D input, sigma_phi=%.4f phi0=%.4f\n", dist.sigma_phi,
                dist.phi0);
    std::printf("%4s %12s %12s %12s %12s\n", "n", "quad", "mc", "model", "dephasing");
    for (int i = 0; i < n_max; i += 4) {
        int n = quad.records[std::size_t(i)].n;
        double model = analytic_record(coeffs, dist.sigma_phi, input, n).purity;
        std::printf("%4d %12.8f %12.8f %12.8f %12.8f\n", n, quad.records[std::size_t(i)].purity,
                    mc.records[std::size_t(i)].purity, model, dephasing_purity(n, dist.sigma_phi));
    }
    return 0;
}
