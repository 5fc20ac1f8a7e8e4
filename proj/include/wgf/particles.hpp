#ifndef WGF_PARTICLES_HPP
#define WGF_PARTICLES_HPP

#include <cstdint>
#include <vector>

#include "wgf/density.hpp"
#include "wgf/fokker_planck.hpp"
#include "wgf/potential.hpp"

namespace wgf {

// Counter-based generator: each particle draws from its own stream derived
// from (seed, k), so results do not depend on evaluation order.
struct NormalStream {
    std::uint64_t state;
    bool have_spare = false;
    double spare = 0.0;

    explicit NormalStream(std::uint64_t seed, std::uint64_t particle);
    double next_uniform();  // (0, 1)
    double next_normal();   // Box-Muller
};

// Euler-Maruyama ensemble for dX = -Psi'(X) dt + sqrt(2) dW, started at the
// N mid-quantiles of rho0 (deterministic initial condition). Throws when a
// particle escapes a 10x safety window around the grid.
ParticleEnsemble simulate(const DensityMeasure& rho0, const Potential& psi,
                          std::size_t N, double tau, double dt,
                          std::uint64_t seed);

struct LlnPoint {
    std::size_t N = 0;
    double w2_error = 0.0;  // median over seeds
};

// Law-of-large-numbers diagnostic: W2 between the empirical measure at time
// tau and the reference rho0 * p_tau, median over 5 seeds per ensemble size.
std::vector<LlnPoint> lln_diagnostic(const DensityMeasure& rho0,
                                     const Potential& psi, const Kernel& kernel,
                                     double tau, const std::vector<std::size_t>& Ns,
                                     std::uint64_t seed);

// Least-squares slope of log(w2_error) against log(N).
double lln_slope(const std::vector<LlnPoint>& points);

}  // namespace wgf

#endif
