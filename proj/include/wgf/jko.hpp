#ifndef WGF_JKO_HPP
#define WGF_JKO_HPP

#include <cstddef>
#include <vector>

#include "wgf/density.hpp"
#include "wgf/potential.hpp"
#include "wgf/transport.hpp"

namespace wgf {

// Free energy of the piecewise-uniform reconstruction of a quantile chart:
// gap entropy -(1/m) sum log(m (X_{i+1}-X_i)) plus mean potential energy.
double chart_free_energy(const std::vector<double>& X, const Potential& psi);

struct JkoStepStats {
    double objective = 0.0;        // chart objective at the minimizer
    double chart_f = 0.0;          // chart free energy at the minimizer
    double w2_step = 0.0;          // quantile distance moved this step
    double grad_norm = 0.0;
    std::size_t iters = 0;
    bool converged = false;
};

struct JkoOptions {
    std::size_t m = 1 << 16;   // quantile chart resolution
    double grad_tol = 1e-8;
    std::size_t max_iters = 500;
};

// One minimizing-movement step: minimize F(rho) + W2^2(rho, rho0) / (2 tau)
// over quantile-parametrized measures, warm-started at the chart of rho0.
DensityMeasure jko_step(const DensityMeasure& rho0, const Potential& psi,
                        double tau, std::size_t m, JkoStepStats* stats = nullptr);

// Chart-space inner step (used by jko_flow and the rate module): minimizes
// the same objective starting from and penalized against X0.
std::vector<double> jko_step_chart(const std::vector<double>& X0,
                                   const Potential& psi, double tau,
                                   const JkoOptions& opts, JkoStepStats* stats);

// Iterated scheme; states at times k tau, chart kept across steps.
MeasurePath jko_flow(const DensityMeasure& rho0, const Potential& psi, double tau,
                     std::size_t steps, std::size_t m,
                     std::vector<JkoStepStats>* per_step = nullptr);

}  // namespace wgf

#endif
