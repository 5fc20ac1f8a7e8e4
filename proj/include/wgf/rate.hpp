#ifndef WGF_RATE_HPP
#define WGF_RATE_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "wgf/density.hpp"
#include "wgf/fokker_planck.hpp"
#include "wgf/potential.hpp"
#include "wgf/transport.hpp"

namespace wgf {

// Joint mass per cell pair on a shared grid (row = source cell).
struct Coupling {
    Grid grid;
    std::vector<double> gamma;  // n*n row-major

    double total_mass() const;
    double row_marginal_l1_error(const DensityMeasure& rho0) const;
    double col_marginal_l1_error(const DensityMeasure& rho1) const;
};

struct RateReport {
    double tau = 0.0;
    std::string method;           // "static" or "dynamic"
    double j = 0.0;               // the method's rate value
    double action_term = 0.0;     // (1/4 tau) int ||d rho/dt||^2 (dynamic only)
    double fisher_term = 0.0;     // (tau/4) int ||grad F||^2 (dynamic only)
    double delta_f = 0.0;         // (F(rho1) - F(rho0)) / 2
    double w2_sq = 0.0;
    double gamma_gap = 0.0;       // j - w2_sq/(4 tau) - delta_f
    double first_order_gap = 0.0; // tau j - w2_sq/4
    std::size_t iters = 0;        // IPFP sweeps / BCD sweeps
    double marginal_err = 0.0;    // static only
};

struct StaticRateResult {
    double j = 0.0;
    Coupling coupling;
    std::size_t sweeps = 0;
    double marginal_err = 0.0;
};

struct StaticRateOptions {
    double tol = 1e-9;            // L1 marginal stopping tolerance
    std::size_t max_sweeps = 100000;
    bool want_coupling = true;
    std::vector<double>* j_trace = nullptr;  // per-sweep values (testing)
};

// Entropic projection J_tau = inf { H(gamma | rho0 x p_tau) } over couplings
// with the given marginals, by log-domain iterative proportional fitting.
StaticRateResult j_static(const DensityMeasure& rho0, const DensityMeasure& rho1,
                          const Kernel& kernel, double tau,
                          const StaticRateOptions& opts = {});

struct DynamicRateOptions {
    std::size_t K = 16;           // time intervals
    std::size_t m = 384;          // chart resolution; keep below the grid n
    double action_tol = 1e-7;     // relative decrease stopping
    std::size_t max_sweeps = 500;
    std::size_t m_eval = 1 << 14; // quantile resolution for the reported W2
};

struct DynamicRateResult {
    RateReport report;
    MeasurePath path;  // optimized path with chart rows
};

// Path-space rate: minimizes the three-term action over quantile-chart paths
// with fixed endpoints, initialized at the displacement geodesic. The value
// is an upper bound on the discrete infimum.
DynamicRateResult j_dynamic(const DensityMeasure& rho0, const DensityMeasure& rho1,
                            const Potential& psi, double tau,
                            const DynamicRateOptions& opts = {});

// (1/4 tau) sum_k dt ||(rho_{k+1}-rho_k)/dt - tau (Lap rho + div(rho Psi'))||^2
// evaluated at interval midpoints of a charted path; the un-expanded form of
// the rate integrand, used to cross-check the three-term decomposition.
double unexpanded_rate_integrand(const MeasurePath& path, const Potential& psi,
                                 double tau);

enum class RateMethod { static_ipfp, dynamic_action };

struct GammaSweepOptions {
    StaticRateOptions static_opts;
    DynamicRateOptions dynamic_opts;
};

struct GammaSweepResult {
    std::vector<RateReport> reports;          // one per tau, order as given
    double extrapolated_gamma_gap = 0.0;      // linear-in-tau Richardson limit
    double extrapolated_first_order_gap = 0.0;
};

// Evaluates J_tau over a decreasing tau ladder and extrapolates both gap
// sequences to tau -> 0. Static method requires Psi in {zero, quadratic}.
GammaSweepResult gamma_sweep(const DensityMeasure& rho0, const DensityMeasure& rho1,
                             const Potential& psi, const std::vector<double>& taus,
                             RateMethod method, const GammaSweepOptions& opts = {});

}  // namespace wgf

#endif
