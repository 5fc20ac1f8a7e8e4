#ifndef WGF_FOKKER_PLANCK_HPP
#define WGF_FOKKER_PLANCK_HPP

#include <functional>
#include <optional>
#include <string>

#include "wgf/density.hpp"
#include "wgf/potential.hpp"
#include "wgf/transport.hpp"

namespace wgf {

// Transition density of the heat semigroup d rho = Lap rho:
// Gaussian with mean x and variance 2t.
double heat_kernel(double t, double x, double y);

// Transition density of dX = -kappa X dt + sqrt(2) dW:
// Gaussian with mean x e^{-kappa t}, variance (1 - e^{-2 kappa t})/kappa.
double ou_kernel(double kappa, double t, double x, double y);

// Fundamental solution wrapper. For general potentials the evaluator is
// backed by the finite-volume solver started from a single-cell initial
// condition (slow; meant for diagnostics at small n).
struct Kernel {
    enum class Kind { heat, ornstein_uhlenbeck, numerical };
    Kind kind = Kind::heat;
    double kappa = 0.0;
    std::function<double(double t, double x, double y)> evaluator;

    static Kernel heat();
    static Kernel ou(double kappa);
    static Kernel numerical(const Potential& psi, const Grid& grid, double dt);

    std::string name() const;
};

// rho_t(y) = integral p_t(y|x) rho0(dx), renormalized on the grid.
// *boundary_mass_out reports the escaping-mass monitor h (rho_1 + rho_n).
DensityMeasure convolve_kernel(const DensityMeasure& rho0, const Kernel& kernel,
                               double t, double* boundary_mass_out = nullptr);

struct FvOptions {
    enum class Scheme { implicit_euler, explicit_euler };
    Scheme scheme = Scheme::implicit_euler;
    std::size_t max_snapshots = 129;  // stored path states incl. endpoints
};

struct FvDiagnostics {
    double max_mass_drift = 0.0;        // max per-step |h sum rho - 1|
    double max_free_energy_increase = 0.0;  // max over steps of F_{k+1}-F_k
    std::size_t steps = 0;
};

// Conservative exponential-fitting finite volume (Chang-Cooper type) for
// d rho = Lap rho + div(rho Psi'), no-flux boundaries. e^{-Psi}/Z is an
// exact discrete steady state of the flux form.
MeasurePath evolve_fv(const DensityMeasure& rho0, const Potential& psi,
                      double t_end, double dt, const FvOptions& opts = {},
                      FvDiagnostics* diag = nullptr);

}  // namespace wgf

#endif
