#ifndef WGF_FUNCTIONALS_HPP
#define WGF_FUNCTIONALS_HPP

#include "wgf/density.hpp"
#include "wgf/potential.hpp"

namespace wgf {

// Coverage report for the quotient functionals: how much mass sat in cells
// below the density floor (excluded from the sum). reliable is false when
// more than half the mass was floored.
struct FloorDiagnostics {
    double floored_mass = 0.0;
    bool reliable = true;
};

// S(rho) = integral rho log rho, with 0 log 0 = 0.
double entropy(const DensityMeasure& rho);

// E(rho) = integral Psi d rho.
double internal_energy(const DensityMeasure& rho, const Potential& psi);

// F = S + E.
double free_energy(const DensityMeasure& rho, const Potential& psi);

// integral (rho')^2 / rho, central differences; floored cells contribute 0.
double fisher_information(const DensityMeasure& rho,
                          FloorDiagnostics* diag = nullptr);

// H(rho|sigma) = integral rho log(rho/sigma); +infinity when rho has mass
// where sigma vanishes (absolute-continuity failure).
double relative_entropy(const DensityMeasure& rho, const DensityMeasure& sigma);

double second_moment(const DensityMeasure& rho);

}  // namespace wgf

#endif
