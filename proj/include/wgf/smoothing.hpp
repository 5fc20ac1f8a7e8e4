#ifndef WGF_SMOOTHING_HPP
#define WGF_SMOOTHING_HPP

#include "wgf/density.hpp"

namespace wgf {

// Gaussian mollification rho * theta_eps with kernel standard deviation eps,
// renormalized on the grid. Throws when eps < h/2 (kernel under-resolved).
DensityMeasure mollify(const DensityMeasure& rho, double eps);

// Tail-splice recovery construction: mollified interior of rho1 glued to the
// exact tails of rho0 with quadratic blending ramps over [M, M+a],
// a = min(1, (x_max - M)/2). Output values are bit-identical to rho0 beyond
// |x| > M + a and strictly positive on [-M, M].
DensityMeasure tail_splice(const DensityMeasure& rho0, const DensityMeasure& rho1,
                           double M, double eps);

}  // namespace wgf

#endif
