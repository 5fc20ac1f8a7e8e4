#ifndef WGF_TRANSPORT_HPP
#define WGF_TRANSPORT_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "wgf/density.hpp"
#include "wgf/functionals.hpp"
#include "wgf/potential.hpp"

namespace wgf {

// Monotone rearrangement: target position per source cell center.
struct TransportMap {
    Grid grid;
    std::vector<double> targets;  // T(x_i), nondecreasing
    DensityMeasure source;

    double sup_derivative() const;  // max central difference of T
};

// Velocity field v over a base density; s = -div(rho v) is the tangent vector.
struct TangentField {
    Grid grid;
    std::vector<double> v;
    DensityMeasure base;

    double kinetic_energy() const;  // integral v^2 d rho
};

// Time-indexed family of densities on one grid, optionally carrying the
// quantile chart rows that generated the states.
struct MeasurePath {
    std::vector<double> times;
    std::vector<DensityMeasure> states;
    std::optional<std::vector<std::vector<double>>> chart;  // (K+1) x m, monotone rows

    std::size_t intervals() const { return times.size() - 1; }
    const DensityMeasure& front() const { return states.front(); }
    const DensityMeasure& back() const { return states.back(); }
    void validate() const;  // sizes, increasing times, monotone chart rows
};

// Quadratic Wasserstein distance via quantile quadrature at m midpoints.
double w2(const DensityMeasure& rho0, const DensityMeasure& rho1, std::size_t m);

// T = G^{-1} o F per source cell. Throws when the target CDF is flat over an
// inversion interval wider than 10h.
TransportMap monotone_map(const DensityMeasure& rho0, const DensityMeasure& rho1);

// sup over above-floor cells of |rho0(x) - rho1(T(x)) T'(x)|.
double monge_ampere_residual(const TransportMap& map, const DensityMeasure& rho1);

// Displacement interpolation with K uniform intervals on [0,1]; states are
// deposited from linearly interpolated quantile charts of size m_chart.
MeasurePath geodesic(const DensityMeasure& rho0, const DensityMeasure& rho1,
                     std::size_t K, std::size_t m_chart = 1 << 14);

// Squared weighted dual norm ||s||^2_{-1,rho} = integral S^2 / rho with S the
// antiderivative of s. s must have zero total mass (tangent condition).
double dual_norm_sq(std::span<const double> s, const DensityMeasure& rho,
                    FloorDiagnostics* diag = nullptr);

// Velocity recovery v = -S/rho for the tangent vector s.
TangentField tangent_velocity(std::span<const double> s, const DensityMeasure& rho);

// Metric pairing by polarization of dual_norm_sq.
double dual_pairing(std::span<const double> s1, std::span<const double> s2,
                    const DensityMeasure& rho);

// Riemann sum of ||(rho_{k+1}-rho_k)/dt||^2_{-1} over intervals. Midpoint
// density is the chart midpoint when the path carries a chart, else the
// arithmetic mean of the two states.
double path_action(const MeasurePath& path);

// ||grad F(rho)||^2_{-1,rho} = integral (rho'/rho + Psi')^2 d rho,
// the relative Fisher information.
double grad_free_energy_norm_sq(const DensityMeasure& rho, const Potential& psi,
                                FloorDiagnostics* diag = nullptr);

struct BoundsReport {
    double max_free_energy = 0.0;
    double max_fisher = 0.0;
    double max_drift_energy = 0.0;   // max_t integral |Psi'|^2 d rho_t
    double comparison_constant = 0.0;  // C from sup T', bound C (I0 + I1)
    double sup_tprime = 0.0;
};

// Uniform-in-t bounds of F, Fisher, and drift energy along the geodesic of a
// tail-matched pair (equal values outside some [-M, M]). Throws when the
// inputs are not tail-matched or Psi is not convex on the grid.
BoundsReport geodesic_functional_bounds(const DensityMeasure& rho0,
                                        const DensityMeasure& rho1,
                                        const Potential& psi, std::size_t K,
                                        std::size_t m_chart = 1 << 14);

}  // namespace wgf

#endif
