#ifndef WGF_DENSITY_HPP
#define WGF_DENSITY_HPP

#include <cmath>
#include <cstddef>
#include <vector>

#include "wgf/grid.hpp"

namespace wgf {

// Nonnegative cell densities on a Grid with h * sum(values) = 1.
// Normalization is enforced at construction; the tolerance below is what
// consumers may rely on after any sequence of operations.
class DensityMeasure {
  public:
    static constexpr double kMassTolerance = 1e-10;

    DensityMeasure(Grid grid, std::vector<double> values);

    // Adopts already-normalized values verbatim (mass must be within
    // kMassTolerance of 1). Used where rescaling would perturb cell values
    // that must be preserved bit-exactly.
    static DensityMeasure adopt_normalized(Grid grid, std::vector<double> values);

    const Grid& grid() const { return grid_; }
    const std::vector<double>& values() const { return values_; }
    double value(std::size_t i) const { return values_[i]; }
    std::size_t size() const { return values_.size(); }
    double spacing() const { return grid_.spacing(); }

    double total_mass() const;                    // h * sum(values)
    double boundary_mass() const;                 // h * (rho_0 + rho_{n-1})
    double mean() const;
    double second_moment() const;                 // h * sum x_i^2 rho_i

    // Cell masses h*rho_i (copy).
    std::vector<double> masses() const;

  private:
    Grid grid_;
    std::vector<double> values_;
};

// Monotone quantile values X_i ~ F^{-1}((i - 1/2)/m), the alternate chart
// for a probability measure on the line.
class QuantileMeasure {
  public:
    explicit QuantileMeasure(std::vector<double> values);

    const std::vector<double>& values() const { return values_; }
    std::size_t size() const { return values_.size(); }

    double mean() const;
    double second_moment() const;  // (1/m) sum X_i^2

  private:
    std::vector<double> values_;
};

// Positions of N particles; the empirical measure is (1/N) sum delta_{X_k}.
struct ParticleEnsemble {
    std::vector<double> positions;

    std::size_t size() const { return positions.size(); }
    double mean() const;
    double variance() const;
    // Sorted copy of positions = empirical quantiles at u_k = (k - 1/2)/N.
    std::vector<double> sorted_positions() const;
};

// Named measure builders (used everywhere in tests and the CLI).
DensityMeasure gaussian_density(const Grid& grid, double mean, double sigma);
DensityMeasure uniform_density(const Grid& grid, double a, double b);
// Normalized e^{-psi(x)} / Z for a callable potential.
template <typename F>
DensityMeasure boltzmann_density(const Grid& grid, F&& psi) {
    std::vector<double> v(grid.n);
    for (std::size_t i = 0; i < grid.n; ++i) v[i] = std::exp(-psi(grid.center(i)));
    return DensityMeasure(grid, std::move(v));
}

// Chart changes. to_quantile inverts the piecewise-linear CDF at the
// midpoints (i - 1/2)/m; flat CDF stretches are inverted at their midpoint.
QuantileMeasure to_quantile(const DensityMeasure& rho, std::size_t m);

// Deposits each quantile sample's mass 1/m uniformly over the band between
// neighboring sample midpoints, then renormalizes. Mass falling outside the
// grid is clamped to the edge cells; *clipped_mass reports how much.
DensityMeasure from_quantile(const QuantileMeasure& q, const Grid& grid,
                             double* clipped_mass = nullptr);

}  // namespace wgf

#endif
