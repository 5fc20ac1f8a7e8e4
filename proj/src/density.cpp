#include "wgf/density.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "wgf/numerics.hpp"

namespace wgf {

DensityMeasure::DensityMeasure(Grid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.n)
        throw std::invalid_argument("DensityMeasure: value count != grid cells");
    for (double v : values_) {
        if (!(v >= 0.0) || !std::isfinite(v))
            throw std::invalid_argument(
                "DensityMeasure: values must be finite and nonnegative");
    }
    const double mass = grid_.spacing() * pairwise_sum(values_);
    if (!(mass > 0.0))
        throw std::invalid_argument("DensityMeasure: total mass must be positive");
    const double inv = 1.0 / mass;
    for (double& v : values_) v *= inv;
}

DensityMeasure DensityMeasure::adopt_normalized(Grid grid, std::vector<double> values) {
    DensityMeasure out(grid, values);  // validates shape and sign
    const double mass = grid.spacing() * pairwise_sum(values);
    if (std::abs(mass - 1.0) > kMassTolerance)
        throw std::invalid_argument(
            "DensityMeasure::adopt_normalized: mass deviates from 1 beyond tolerance");
    out.values_ = std::move(values);
    return out;
}

double DensityMeasure::total_mass() const {
    return grid_.spacing() * pairwise_sum(values_);
}

double DensityMeasure::boundary_mass() const {
    return grid_.spacing() * (values_.front() + values_.back());
}

double DensityMeasure::mean() const {
    std::vector<double> t(values_.size());
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = grid_.center(i) * values_[i];
    return grid_.spacing() * pairwise_sum(t);
}

double DensityMeasure::second_moment() const {
    std::vector<double> t(values_.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double x = grid_.center(i);
        t[i] = x * x * values_[i];
    }
    return grid_.spacing() * pairwise_sum(t);
}

std::vector<double> DensityMeasure::masses() const {
    std::vector<double> w(values_.size());
    const double h = grid_.spacing();
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = h * values_[i];
    return w;
}

QuantileMeasure::QuantileMeasure(std::vector<double> values)
    : values_(std::move(values)) {
    if (values_.empty())
        throw std::invalid_argument("QuantileMeasure: empty");
    for (std::size_t i = 0; i + 1 < values_.size(); ++i) {
        if (values_[i] > values_[i + 1])
            throw std::invalid_argument("QuantileMeasure: values must be nondecreasing");
    }
}

double QuantileMeasure::mean() const {
    return pairwise_sum(values_) / static_cast<double>(values_.size());
}

double QuantileMeasure::second_moment() const {
    std::vector<double> t(values_.size());
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = values_[i] * values_[i];
    return pairwise_sum(t) / static_cast<double>(values_.size());
}

double ParticleEnsemble::mean() const {
    return pairwise_sum(positions) / static_cast<double>(positions.size());
}

double ParticleEnsemble::variance() const {
    const double m = mean();
    std::vector<double> t(positions.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double d = positions[i] - m;
        t[i] = d * d;
    }
    return pairwise_sum(t) / static_cast<double>(positions.size());
}

std::vector<double> ParticleEnsemble::sorted_positions() const {
    std::vector<double> s = positions;
    std::sort(s.begin(), s.end());
    return s;
}

DensityMeasure gaussian_density(const Grid& grid, double mean, double sigma) {
    if (!(sigma > 0.0))
        throw std::invalid_argument("gaussian_density: sigma must be positive");
    std::vector<double> v(grid.n);
    for (std::size_t i = 0; i < grid.n; ++i)
        v[i] = gaussian_pdf(grid.center(i), mean, sigma);
    return DensityMeasure(grid, std::move(v));
}

DensityMeasure uniform_density(const Grid& grid, double a, double b) {
    if (!(a < b))
        throw std::invalid_argument("uniform_density: need a < b");
    const double h = grid.spacing();
    std::vector<double> v(grid.n, 0.0);
    for (std::size_t i = 0; i < grid.n; ++i) {
        const double lo = std::max(a, grid.left_face(i));
        const double hi = std::min(b, grid.left_face(i) + h);
        if (hi > lo) v[i] = (hi - lo) / (h * (b - a));
    }
    return DensityMeasure(grid, std::move(v));
}

QuantileMeasure to_quantile(const DensityMeasure& rho, std::size_t m) {
    if (m == 0) throw std::invalid_argument("to_quantile: m must be positive");
    const Grid& g = rho.grid();
    const double h = g.spacing();
    const std::size_t n = g.n;

    // CDF at cell faces; exact for the piecewise-constant density.
    std::vector<double> cdf(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) cdf[i + 1] = cdf[i] + h * rho.value(i);
    const double total = cdf[n];
    for (double& c : cdf) c /= total;
    cdf[n] = 1.0;

    std::vector<double> X(m);
    std::size_t j = 0;  // current face interval, advances with u
    for (std::size_t i = 0; i < m; ++i) {
        const double u = (static_cast<double>(i) + 0.5) / static_cast<double>(m);
        while (j + 1 < n && cdf[j + 1] < u) ++j;
        // invert on [face_j, face_{j+1}]
        const double c0 = cdf[j], c1 = cdf[j + 1];
        const double f0 = g.left_face(j), f1 = g.left_face(j) + h;
        double t = 0.5;  // flat stretch: midpoint
        if (c1 > c0) t = std::clamp((u - c0) / (c1 - c0), 0.0, 1.0);
        X[i] = f0 + t * (f1 - f0);
    }
    return QuantileMeasure(std::move(X));
}

namespace {

// Deposit helpers shared by from_quantile. Mass landing outside the grid is
// pushed into the edge cells and tallied as clipped.
struct Depositor {
    const Grid& g;
    std::vector<double>& cell_mass;
    double clipped = 0.0;

    void atom(double pos, double mass) {
        const double h = g.spacing();
        const double s = (pos - g.x_min) / h - 0.5;  // fractional center index
        if (s <= 0.0) {
            cell_mass[0] += mass;
            if (pos < g.x_min) clipped += mass;
            return;
        }
        if (s >= static_cast<double>(g.n - 1)) {
            cell_mass[g.n - 1] += mass;
            if (pos > g.x_max) clipped += mass;
            return;
        }
        const auto j = static_cast<std::size_t>(s);
        const double t = s - static_cast<double>(j);
        cell_mass[j] += mass * (1.0 - t);
        cell_mass[j + 1] += mass * t;
    }

    void interval(double a, double b, double mass) {
        if (b - a < 1e-14 * std::max(1.0, std::abs(a) + std::abs(b))) {
            atom(0.5 * (a + b), mass);
            return;
        }
        const double h = g.spacing();
        const double dens = mass / (b - a);
        if (a < g.x_min) {
            const double cut = std::min(b, g.x_min);
            cell_mass[0] += dens * (cut - a);
            clipped += dens * (cut - a);
        }
        if (b > g.x_max) {
            const double cut = std::max(a, g.x_max);
            cell_mass[g.n - 1] += dens * (b - cut);
            clipped += dens * (b - cut);
        }
        const double lo = std::max(a, g.x_min), hi = std::min(b, g.x_max);
        if (hi <= lo) return;
        auto clampi = [&](double v) {
            return std::min(g.n - 1, static_cast<std::size_t>(std::max(0.0, v)));
        };
        const std::size_t i0 = clampi(std::floor((lo - g.x_min) / h));
        const std::size_t i1 = clampi(std::ceil((hi - g.x_min) / h) - 1.0);
        for (std::size_t i = i0; i <= i1; ++i) {
            const double l = std::max(a, g.left_face(i));
            const double r = std::min(b, g.left_face(i) + h);
            if (r > l) cell_mass[i] += dens * (r - l);
        }
    }
};

}  // namespace

DensityMeasure from_quantile(const QuantileMeasure& q, const Grid& grid,
                             double* clipped_mass) {
    const auto& X = q.values();
    const std::size_t m = X.size();
    std::vector<double> cell_mass(grid.n, 0.0);
    Depositor dep{grid, cell_mass};

    if (m == 1) {
        dep.atom(X[0], 1.0);
    } else {
        // Band faces: midpoints between samples, extrapolated half-gaps at
        // the ends. Sample i carries mass 1/m over [B_i, B_{i+1}].
        const double w = 1.0 / static_cast<double>(m);
        double left = X[0] - 0.5 * (X[1] - X[0]);
        for (std::size_t i = 0; i < m; ++i) {
            const double right = (i + 1 < m)
                                     ? 0.5 * (X[i] + X[i + 1])
                                     : X[m - 1] + 0.5 * (X[m - 1] - X[m - 2]);
            dep.interval(left, right, w);
            left = right;
        }
    }
    if (clipped_mass) *clipped_mass = dep.clipped;

    const double h = grid.spacing();
    for (double& c : cell_mass) c /= h;
    return DensityMeasure(grid, std::move(cell_mass));
}

}  // namespace wgf
