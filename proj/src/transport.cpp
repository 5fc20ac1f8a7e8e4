#include "wgf/transport.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "wgf/numerics.hpp"

namespace wgf {

namespace {

// CDF at cell faces (n+1 values, 0 at the left edge, 1 at the right).
std::vector<double> face_cdf(const DensityMeasure& rho) {
    const std::size_t n = rho.size();
    const double h = rho.spacing();
    std::vector<double> cdf(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) cdf[i + 1] = cdf[i] + h * rho.value(i);
    const double total = cdf[n];
    for (double& c : cdf) c /= total;
    cdf[n] = 1.0;
    return cdf;
}

// Linear interpolation of cell values at position x (edge value outside).
double interp_cells(const DensityMeasure& rho, double x) {
    const Grid& g = rho.grid();
    const double s = (x - g.x_min) / g.spacing() - 0.5;
    if (s <= 0.0) return rho.value(0);
    if (s >= static_cast<double>(g.n - 1)) return rho.value(g.n - 1);
    const auto j = static_cast<std::size_t>(s);
    const double t = s - static_cast<double>(j);
    return (1.0 - t) * rho.value(j) + t * rho.value(j + 1);
}

}  // namespace

double TransportMap::sup_derivative() const {
    const double h = grid.spacing();
    double peak = 0.0;
    for (double v : source.values()) peak = std::max(peak, v);
    // cells carrying resolution-level mass say nothing about the true map
    const double cutoff = 1e-12 * peak;
    double sup = 0.0;
    for (std::size_t i = 1; i + 1 < targets.size(); ++i) {
        if (source.value(i) <= cutoff) continue;
        sup = std::max(sup, (targets[i + 1] - targets[i - 1]) / (2.0 * h));
    }
    return sup;
}

double TangentField::kinetic_energy() const {
    std::vector<double> t(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        t[i] = v[i] * v[i] * base.value(i);
    return grid.spacing() * pairwise_sum(t);
}

void MeasurePath::validate() const {
    if (times.size() < 2 || times.size() != states.size())
        throw std::invalid_argument("MeasurePath: need matching times/states, >= 2");
    for (std::size_t k = 0; k + 1 < times.size(); ++k)
        if (!(times[k] < times[k + 1]))
            throw std::invalid_argument("MeasurePath: times must increase");
    if (chart) {
        if (chart->size() != states.size())
            throw std::invalid_argument("MeasurePath: chart rows != states");
        for (const auto& row : *chart)
            for (std::size_t i = 0; i + 1 < row.size(); ++i)
                if (row[i] > row[i + 1])
                    throw std::invalid_argument("MeasurePath: chart row not monotone");
    }
}

double w2(const DensityMeasure& rho0, const DensityMeasure& rho1, std::size_t m) {
    const auto X = to_quantile(rho0, m).values();
    const auto Y = to_quantile(rho1, m).values();
    std::vector<double> t(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double d = X[i] - Y[i];
        t[i] = d * d;
    }
    return std::sqrt(pairwise_sum(t) / static_cast<double>(m));
}

TransportMap monotone_map(const DensityMeasure& rho0, const DensityMeasure& rho1) {
    if (!(rho0.grid() == rho1.grid()))
        throw std::invalid_argument("monotone_map: measures on different grids");
    const Grid& g = rho0.grid();
    const double h = g.spacing();
    const std::size_t n = g.n;

    const auto F = face_cdf(rho0);
    const auto G = face_cdf(rho1);

    // invert G's piecewise-linear CDF; flat stretches land at their midpoint
    std::size_t j = 0;
    auto invert = [&](double u) {
        while (j + 1 < n && G[j + 1] < u) ++j;
        const double c0 = G[j], c1 = G[j + 1];
        if (c1 > c0) {
            const double t = std::clamp((u - c0) / (c1 - c0), 0.0, 1.0);
            return g.left_face(j) + t * h;
        }
        std::size_t a = j, b = j + 1;
        while (a > 0 && G[a - 1] == c0) --a;
        while (b < n && G[b] == c1) ++b;
        return 0.5 * (g.left_face(a) + g.left_face(b));
    };

    // T at faces first: a jump wider than 10h across one source cell means
    // the cell's mass must cross a flat stretch of G (ill-conditioned inverse)
    std::vector<double> T_face(n + 1);
    for (std::size_t i = 0; i <= n; ++i) T_face[i] = invert(F[i]);
    double peak = 0.0;
    for (double v : rho0.values()) peak = std::max(peak, v);
    for (std::size_t i = 0; i < n; ++i) {
        if (rho0.value(i) <= 1e-12 * peak) continue;
        if (T_face[i + 1] - T_face[i] > 10.0 * h)
            throw std::invalid_argument(
                "monotone_map: target CDF flat over a needed inversion interval "
                "wider than 10h; inverse ill-conditioned");
    }

    std::vector<double> T(n);
    j = 0;
    for (std::size_t i = 0; i < n; ++i) {
        // F at the cell center: mass of cells < i plus half of cell i.
        const double u = std::min(1.0, F[i] + 0.5 * h * rho0.value(i));
        T[i] = invert(u);
    }
    for (std::size_t i = 0; i + 1 < n; ++i)
        T[i + 1] = std::max(T[i + 1], T[i]);  // guard rounding ties
    return TransportMap{g, std::move(T), rho0};
}

double monge_ampere_residual(const TransportMap& map, const DensityMeasure& rho1) {
    const Grid& g = map.grid;
    const double h = g.spacing();
    const std::size_t n = g.n;
    double sup = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (map.source.value(i) <= kDensityFloor) continue;
        const double dT = (map.targets[i + 1] - map.targets[i - 1]) / (2.0 * h);
        const double push = interp_cells(rho1, map.targets[i]) * dT;
        sup = std::max(sup, std::abs(map.source.value(i) - push));
    }
    return sup;
}

MeasurePath geodesic(const DensityMeasure& rho0, const DensityMeasure& rho1,
                     std::size_t K, std::size_t m_chart) {
    if (K < 1) throw std::invalid_argument("geodesic: need K >= 1");
    if (!(rho0.grid() == rho1.grid()))
        throw std::invalid_argument("geodesic: measures on different grids");
    const auto X0 = to_quantile(rho0, m_chart).values();
    const auto X1 = to_quantile(rho1, m_chart).values();
    const bool constant = X0 == X1;

    MeasurePath path;
    path.chart.emplace();
    for (std::size_t k = 0; k <= K; ++k) {
        const double t = static_cast<double>(k) / static_cast<double>(K);
        path.times.push_back(t);
        std::vector<double> row(m_chart);
        for (std::size_t i = 0; i < m_chart; ++i)
            row[i] = (1.0 - t) * X0[i] + t * X1[i];
        if (k == 0 || constant)
            path.states.push_back(rho0);
        else if (k == K)
            path.states.push_back(rho1);
        else
            path.states.push_back(from_quantile(QuantileMeasure(row), rho0.grid()));
        path.chart->push_back(std::move(row));
    }
    return path;
}

double dual_norm_sq(std::span<const double> s, const DensityMeasure& rho,
                    FloorDiagnostics* diag) {
    const std::size_t n = rho.size();
    if (s.size() != n)
        throw std::invalid_argument("dual_norm_sq: size mismatch");
    const double h = rho.spacing();
    const double mass = h * pairwise_sum(s);
    const double scale = h * sum_abs(s);
    if (std::abs(mass) > 1e-8 * std::max(1.0, scale))
        throw std::invalid_argument(
            "dual_norm_sq: s has nonzero total mass (not a tangent vector)");

    // Antiderivative at cell centers. Values below the accumulated rounding
    // resolution are exact zeros of the continuous flux, not signal.
    const double flux_tol = 64.0 * std::numeric_limits<double>::epsilon() * scale;
    std::vector<double> t(n, 0.0);
    double cum = 0.0;
    double floored = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double S_center = h * (cum + 0.5 * s[i]);
        cum += s[i];
        if (rho.value(i) <= kDensityFloor) {
            floored += h * rho.value(i);
            continue;
        }
        if (std::abs(S_center) <= flux_tol) continue;
        t[i] = S_center * S_center / rho.value(i);
    }
    if (diag) {
        diag->floored_mass = floored;
        diag->reliable = floored <= 0.5;
    }
    return h * pairwise_sum(t);
}

TangentField tangent_velocity(std::span<const double> s, const DensityMeasure& rho) {
    const std::size_t n = rho.size();
    const double h = rho.spacing();
    std::vector<double> v(n, 0.0);
    double cum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double S_center = h * (cum + 0.5 * s[i]);
        cum += s[i];
        if (rho.value(i) > kDensityFloor) v[i] = -S_center / rho.value(i);
    }
    return TangentField{rho.grid(), std::move(v), rho};
}

double dual_pairing(std::span<const double> s1, std::span<const double> s2,
                    const DensityMeasure& rho) {
    std::vector<double> plus(s1.size()), minus(s1.size());
    for (std::size_t i = 0; i < s1.size(); ++i) {
        plus[i] = s1[i] + s2[i];
        minus[i] = s1[i] - s2[i];
    }
    return 0.25 * (dual_norm_sq(plus, rho) - dual_norm_sq(minus, rho));
}

double path_action(const MeasurePath& path) {
    if (path.intervals() < 4)
        throw std::invalid_argument("path_action: need at least 4 intervals");
    path.validate();
    const std::size_t n = path.front().size();
    const Grid& g = path.front().grid();
    double total = 0.0;
    for (std::size_t k = 0; k < path.intervals(); ++k) {
        const double dt = path.times[k + 1] - path.times[k];
        std::vector<double> s(n);
        for (std::size_t i = 0; i < n; ++i)
            s[i] = (path.states[k + 1].value(i) - path.states[k].value(i)) / dt;
        DensityMeasure mid = [&]() {
            if (path.chart) {
                const auto& a = (*path.chart)[k];
                const auto& b = (*path.chart)[k + 1];
                std::vector<double> row(a.size());
                for (std::size_t i = 0; i < a.size(); ++i) row[i] = 0.5 * (a[i] + b[i]);
                return from_quantile(QuantileMeasure(std::move(row)), g);
            }
            std::vector<double> avg(n);
            for (std::size_t i = 0; i < n; ++i)
                avg[i] = 0.5 * (path.states[k].value(i) + path.states[k + 1].value(i));
            return DensityMeasure(g, std::move(avg));
        }();
        total += dt * dual_norm_sq(s, mid);
    }
    return total;
}

double grad_free_energy_norm_sq(const DensityMeasure& rho, const Potential& psi,
                                FloorDiagnostics* diag) {
    const std::size_t n = rho.size();
    const double h = rho.spacing();
    std::vector<double> t(n, 0.0);
    double floored = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = rho.value(i);
        if (r <= kDensityFloor) {
            floored += h * r;
            continue;
        }
        double d;
        if (i == 0)
            d = (rho.value(1) - rho.value(0)) / h;
        else if (i == n - 1)
            d = (rho.value(n - 1) - rho.value(n - 2)) / h;
        else
            d = (rho.value(i + 1) - rho.value(i - 1)) / (2.0 * h);
        const double drift = d / r + psi.dpsi(rho.grid().center(i));
        t[i] = drift * drift * r;
    }
    if (diag) {
        diag->floored_mass = floored;
        diag->reliable = floored <= 0.5;
    }
    return h * pairwise_sum(t);
}

BoundsReport geodesic_functional_bounds(const DensityMeasure& rho0,
                                        const DensityMeasure& rho1,
                                        const Potential& psi, std::size_t K,
                                        std::size_t m_chart) {
    if (!(rho0.grid() == rho1.grid()))
        throw std::invalid_argument("geodesic_functional_bounds: different grids");
    const Grid& g = rho0.grid();

    for (std::size_t i = 0; i < g.n; ++i)
        if (psi.d2psi(g.center(i)) < -1e-9)
            throw std::invalid_argument(
                "geodesic_functional_bounds: Psi is not convex on the grid");

    // Tail-match detection: identical values from each edge inward.
    std::size_t left_run = 0;
    while (left_run < g.n && rho0.value(left_run) == rho1.value(left_run)) ++left_run;
    std::size_t right_run = 0;
    while (right_run < g.n &&
           rho0.value(g.n - 1 - right_run) == rho1.value(g.n - 1 - right_run))
        ++right_run;
    const bool identical = left_run >= g.n;
    if (!identical && (left_run < 2 || right_run < 2))
        throw std::invalid_argument(
            "geodesic_functional_bounds: inputs are not tail-matched "
            "(no identical tail region)");

    const TransportMap map = monotone_map(rho0, rho1);
    const double c = std::max(1.0, map.sup_derivative());

    MeasurePath path = geodesic(rho0, rho1, K, m_chart);
    BoundsReport rep;
    rep.sup_tprime = map.sup_derivative();
    rep.comparison_constant = 4.0 * c * c * c;
    rep.max_free_energy = -std::numeric_limits<double>::infinity();
    for (const auto& state : path.states) {
        rep.max_free_energy = std::max(rep.max_free_energy, free_energy(state, psi));
        rep.max_fisher = std::max(rep.max_fisher, fisher_information(state));
        std::vector<double> t(state.size());
        for (std::size_t i = 0; i < state.size(); ++i) {
            const double dp = psi.dpsi(g.center(i));
            t[i] = dp * dp * state.value(i);
        }
        rep.max_drift_energy =
            std::max(rep.max_drift_energy, g.spacing() * pairwise_sum(t));
    }
    return rep;
}

}  // namespace wgf
