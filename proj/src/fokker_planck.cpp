#include "wgf/fokker_planck.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "wgf/numerics.hpp"

namespace wgf {

double heat_kernel(double t, double x, double y) {
    if (!(t > 0.0)) throw std::invalid_argument("heat_kernel: t must be positive");
    return gaussian_pdf(y, x, std::sqrt(2.0 * t));
}

double ou_kernel(double kappa, double t, double x, double y) {
    if (!(kappa > 0.0))
        throw std::invalid_argument("ou_kernel: kappa must be positive");
    if (!(t > 0.0)) throw std::invalid_argument("ou_kernel: t must be positive");
    const double mean = x * std::exp(-kappa * t);
    const double var = (1.0 - std::exp(-2.0 * kappa * t)) / kappa;
    return gaussian_pdf(y, mean, std::sqrt(var));
}

Kernel Kernel::heat() {
    Kernel k;
    k.kind = Kind::heat;
    k.evaluator = [](double t, double x, double y) { return heat_kernel(t, x, y); };
    return k;
}

Kernel Kernel::ou(double kappa) {
    if (!(kappa > 0.0))
        throw std::invalid_argument("Kernel::ou: kappa must be positive");
    Kernel k;
    k.kind = Kind::ornstein_uhlenbeck;
    k.kappa = kappa;
    k.evaluator = [kappa](double t, double x, double y) {
        return ou_kernel(kappa, t, x, y);
    };
    return k;
}

Kernel Kernel::numerical(const Potential& psi, const Grid& grid, double dt) {
    Kernel k;
    k.kind = Kind::numerical;
    k.evaluator = [psi, grid, dt](double t, double x, double y) {
        // delta at the cell containing x, evolved to time t
        std::vector<double> v(grid.n, 0.0);
        auto i = static_cast<std::size_t>(
            std::clamp((x - grid.x_min) / grid.spacing(), 0.5,
                       static_cast<double>(grid.n) - 0.5));
        v[std::min(i, grid.n - 1)] = 1.0 / grid.spacing();
        const MeasurePath path =
            evolve_fv(DensityMeasure(grid, std::move(v)), psi, t, dt);
        const auto& rho = path.back();
        const double s = (y - grid.x_min) / grid.spacing() - 0.5;
        if (s <= 0.0) return rho.value(0);
        if (s >= static_cast<double>(grid.n - 1)) return rho.value(grid.n - 1);
        const auto j = static_cast<std::size_t>(s);
        const double u = s - static_cast<double>(j);
        return (1.0 - u) * rho.value(j) + u * rho.value(j + 1);
    };
    return k;
}

std::string Kernel::name() const {
    switch (kind) {
        case Kind::heat: return "heat";
        case Kind::ornstein_uhlenbeck: return "ou:" + std::to_string(kappa);
        case Kind::numerical: return "numerical";
    }
    return "?";
}

DensityMeasure convolve_kernel(const DensityMeasure& rho0, const Kernel& kernel,
                               double t, double* boundary_mass_out) {
    if (!(t > 0.0)) throw std::invalid_argument("convolve_kernel: t must be positive");
    const Grid& g = rho0.grid();
    const double h = g.spacing();
    const std::size_t n = g.n;
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double w = h * rho0.value(i);
        if (w == 0.0) continue;
        const double x = g.center(i);
        for (std::size_t j = 0; j < n; ++j)
            out[j] += w * kernel.evaluator(t, x, g.center(j));
    }
    DensityMeasure result(g, std::move(out));
    if (boundary_mass_out) *boundary_mass_out = result.boundary_mass();
    return result;
}

namespace {

// Bernoulli function B(w) = w / (e^w - 1), numerically stable.
double bernoulli(double w) {
    if (std::abs(w) < 1e-10) return 1.0 - 0.5 * w + w * w / 12.0;
    if (w > 700.0) return 0.0;
    if (w < -700.0) return -w;
    return w / std::expm1(w);
}

// Free energy of raw normalized values (avoids constructing a measure per step).
double raw_free_energy(const Grid& g, const std::vector<double>& v,
                       const std::vector<double>& psi_at) {
    double s = 0.0;
    const double h = g.spacing();
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] > kDensityFloor) s += v[i] * std::log(v[i]);
        s += psi_at[i] * v[i];
    }
    return h * s;
}

// Thomas solve of the tridiagonal system (in place, b = diagonal, d = rhs).
void thomas(std::vector<double>& a, std::vector<double>& b, std::vector<double>& c,
            std::vector<double>& d) {
    const std::size_t n = b.size();
    for (std::size_t i = 1; i < n; ++i) {
        const double w = a[i] / b[i - 1];
        b[i] -= w * c[i - 1];
        d[i] -= w * d[i - 1];
    }
    d[n - 1] /= b[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) d[i] = (d[i] - c[i] * d[i + 1]) / b[i];
}

}  // namespace

MeasurePath evolve_fv(const DensityMeasure& rho0, const Potential& psi,
                      double t_end, double dt, const FvOptions& opts,
                      FvDiagnostics* diag) {
    if (!(t_end > 0.0)) throw std::invalid_argument("evolve_fv: t_end must be positive");
    if (!(dt > 0.0)) throw std::invalid_argument("evolve_fv: dt must be positive");
    const Grid& g = rho0.grid();
    const double h = g.spacing();
    const std::size_t n = g.n;

    const auto steps = static_cast<std::size_t>(std::lround(std::ceil(t_end / dt - 1e-12)));
    const double dt_eff = t_end / static_cast<double>(steps);

    // Face weights from the potential differences; exact discrete steady
    // state e^{-Psi}/Z by construction of the Bernoulli fluxes.
    std::vector<double> psi_at(n);
    for (std::size_t i = 0; i < n; ++i) psi_at[i] = psi.psi(g.center(i));
    std::vector<double> Bp(n - 1), Bm(n - 1);  // B(w), B(-w) at interior faces
    double max_face_coeff = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double w = psi_at[i + 1] - psi_at[i];
        Bp[i] = bernoulli(w);
        Bm[i] = bernoulli(-w);
        max_face_coeff = std::max(max_face_coeff, Bp[i] + Bm[i]);
    }

    if (opts.scheme == FvOptions::Scheme::explicit_euler) {
        if (dt_eff > 0.25 * h * h)
            throw std::invalid_argument(
                "evolve_fv: CFL violation in explicit mode (need dt <= h^2/4)");
        if (dt_eff * max_face_coeff / (h * h) > 0.9)
            throw std::invalid_argument(
                "evolve_fv: CFL violation in explicit mode (drift-weighted)");
    }

    std::vector<double> rho = rho0.values();
    const std::size_t stride =
        std::max<std::size_t>(1, (steps + opts.max_snapshots - 2) /
                                     std::max<std::size_t>(1, opts.max_snapshots - 1));

    MeasurePath path;
    path.times.push_back(0.0);
    path.states.push_back(rho0);

    FvDiagnostics local;
    double f_prev = raw_free_energy(g, rho, psi_at);

    std::vector<double> lower(n), diagv(n), upper(n), rhs(n);
    for (std::size_t k = 0; k < steps; ++k) {
        const double lam = dt_eff / (h * h);
        if (opts.scheme == FvOptions::Scheme::implicit_euler) {
            // (I - dt A) rho_new = rho_old, A the no-flux flux-form operator
            for (std::size_t i = 0; i < n; ++i) {
                double dsum = 0.0;
                lower[i] = upper[i] = 0.0;
                if (i > 0) {
                    lower[i] = -lam * Bp[i - 1];
                    dsum += Bm[i - 1];
                }
                if (i + 1 < n) {
                    upper[i] = -lam * Bm[i];
                    dsum += Bp[i];
                }
                diagv[i] = 1.0 + lam * dsum;
                rhs[i] = rho[i];
            }
            thomas(lower, diagv, upper, rhs);
            rho = rhs;
        } else {
            std::vector<double> next(n);
            for (std::size_t i = 0; i < n; ++i) {
                double flux_in = 0.0, flux_out = 0.0;
                if (i > 0) {
                    flux_in += Bp[i - 1] * rho[i - 1];
                    flux_out += Bm[i - 1] * rho[i];
                }
                if (i + 1 < n) {
                    flux_in += Bm[i] * rho[i + 1];
                    flux_out += Bp[i] * rho[i];
                }
                next[i] = rho[i] + lam * (flux_in - flux_out);
            }
            rho = std::move(next);
        }

        for (std::size_t i = 0; i < n; ++i) {
            if (!std::isfinite(rho[i]))
                throw std::runtime_error("evolve_fv: NaN detected at step " +
                                         std::to_string(k + 1));
            if (rho[i] < 0.0) rho[i] = 0.0;  // clip implicit-solve round-off
        }

        local.max_mass_drift =
            std::max(local.max_mass_drift, std::abs(h * pairwise_sum(rho) - 1.0));
        const double f_now = raw_free_energy(g, rho, psi_at);
        local.max_free_energy_increase =
            std::max(local.max_free_energy_increase, f_now - f_prev);
        f_prev = f_now;

        if ((k + 1) % stride == 0 || k + 1 == steps) {
            path.times.push_back(static_cast<double>(k + 1) * dt_eff);
            path.states.push_back(DensityMeasure::adopt_normalized(g, rho));
        }
    }
    local.steps = steps;
    if (diag) *diag = local;
    return path;
}

}  // namespace wgf
