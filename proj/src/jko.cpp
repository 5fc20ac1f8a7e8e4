#include "wgf/jko.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "wgf/monotone.hpp"
#include "wgf/numerics.hpp"

namespace wgf {

double chart_free_energy(const std::vector<double>& X, const Potential& psi) {
    const std::size_t m = X.size();
    const double inv_m = 1.0 / static_cast<double>(m);
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < m; ++i) {
        const double gap = X[i + 1] - X[i];
        if (!(gap > 0.0)) return std::numeric_limits<double>::infinity();
        s -= std::log(static_cast<double>(m) * gap);
    }
    double e = 0.0;
    for (double xi : X) e += psi.psi(xi);
    return inv_m * (s + e);
}

namespace {

// G(X) = chart free energy + (1/2 tau) (1/m) sum (X_i - X0_i)^2 with
// tridiagonal Hessian model (potential curvature clipped at zero).
MonotoneObjective jko_objective(const std::vector<double>& X0,
                                const Potential& psi, double tau) {
    MonotoneObjective obj;
    obj.bandwidth = 1;
    obj.eval = [&X0, &psi, tau](const std::vector<double>& X,
                                std::vector<double>* grad, BandedSpd* hess) {
        const std::size_t m = X.size();
        const double inv_m = 1.0 / static_cast<double>(m);
        if (grad) std::fill(grad->begin(), grad->end(), 0.0);
        if (hess) hess->clear();

        double ent = 0.0;
        for (std::size_t i = 0; i + 1 < m; ++i) {
            const double gap = X[i + 1] - X[i];
            if (!(gap > 0.0)) return std::numeric_limits<double>::infinity();
            ent -= std::log(static_cast<double>(m) * gap);
            if (grad) {
                const double ig = inv_m / gap;
                (*grad)[i] += ig;
                (*grad)[i + 1] -= ig;
            }
            if (hess) {
                const double ig2 = inv_m / (gap * gap);
                hess->band[0][i] += ig2;
                hess->band[0][i + 1] += ig2;
                hess->band[1][i] -= ig2;
            }
        }
        double pot = 0.0, pen = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            pot += psi.psi(X[i]);
            const double d = X[i] - X0[i];
            pen += d * d;
            if (grad) (*grad)[i] += inv_m * (psi.dpsi(X[i]) + d / tau);
            if (hess)
                hess->band[0][i] +=
                    inv_m * (std::max(0.0, psi.d2psi(X[i])) + 1.0 / tau);
        }
        return inv_m * (ent + pot + pen / (2.0 * tau));
    };
    return obj;
}

}  // namespace

std::vector<double> jko_step_chart(const std::vector<double>& X0,
                                   const Potential& psi, double tau,
                                   const JkoOptions& opts, JkoStepStats* stats) {
    if (!(tau > 0.0)) throw std::invalid_argument("jko_step: tau must be positive");
    MonotoneSolveOptions sopts;
    sopts.grad_tol = opts.grad_tol;
    sopts.max_iters = opts.max_iters;
    const MonotoneObjective obj = jko_objective(X0, psi, tau);
    MonotoneSolveResult res = minimize_monotone(obj, X0, sopts);
    if (stats) {
        stats->objective = res.value;
        stats->chart_f = chart_free_energy(res.x, psi);
        stats->grad_norm = res.grad_norm;
        stats->iters = res.iters;
        stats->converged = res.converged;
        double d2 = 0.0;
        for (std::size_t i = 0; i < res.x.size(); ++i) {
            const double d = res.x[i] - X0[i];
            d2 += d * d;
        }
        stats->w2_step = std::sqrt(d2 / static_cast<double>(res.x.size()));
    }
    return std::move(res.x);
}

DensityMeasure jko_step(const DensityMeasure& rho0, const Potential& psi,
                        double tau, std::size_t m, JkoStepStats* stats) {
    JkoOptions opts;
    opts.m = m;
    const std::vector<double> X0 = to_quantile(rho0, m).values();
    const std::vector<double> X = jko_step_chart(X0, psi, tau, opts, stats);
    return from_quantile(QuantileMeasure(X), rho0.grid());
}

MeasurePath jko_flow(const DensityMeasure& rho0, const Potential& psi, double tau,
                     std::size_t steps, std::size_t m,
                     std::vector<JkoStepStats>* per_step) {
    if (steps == 0) throw std::invalid_argument("jko_flow: need at least one step");
    JkoOptions opts;
    opts.m = m;
    std::vector<double> X = to_quantile(rho0, m).values();

    MeasurePath path;
    path.chart.emplace();
    path.times.push_back(0.0);
    path.states.push_back(rho0);
    path.chart->push_back(X);

    for (std::size_t k = 0; k < steps; ++k) {
        JkoStepStats st;
        X = jko_step_chart(X, psi, tau, opts, &st);
        path.times.push_back(static_cast<double>(k + 1) * tau);
        path.states.push_back(from_quantile(QuantileMeasure(X), rho0.grid()));
        path.chart->push_back(X);
        if (per_step) per_step->push_back(st);
    }
    return path;
}

}  // namespace wgf
