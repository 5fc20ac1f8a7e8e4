#include "wgf/rate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "wgf/functionals.hpp"
#include "wgf/jko.hpp"
#include "wgf/monotone.hpp"
#include "wgf/numerics.hpp"

namespace wgf {

double Coupling::total_mass() const { return pairwise_sum(gamma); }

double Coupling::row_marginal_l1_error(const DensityMeasure& rho0) const {
    const std::size_t n = grid.n;
    const double h = grid.spacing();
    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) row += gamma[i * n + j];
        err += std::abs(row - h * rho0.value(i));
    }
    return err;
}

double Coupling::col_marginal_l1_error(const DensityMeasure& rho1) const {
    const std::size_t n = grid.n;
    const double h = grid.spacing();
    double err = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double col = 0.0;
        for (std::size_t i = 0; i < n; ++i) col += gamma[i * n + j];
        err += std::abs(col - h * rho1.value(j));
    }
    return err;
}

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double lse_strided(const double* base, std::size_t count, std::size_t stride,
                   const double* add, std::size_t add_stride) {
    double mx = kNegInf;
    for (std::size_t k = 0; k < count; ++k) {
        const double v = base[k * stride] + add[k * add_stride];
        if (v > mx) mx = v;
    }
    if (mx == kNegInf) return kNegInf;
    double s = 0.0;
    for (std::size_t k = 0; k < count; ++k) {
        const double v = base[k * stride] + add[k * add_stride];
        s += std::exp(v - mx);
    }
    return mx + std::log(s);
}

}  // namespace

StaticRateResult j_static(const DensityMeasure& rho0, const DensityMeasure& rho1,
                          const Kernel& kernel, double tau,
                          const StaticRateOptions& opts) {
    if (!(tau > 0.0)) throw std::invalid_argument("j_static: tau must be positive");
    if (!(rho0.grid() == rho1.grid()))
        throw std::invalid_argument("j_static: measures on different grids");
    const Grid& g = rho0.grid();
    const double h = g.spacing();
    const std::size_t n = g.n;

    // kernel resolution guard: spacing must resolve the transition scale
    const double h_max = std::sqrt(4.0 * tau) / 4.0;
    if (h > h_max) {
        const auto n_req = static_cast<std::size_t>(std::ceil(g.range() / h_max));
        throw std::invalid_argument(
            "j_static: grid spacing " + std::to_string(h) +
            " does not resolve the kernel at tau=" + std::to_string(tau) +
            "; need n >= " + std::to_string(n_req));
    }

    // log reference coupling logR_ij = log(rho0_i h) + log(p_tau(x_j|x_i) h)
    std::vector<double> logR(n * n);
    std::vector<double> la(n), lb(n);
    for (std::size_t i = 0; i < n; ++i) {
        la[i] = std::log(h * rho0.value(i));
        lb[i] = std::log(h * rho1.value(i));
    }
    for (std::size_t i = 0; i < n; ++i) {
        const double x = g.center(i);
        double* row = &logR[i * n];
        if (la[i] == kNegInf) {
            std::fill(row, row + n, kNegInf);
            continue;
        }
        for (std::size_t j = 0; j < n; ++j)
            row[j] = la[i] + std::log(h * kernel.evaluator(tau, x, g.center(j)));
    }

    // feasibility: every column with positive target marginal needs support
    for (std::size_t j = 0; j < n; ++j) {
        if (lb[j] == kNegInf) continue;
        double mx = kNegInf;
        for (std::size_t i = 0; i < n; ++i) mx = std::max(mx, logR[i * n + j]);
        if (mx < std::log(1e-300))
            throw std::runtime_error(
                "j_static: reference kernel column mass below 1e-300 where the "
                "target marginal is positive (infeasible support)");
    }

    std::vector<double> f(n, 0.0), gg(n, 0.0), zeros(n, 0.0);
    double marg_err = std::numeric_limits<double>::infinity();
    std::size_t sweep = 0;
    for (; sweep < opts.max_sweeps; ++sweep) {
        // row scaling: f_i = la_i - lse_j(logR_ij + g_j)
        for (std::size_t i = 0; i < n; ++i)
            f[i] = la[i] == kNegInf
                       ? kNegInf
                       : la[i] - lse_strided(&logR[i * n], n, 1, gg.data(), 1);
        // column scaling: g_j = lb_j - lse_i(logR_ij + f_i)
        for (std::size_t j = 0; j < n; ++j)
            gg[j] = lb[j] == kNegInf
                        ? kNegInf
                        : lb[j] - lse_strided(&logR[j], n, n, f.data(), 1);
        // columns now exact; row residual is the convergence monitor
        double e = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double lre = la[i] == kNegInf
                                   ? kNegInf
                                   : f[i] + lse_strided(&logR[i * n], n, 1, gg.data(), 1);
            e += std::abs((lre == kNegInf ? 0.0 : std::exp(lre)) - h * rho0.value(i));
        }
        marg_err = e;
        if (opts.j_trace) {
            // dual objective <a,f> + <b,g> - (mass(gamma) - 1); block ascent
            // makes it monotone and it converges to J from below
            double dual = 1.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (la[i] != kNegInf) dual += std::exp(la[i]) * f[i];
                if (lb[i] != kNegInf) dual += std::exp(lb[i]) * gg[i];
            }
            for (std::size_t i = 0; i < n; ++i) {
                if (f[i] == kNegInf) continue;
                for (std::size_t j = 0; j < n; ++j) {
                    const double lgamma = logR[i * n + j] + f[i] + gg[j];
                    if (lgamma > -745.0) dual -= std::exp(lgamma);
                }
            }
            opts.j_trace->push_back(dual);
        }
        if (marg_err <= opts.tol) break;
    }
    if (marg_err > opts.tol)
        throw std::runtime_error(
            "j_static: IPFP did not converge in " + std::to_string(opts.max_sweeps) +
            " sweeps (marginal L1 residual " + std::to_string(marg_err) + ")");

    StaticRateResult res;
    res.sweeps = sweep + 1;
    res.marginal_err = marg_err;
    double J = 0.0;
    Coupling coupling{g, {}};
    if (opts.want_coupling) coupling.gamma.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (f[i] == kNegInf) continue;
        for (std::size_t j = 0; j < n; ++j) {
            const double lgamma = logR[i * n + j] + f[i] + gg[j];
            if (lgamma <= -745.0) continue;
            const double gv = std::exp(lgamma);
            J += gv * (f[i] + gg[j]);  // H(gamma|R) = sum gamma log(gamma/R)
            if (opts.want_coupling) coupling.gamma[i * n + j] = gv;
        }
    }
    res.j = J;
    res.coupling = std::move(coupling);
    return res;
}

namespace {

// Discrete Fisher information of a support jump is only O(1/h), so detect
// compactly-supported-with-jump endpoints directly: a substantial cell next
// to a floored one.
bool has_support_jump(const DensityMeasure& rho) {
    double peak = 0.0;
    for (double v : rho.values()) peak = std::max(peak, v);
    for (std::size_t i = 0; i < rho.size(); ++i) {
        if (rho.value(i) <= 1e-3 * peak) continue;
        const bool left_dead = i > 0 && rho.value(i - 1) <= kDensityFloor;
        const bool right_dead = i + 1 < rho.size() && rho.value(i + 1) <= kDensityFloor;
        if (left_dead || right_dead) return true;
    }
    return false;
}

// Relative Fisher information of the quantile chart: midpoint-rule quadrature
// of (d/dx log rho + Psi')^2 rho in quantile coordinates, where
// d/dx log rho = -X''/(X')^2 = -4 (g_i - g_{i-1}) / (g_{i-1} + g_i)^2 in gap
// differences. End residuals reuse the nearest interior stencil. Fills the
// gradient and the Gauss-Newton banded Hessian (bandwidth 2), scaled by
// `weight`, when requested. Only meaningful for charts coarser than the grid.
double chart_rel_fisher(const std::vector<double>& X, const Potential& psi,
                        double weight, std::vector<double>* grad, BandedSpd* hess) {
    const std::size_t m = X.size();
    if (m < 4) throw std::invalid_argument("chart_rel_fisher: need m >= 4");
    const double inv_m = 1.0 / static_cast<double>(m);
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        // three-point stencil (b, b+1, b+2) carrying the curvature estimate
        const std::size_t b = i == 0 ? 0 : (i + 1 == m ? m - 3 : i - 1);
        const double gp = X[b + 1] - X[b];
        const double gn = X[b + 2] - X[b + 1];
        if (!(gp > 0.0) || !(gn > 0.0))
            return std::numeric_limits<double>::infinity();
        const double u = gn - gp;
        const double s = gp + gn;
        const double s2 = s * s, s3 = s2 * s;
        const double D = -4.0 * u / s2;
        double J3[3] = {-4.0 / s2 - 8.0 * u / s3,   // d/dX_b
                        8.0 / s2,                   // d/dX_{b+1}
                        -4.0 / s2 + 8.0 * u / s3};  // d/dX_{b+2}
        J3[i - b] += psi.d2psi(X[i]);
        const double r = D + psi.dpsi(X[i]);
        total += inv_m * r * r;
        if (grad) {
            const double c = 2.0 * weight * inv_m * r;
            for (int a = 0; a < 3; ++a) (*grad)[b + a] += c * J3[a];
        }
        if (hess) {
            const double w2 = 2.0 * weight * inv_m;
            for (int a = 0; a < 3; ++a)
                for (int bb = a; bb < 3; ++bb)
                    hess->band[bb - a][b + a] += w2 * J3[a] * J3[bb];
        }
    }
    return total;
}

}  // namespace

DynamicRateResult j_dynamic(const DensityMeasure& rho0, const DensityMeasure& rho1,
                            const Potential& psi, double tau,
                            const DynamicRateOptions& opts) {
    if (!(tau > 0.0)) throw std::invalid_argument("j_dynamic: tau must be positive");
    if (!(rho0.grid() == rho1.grid()))
        throw std::invalid_argument("j_dynamic: measures on different grids");
    if (opts.K < 2) throw std::invalid_argument("j_dynamic: need K >= 2");

    for (const DensityMeasure* rho : {&rho0, &rho1}) {
        const double fi = fisher_information(*rho);
        if (!std::isfinite(fi) || fi > 1e12 || has_support_jump(*rho))
            throw std::invalid_argument(
                "j_dynamic: endpoint has (effectively) infinite Fisher "
                "information; the rate expansion requires densities bounded "
                "from below by a positive constant on compacts");
        if (!std::isfinite(free_energy(*rho, psi)))
            throw std::invalid_argument("j_dynamic: endpoint free energy not finite");
    }

    const std::size_t K = opts.K, m = opts.m;
    const double dt = 1.0 / static_cast<double>(K);
    const double inv_m = 1.0 / static_cast<double>(m);

    const std::vector<double> X0 = to_quantile(rho0, m).values();
    const std::vector<double> X1 = to_quantile(rho1, m).values();
    std::vector<std::vector<double>> Xs(K + 1);
    for (std::size_t k = 0; k <= K; ++k) {
        Xs[k].resize(m);
        const double t = static_cast<double>(k) * dt;
        for (std::size_t i = 0; i < m; ++i)
            Xs[k][i] = (1.0 - t) * X0[i] + t * X1[i];
    }

    auto kinetic_total = [&]() {
        double kin = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
            double s = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                const double d = Xs[k + 1][i] - Xs[k][i];
                s += d * d;
            }
            kin += s / dt;
        }
        return kin * inv_m / (4.0 * tau);
    };
    auto fisher_total_chart = [&]() {
        double fis = 0.0;
        for (std::size_t k = 0; k <= K; ++k) {
            const double wk = (k == 0 || k == K) ? 0.5 * dt : dt;
            fis += wk * chart_rel_fisher(Xs[k], psi, 1.0, nullptr, nullptr);
        }
        return fis * tau / 4.0;
    };

    double action = kinetic_total() + fisher_total_chart();
    std::size_t sweep = 0;
    for (; sweep < opts.max_sweeps; ++sweep) {
        for (std::size_t k = 1; k < K; ++k) {
            const std::vector<double>& P = Xs[k - 1];
            const std::vector<double>& N = Xs[k + 1];
            MonotoneObjective obj;
            obj.bandwidth = 2;
            const double kin_c = inv_m / (4.0 * tau * dt);
            const double fis_w = (tau / 4.0) * dt;
            obj.eval = [&](const std::vector<double>& X, std::vector<double>* grad,
                           BandedSpd* hess) {
                if (grad) std::fill(grad->begin(), grad->end(), 0.0);
                if (hess) hess->clear();
                double kin = 0.0;
                for (std::size_t i = 0; i < m; ++i) {
                    const double dp = X[i] - P[i];
                    const double dn = N[i] - X[i];
                    kin += dp * dp + dn * dn;
                    if (grad) (*grad)[i] += kin_c * 2.0 * (dp - dn);
                    if (hess) hess->band[0][i] += kin_c * 4.0;
                }
                const double fis = chart_rel_fisher(X, psi, fis_w, grad, hess);
                if (!std::isfinite(fis)) return fis;
                return kin_c * kin + fis_w * fis;
            };
            MonotoneSolveOptions sopts;
            sopts.grad_tol = 1e-10;
            sopts.max_iters = 40;
            Xs[k] = minimize_monotone(obj, Xs[k], sopts).x;
        }
        const double next = kinetic_total() + fisher_total_chart();
        const bool done = action - next <= opts.action_tol * (1.0 + std::abs(next));
        action = next;
        if (done) break;
    }

    // assemble the charted path with deposited snapshot states
    MeasurePath path;
    path.chart.emplace();
    for (std::size_t k = 0; k <= K; ++k) {
        path.times.push_back(static_cast<double>(k) * dt);
        if (k == 0)
            path.states.push_back(rho0);
        else if (k == K)
            path.states.push_back(rho1);
        else
            path.states.push_back(
                from_quantile(QuantileMeasure(Xs[k]), rho0.grid()));
        path.chart->push_back(Xs[k]);
    }

    RateReport rep;
    rep.tau = tau;
    rep.method = "dynamic";
    rep.action_term = kinetic_total();
    // chart-side quadrature of ||grad F||^2 along the path: the same
    // functional the optimizer minimized, so refinement stays monotone
    rep.fisher_term = fisher_total_chart();
    rep.delta_f = 0.5 * (free_energy(rho1, psi) - free_energy(rho0, psi));
    rep.j = rep.action_term + rep.fisher_term + rep.delta_f;
    const double w = w2(rho0, rho1, opts.m_eval);
    rep.w2_sq = w * w;
    rep.gamma_gap = rep.j - rep.w2_sq / (4.0 * tau) - rep.delta_f;
    rep.first_order_gap = tau * rep.j - 0.25 * rep.w2_sq;
    rep.iters = sweep + 1;

    return DynamicRateResult{rep, std::move(path)};
}

double unexpanded_rate_integrand(const MeasurePath& path, const Potential& psi,
                                 double tau) {
    path.validate();
    if (!path.chart)
        throw std::invalid_argument("unexpanded_rate_integrand: path carries no chart");
    // In quantile coordinates the tangent vector d rho/dt - tau (Lap rho +
    // div(rho Psi')) has velocity dX/dt + tau (d/dx log rho + Psi'), so the
    // norm is a plain quadrature over u. Midpoint rule per interval.
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < path.states.size(); ++k) {
        const double dt = path.times[k + 1] - path.times[k];
        const auto& a = (*path.chart)[k];
        const auto& b = (*path.chart)[k + 1];
        const std::size_t m = a.size();
        std::vector<double> mid(m);
        for (std::size_t i = 0; i < m; ++i) mid[i] = 0.5 * (a[i] + b[i]);
        double acc = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const std::size_t bb = i == 0 ? 0 : (i + 1 == m ? m - 3 : i - 1);
            const double gp = mid[bb + 1] - mid[bb];
            const double gn = mid[bb + 2] - mid[bb + 1];
            const double s = gp + gn;
            const double D = (gp > 0.0 && gn > 0.0) ? -4.0 * (gn - gp) / (s * s) : 0.0;
            const double v = (b[i] - a[i]) / dt;
            const double r = v + tau * (D + psi.dpsi(mid[i]));
            acc += r * r;
        }
        total += dt * acc / static_cast<double>(m);
    }
    return total / (4.0 * tau);
}

GammaSweepResult gamma_sweep(const DensityMeasure& rho0, const DensityMeasure& rho1,
                             const Potential& psi, const std::vector<double>& taus,
                             RateMethod method, const GammaSweepOptions& opts) {
    if (taus.size() < 2)
        throw std::invalid_argument("gamma_sweep: need at least two tau values");
    for (std::size_t k = 0; k + 1 < taus.size(); ++k)
        if (!(taus[k] > taus[k + 1]))
            throw std::invalid_argument("gamma_sweep: taus must decrease");

    // finiteness hypotheses of the limit theorem
    for (const DensityMeasure* rho : {&rho0, &rho1}) {
        if (!std::isfinite(free_energy(*rho, psi)) ||
            fisher_information(*rho) > 1e12)
            throw std::invalid_argument(
                "gamma_sweep: endpoint fails the finiteness hypotheses (F, Fisher)");
        std::vector<double> t(rho->size());
        for (std::size_t i = 0; i < rho->size(); ++i) {
            const double dp = psi.dpsi(rho->grid().center(i));
            t[i] = dp * dp * rho->value(i);
        }
        if (!std::isfinite(rho->spacing() * pairwise_sum(t)))
            throw std::invalid_argument("gamma_sweep: drift energy not finite");
    }

    GammaSweepResult out;
    const double df = 0.5 * (free_energy(rho1, psi) - free_energy(rho0, psi));
    const double w = w2(rho0, rho1, opts.dynamic_opts.m_eval);

    for (double tau : taus) {
        RateReport rep;
        if (method == RateMethod::static_ipfp) {
            Kernel kernel = [&]() {
                if (psi.name() == "zero") return Kernel::heat();
                if (psi.name().rfind("quadratic:", 0) == 0) {
                    const double kappa = psi.d2psi(0.0);
                    return Kernel::ou(kappa);
                }
                throw std::invalid_argument(
                    "gamma_sweep: static method needs a closed-form kernel "
                    "(zero or quadratic potential)");
            }();
            StaticRateOptions sopts = opts.static_opts;
            sopts.want_coupling = false;
            const StaticRateResult r = j_static(rho0, rho1, kernel, tau, sopts);
            rep.method = "static";
            rep.j = r.j;
            rep.iters = r.sweeps;
            rep.marginal_err = r.marginal_err;
            rep.tau = tau;
            rep.delta_f = df;
            rep.w2_sq = w * w;
            rep.gamma_gap = rep.j - rep.w2_sq / (4.0 * tau) - df;
            rep.first_order_gap = tau * rep.j - 0.25 * rep.w2_sq;
        } else {
            rep = j_dynamic(rho0, rho1, psi, tau, opts.dynamic_opts).report;
        }
        out.reports.push_back(rep);
    }

    // Richardson: both gap ladders are O(tau); extrapolate linearly from the
    // two finest levels.
    const RateReport& r1 = out.reports[out.reports.size() - 2];
    const RateReport& r2 = out.reports.back();
    auto extrap = [&](double g1, double g2) {
        return (g2 * r1.tau - g1 * r2.tau) / (r1.tau - r2.tau);
    };
    out.extrapolated_gamma_gap = extrap(r1.gamma_gap, r2.gamma_gap);
    out.extrapolated_first_order_gap = extrap(r1.first_order_gap, r2.first_order_gap);
    return out;
}

}  // namespace wgf
