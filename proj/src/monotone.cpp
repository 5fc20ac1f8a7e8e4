#include "wgf/monotone.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace wgf {

std::vector<double> pav_project(const std::vector<double>& x) {
    const std::size_t n = x.size();
    std::vector<double> mean;   // block means
    std::vector<std::size_t> len;  // block lengths
    mean.reserve(n);
    len.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        mean.push_back(x[i]);
        len.push_back(1);
        while (mean.size() > 1 && mean[mean.size() - 2] > mean.back()) {
            const double m2 = mean.back();
            const auto l2 = static_cast<double>(len.back());
            mean.pop_back();
            len.pop_back();
            const auto l1 = static_cast<double>(len.back());
            mean.back() = (mean.back() * l1 + m2 * l2) / (l1 + l2);
            len.back() += static_cast<std::size_t>(l2);
        }
    }
    std::vector<double> out;
    out.reserve(n);
    for (std::size_t b = 0; b < mean.size(); ++b)
        out.insert(out.end(), len[b], mean[b]);
    return out;
}

std::vector<double> solve_banded_spd(BandedSpd A, std::vector<double> rhs) {
    const std::size_t n = A.n;
    const std::size_t bw = A.bandwidth;
    // banded Cholesky A = L L^T, L stored in the same layout
    for (std::size_t j = 0; j < n; ++j) {
        double d = A.band[0][j];
        const std::size_t k0 = j > bw ? j - bw : 0;
        for (std::size_t k = k0; k < j; ++k) {
            const double l = A.band[j - k][k];
            d -= l * l;
        }
        if (!(d > 0.0))
            throw std::runtime_error("solve_banded_spd: matrix not positive definite");
        const double dj = std::sqrt(d);
        A.band[0][j] = dj;
        for (std::size_t i = j + 1; i < std::min(n, j + bw + 1); ++i) {
            double v = A.band[i - j][j];
            const std::size_t kk0 = i > bw ? i - bw : 0;
            for (std::size_t k = std::max(kk0, k0); k < j; ++k)
                v -= A.band[i - k][k] * A.band[j - k][k];
            A.band[i - j][j] = v / dj;
        }
    }
    // forward substitution L y = rhs
    for (std::size_t i = 0; i < n; ++i) {
        double v = rhs[i];
        const std::size_t k0 = i > bw ? i - bw : 0;
        for (std::size_t k = k0; k < i; ++k) v -= A.band[i - k][k] * rhs[k];
        rhs[i] = v / A.band[0][i];
    }
    // back substitution L^T x = y
    for (std::size_t i = n; i-- > 0;) {
        double v = rhs[i];
        for (std::size_t j = i + 1; j < std::min(n, i + bw + 1); ++j)
            v -= A.band[j - i][i] * rhs[j];
        rhs[i] = v / A.band[0][i];
    }
    return rhs;
}

namespace {

double min_gap(const std::vector<double>& x) {
    double g = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < x.size(); ++i)
        g = std::min(g, x[i + 1] - x[i]);
    return g;
}

// Largest step keeping all gaps at least a fraction of their current size.
double fraction_to_boundary(const std::vector<double>& x,
                            const std::vector<double>& d) {
    double alpha = 1.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        const double dg = d[i + 1] - d[i];
        if (dg < 0.0) {
            const double g = x[i + 1] - x[i];
            alpha = std::min(alpha, -0.99 * g / dg);
        }
    }
    return alpha;
}

}  // namespace

MonotoneSolveResult minimize_monotone(const MonotoneObjective& obj,
                                      std::vector<double> x0,
                                      const MonotoneSolveOptions& opts) {
    std::vector<double> x = pav_project(x0);
    // spread exact ties so the gap barrier is finite
    if (min_gap(x) <= 0.0) {
        const double span = std::max(1e-12, x.back() - x.front());
        const double nudge = 1e-12 * span / static_cast<double>(x.size());
        for (std::size_t i = 1; i < x.size(); ++i)
            if (x[i] <= x[i - 1]) x[i] = x[i - 1] + nudge;
    }
    if (min_gap(x) <= 0.0)
        throw std::runtime_error("minimize_monotone: cannot make iterate strictly increasing");

    const std::size_t n = x.size();
    std::vector<double> grad(n);
    BandedSpd hess(n, obj.bandwidth);

    MonotoneSolveResult res;
    double value = obj.eval(x, &grad, &hess);
    if (!std::isfinite(value))
        throw std::runtime_error("minimize_monotone: infeasible starting point");

    auto projected_grad_norm = [&](const std::vector<double>& xx,
                                   const std::vector<double>& gg) {
        // pg = xx - PAV(xx - gg); equals gg at interior points
        std::vector<double> step(n);
        for (std::size_t i = 0; i < n; ++i) step[i] = xx[i] - gg[i];
        const std::vector<double> proj = pav_project(step);
        double nrm = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            nrm = std::max(nrm, std::abs(xx[i] - proj[i]));
        return nrm;
    };

    double lambda = 0.0;  // Levenberg damping, escalated on failure
    for (std::size_t it = 0; it < opts.max_iters; ++it) {
        res.iters = it;
        res.grad_norm = projected_grad_norm(x, grad);
        if (res.grad_norm <= opts.grad_tol * (1.0 + std::abs(value))) {
            res.converged = true;
            break;
        }

        std::vector<double> dir;
        for (int attempt = 0;; ++attempt) {
            BandedSpd H = hess;
            if (lambda > 0.0)
                for (std::size_t i = 0; i < n; ++i)
                    H.band[0][i] += lambda * (1.0 + hess.band[0][i]);
            try {
                std::vector<double> rhs(n);
                for (std::size_t i = 0; i < n; ++i) rhs[i] = -grad[i];
                dir = solve_banded_spd(std::move(H), std::move(rhs));
            } catch (const std::runtime_error&) {
                lambda = lambda == 0.0 ? 1e-8 : lambda * 100.0;
                if (attempt > 20)
                    throw std::runtime_error(
                        "minimize_monotone: Hessian model irreparably indefinite");
                continue;
            }
            double gd = 0.0;
            for (std::size_t i = 0; i < n; ++i) gd += grad[i] * dir[i];
            if (gd < 0.0) break;
            lambda = lambda == 0.0 ? 1e-8 : lambda * 100.0;
            if (attempt > 20)
                throw std::runtime_error("minimize_monotone: no descent direction");
        }

        double gd = 0.0;
        for (std::size_t i = 0; i < n; ++i) gd += grad[i] * dir[i];

        double alpha = fraction_to_boundary(x, dir);
        bool accepted = false;
        std::vector<double> trial(n);
        for (int ls = 0; ls < 60; ++ls) {
            for (std::size_t i = 0; i < n; ++i) trial[i] = x[i] + alpha * dir[i];
            const double v = obj.eval(trial, nullptr, nullptr);
            if (std::isfinite(v) && v <= value + opts.armijo * alpha * gd) {
                x = trial;
                value = v;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted)
            throw std::runtime_error(
                "minimize_monotone: line search failed (value " +
                std::to_string(value) + ", |pg| " + std::to_string(res.grad_norm) + ")");
        lambda *= 0.1;
        if (lambda < 1e-14) lambda = 0.0;
        value = obj.eval(x, &grad, &hess);
    }

    for (std::size_t i = 0; i + 1 < n; ++i)
        if (x[i] > x[i + 1])
            throw std::runtime_error("minimize_monotone: non-monotone iterate escaped projection");

    res.x = std::move(x);
    res.value = value;
    return res;
}

}  // namespace wgf
