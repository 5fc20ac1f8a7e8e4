#ifndef WGF_MONOTONE_HPP
#define WGF_MONOTONE_HPP

#include <cstddef>
#include <functional>
#include <vector>

namespace wgf {

// Euclidean projection onto the nondecreasing cone (pool adjacent violators).
std::vector<double> pav_project(const std::vector<double>& x);

// Symmetric banded positive-definite system, stored by diagonals:
// band[0] = main diagonal, band[d][i] = A(i, i+d). Solved by banded
// Cholesky; throws when the matrix is not positive definite.
struct BandedSpd {
    std::size_t n = 0;
    std::size_t bandwidth = 0;  // number of off-diagonals
    std::vector<std::vector<double>> band;

    explicit BandedSpd(std::size_t n_, std::size_t bw)
        : n(n_), bandwidth(bw), band(bw + 1, std::vector<double>(n_, 0.0)) {}
    void clear() {
        for (auto& d : band) std::fill(d.begin(), d.end(), 0.0);
    }
};

std::vector<double> solve_banded_spd(BandedSpd A, std::vector<double> rhs);

// Smooth objective over strictly increasing vectors. eval fills gradient and
// the SPD (Gauss-Newton style) banded Hessian model and returns the value;
// it may return +infinity for infeasible points (nonpositive gaps).
struct MonotoneObjective {
    std::size_t bandwidth = 1;
    std::function<double(const std::vector<double>& x, std::vector<double>* grad,
                         BandedSpd* hess)>
        eval;
};

struct MonotoneSolveOptions {
    double grad_tol = 1e-8;     // on |pg|_inf <= grad_tol * (1 + |G|)
    std::size_t max_iters = 500;
    double armijo = 1e-4;
};

struct MonotoneSolveResult {
    std::vector<double> x;
    double value = 0.0;
    double grad_norm = 0.0;  // projected-gradient infinity norm at exit
    std::size_t iters = 0;
    bool converged = false;
};

// Damped projected Newton with fraction-to-boundary steps and Armijo
// backtracking. Iterates stay strictly increasing; throws on line-search
// failure after damping escalation.
MonotoneSolveResult minimize_monotone(const MonotoneObjective& obj,
                                      std::vector<double> x0,
                                      const MonotoneSolveOptions& opts = {});

}  // namespace wgf

#endif
