#include "wgf/functionals.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "wgf/numerics.hpp"

namespace wgf {

double entropy(const DensityMeasure& rho) {
    const auto& v = rho.values();
    std::vector<double> t(v.size(), 0.0);
    for (std::size_t i = 0; i < v.size(); ++i)
        if (v[i] > kDensityFloor) t[i] = v[i] * std::log(v[i]);
    return rho.spacing() * pairwise_sum(t);
}

double internal_energy(const DensityMeasure& rho, const Potential& psi) {
    const auto& v = rho.values();
    std::vector<double> t(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        t[i] = psi.psi(rho.grid().center(i)) * v[i];
    return rho.spacing() * pairwise_sum(t);
}

double free_energy(const DensityMeasure& rho, const Potential& psi) {
    return entropy(rho) + internal_energy(rho, psi);
}

double fisher_information(const DensityMeasure& rho, FloorDiagnostics* diag) {
    const auto& v = rho.values();
    const std::size_t n = v.size();
    const double h = rho.spacing();
    std::vector<double> t(n, 0.0);
    double floored_mass = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (v[i] <= kDensityFloor) {
            floored_mass += h * v[i];
            continue;
        }
        double d;
        if (i == 0)
            d = (v[1] - v[0]) / h;
        else if (i == n - 1)
            d = (v[n - 1] - v[n - 2]) / h;
        else
            d = (v[i + 1] - v[i - 1]) / (2.0 * h);
        t[i] = d * d / v[i];
    }
    if (diag) {
        diag->floored_mass = floored_mass;
        diag->reliable = floored_mass <= 0.5;
    }
    return h * pairwise_sum(t);
}

double relative_entropy(const DensityMeasure& rho, const DensityMeasure& sigma) {
    if (!(rho.grid() == sigma.grid()))
        throw std::invalid_argument("relative_entropy: measures on different grids");
    const auto& p = rho.values();
    const auto& q = sigma.values();
    std::vector<double> t(p.size(), 0.0);
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] <= kDensityFloor) continue;  // 0 log 0 = 0
        if (q[i] == 0.0)  // genuine absolute-continuity failure
            return std::numeric_limits<double>::infinity();
        t[i] = p[i] * std::log(p[i] / q[i]);
    }
    return rho.spacing() * pairwise_sum(t);
}

double second_moment(const DensityMeasure& rho) { return rho.second_moment(); }

}  // namespace wgf
