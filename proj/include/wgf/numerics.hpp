#ifndef WGF_NUMERICS_HPP
#define WGF_NUMERICS_HPP

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace wgf {

// Density floor: cells below this are excluded from log/quotient functionals.
inline constexpr double kDensityFloor = 1e-30;

// Deterministic pairwise (tree) reduction. Fixed association order, so results
// are bit-reproducible regardless of caller context.
inline double pairwise_sum(std::span<const double> v) {
    const std::size_t n = v.size();
    if (n <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

inline double pairwise_sum(const std::vector<double>& v) {
    return pairwise_sum(std::span<const double>(v));
}

inline double sum_abs(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += std::abs(x);
    return s;
}

inline double gaussian_pdf(double x, double mean, double sigma) {
    const double z = (x - mean) / sigma;
    return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * M_PI));
}

// log(sum_i exp(v_i)) without overflow; -inf for an empty or all -inf input.
inline double log_sum_exp(std::span<const double> v) {
    double mx = -std::numeric_limits<double>::infinity();
    for (double x : v) mx = std::max(mx, x);
    if (!std::isfinite(mx)) return mx;
    double s = 0.0;
    for (double x : v) s += std::exp(x - mx);
    return mx + std::log(s);
}

}  // namespace wgf

#endif
