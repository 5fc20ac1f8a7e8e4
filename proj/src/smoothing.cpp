#include "wgf/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "wgf/numerics.hpp"

namespace wgf {

namespace {

// Discrete convolution with the Gaussian of standard deviation eps,
// truncated at 12 eps. Input given as raw cell values; output unnormalized.
std::vector<double> convolve_gaussian(const Grid& g, const std::vector<double>& v,
                                      double eps) {
    const double h = g.spacing();
    const std::size_t n = g.n;
    const auto reach = static_cast<std::ptrdiff_t>(std::ceil(12.0 * eps / h));
    std::vector<double> kernel(2 * reach + 1);
    for (std::ptrdiff_t k = -reach; k <= reach; ++k)
        kernel[k + reach] = gaussian_pdf(static_cast<double>(k) * h, 0.0, eps);
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (v[i] == 0.0) continue;
        const double w = v[i] * h;
        const auto lo = std::max<std::ptrdiff_t>(0, static_cast<std::ptrdiff_t>(i) - reach);
        const auto hi = std::min<std::ptrdiff_t>(n - 1, static_cast<std::ptrdiff_t>(i) + reach);
        for (std::ptrdiff_t j = lo; j <= hi; ++j)
            out[j] += w * kernel[j - static_cast<std::ptrdiff_t>(i) + reach];
    }
    return out;
}

}  // namespace

DensityMeasure mollify(const DensityMeasure& rho, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("mollify: eps must be positive");
    const double h = rho.spacing();
    if (eps < 0.5 * h)
        throw std::invalid_argument("mollify: kernel narrower than grid (eps < h/2)");
    auto out = convolve_gaussian(rho.grid(), rho.values(), eps);
    return DensityMeasure(rho.grid(), std::move(out));
}

DensityMeasure tail_splice(const DensityMeasure& rho0, const DensityMeasure& rho1,
                           double M, double eps) {
    if (!(rho0.grid() == rho1.grid()))
        throw std::invalid_argument("tail_splice: measures on different grids");
    const Grid& g = rho0.grid();
    const double h = g.spacing();
    if (!(M > 0.0)) throw std::invalid_argument("tail_splice: M must be positive");
    const double a = std::min(1.0, 0.5 * (g.x_max - M));
    if (!(a >= 8.0 * h) || M + a > g.x_max - 4.0 * h || -(M + a) < g.x_min + 4.0 * h)
        throw std::invalid_argument(
            "tail_splice: M too close to the grid boundary for blend width a");
    if (eps < 0.5 * h)
        throw std::invalid_argument("tail_splice: kernel narrower than grid (eps < h/2)");

    const std::size_t n = g.n;

    // rho0 must be bounded away from zero at the splice radius.
    for (std::size_t i = 0; i < n; ++i) {
        const double ax = std::abs(g.center(i));
        if (ax >= M - h && ax <= M + h && rho0.value(i) <= 1e-250)
            throw std::invalid_argument(
                "tail_splice: rho0 vanishes near |x| = M; splice requires a "
                "positive lower bound there");
    }

    // g1: mollified interior block of rho1 with quadratic decay ramps.
    std::vector<double> interior(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        if (std::abs(g.center(i)) <= M) interior[i] = rho1.value(i);
    std::vector<double> g1 = convolve_gaussian(g, interior, eps);
    // ramp amplitudes: mollified value at the outermost interior cells
    std::size_t first_in = n, last_in = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(g.center(i)) <= M) {
            if (first_in == n) first_in = i;
            last_in = i;
        }
    }
    if (first_in == n)
        throw std::invalid_argument("tail_splice: grid has no cells inside [-M, M]");
    const double amp_l = g1[first_in], amp_r = g1[last_in];
    for (std::size_t i = 0; i < n; ++i) {
        const double x = g.center(i);
        if (std::abs(x) <= M) continue;
        if (x > M && x < M + a) {
            const double r = (M + a - x) / a;
            g1[i] = amp_r * r * r;
        } else if (x < -M && x > -M - a) {
            const double r = (x + M + a) / a;
            g1[i] = amp_l * r * r;
        } else {
            g1[i] = 0.0;
        }
    }

    // g2: exact rho0 tails with quadratic onset ramps inside [M-a, M].
    std::vector<double> g2(n, 0.0);
    double tail_l = 0.0, tail_r = 0.0;  // rho0 at the first tail cells
    for (std::size_t i = 0; i < n; ++i)
        if (g.center(i) >= M) { tail_r = rho0.value(i); break; }
    for (std::size_t i = n; i-- > 0;)
        if (g.center(i) <= -M) { tail_l = rho0.value(i); break; }
    for (std::size_t i = 0; i < n; ++i) {
        const double x = g.center(i);
        if (std::abs(x) >= M) {
            g2[i] = rho0.value(i);  // copied verbatim
        } else if (x > M - a) {
            const double r = (x - (M - a)) / a;
            g2[i] = tail_r * r * r;
        } else if (x < -(M - a)) {
            const double r = (-(M - a) - x) / a;
            g2[i] = tail_l * r * r;
        }
    }

    const double norm_g1 = h * pairwise_sum(g1);
    const double norm_g2 = h * pairwise_sum(g2);
    if (!(norm_g1 > 0.0))
        throw std::invalid_argument("tail_splice: rho1 has no mass inside [-M, M]");
    if (norm_g2 >= 1.0)
        throw std::invalid_argument("tail_splice: tail mass of rho0 is not small");

    const double c = (1.0 - norm_g2) / norm_g1;
    std::vector<double> k(n);
    for (std::size_t i = 0; i < n; ++i) k[i] = g1[i] * c + g2[i];

    for (std::size_t i = 0; i < n; ++i)
        if (std::abs(g.center(i)) <= M && !(k[i] > 0.0))
            throw std::runtime_error(
                "tail_splice: result not strictly positive on [-M, M] "
                "(rho1 too rough for this eps)");

    return DensityMeasure::adopt_normalized(g, std::move(k));
}

}  // namespace wgf
