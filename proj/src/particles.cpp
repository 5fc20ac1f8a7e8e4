#include "wgf/particles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "wgf/numerics.hpp"

namespace wgf {

namespace {

std::uint64_t splitmix64(std::uint64_t& s) {
    s += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

}  // namespace

NormalStream::NormalStream(std::uint64_t seed, std::uint64_t particle) {
    // decorrelate the per-particle stream origin from (seed, k)
    std::uint64_t s = seed;
    splitmix64(s);
    s ^= 0x9e3779b97f4a7c15ull * (particle + 1);
    splitmix64(s);
    state = s;
}

double NormalStream::next_uniform() {
    const std::uint64_t bits = splitmix64(state) >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double NormalStream::next_normal() {
    if (have_spare) {
        have_spare = false;
        return spare;
    }
    const double u1 = next_uniform();
    const double u2 = next_uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    spare = r * std::sin(a);
    have_spare = true;
    return r * std::cos(a);
}

ParticleEnsemble simulate(const DensityMeasure& rho0, const Potential& psi,
                          std::size_t N, double tau, double dt,
                          std::uint64_t seed) {
    if (N < 10) throw std::invalid_argument("simulate: need N >= 10");
    if (!(tau > 0.0) || !(dt > 0.0))
        throw std::invalid_argument("simulate: tau and dt must be positive");
    if (dt > tau / 10.0)
        throw std::invalid_argument("simulate: need dt <= tau/10");

    const auto steps = static_cast<std::size_t>(std::ceil(tau / dt - 1e-12));
    const double dt_eff = tau / static_cast<double>(steps);
    const double noise = std::sqrt(2.0 * dt_eff);
    const double window =
        10.0 * std::max({std::abs(rho0.grid().x_min), std::abs(rho0.grid().x_max), 1.0});

    ParticleEnsemble ens;
    ens.positions = to_quantile(rho0, N).values();
    for (std::size_t k = 0; k < N; ++k) {
        NormalStream stream(seed, k);
        double x = ens.positions[k];
        for (std::size_t s = 0; s < steps; ++s) {
            x += -psi.dpsi(x) * dt_eff + noise * stream.next_normal();
            if (!(std::abs(x) <= window))
                throw std::runtime_error(
                    "simulate: particle escaped the safety window under potential '" +
                    psi.name() + "' (likely non-confining)");
        }
        ens.positions[k] = x;
    }
    return ens;
}

std::vector<LlnPoint> lln_diagnostic(const DensityMeasure& rho0,
                                     const Potential& psi, const Kernel& kernel,
                                     double tau, const std::vector<std::size_t>& Ns,
                                     std::uint64_t seed) {
    const DensityMeasure ref = convolve_kernel(rho0, kernel, tau);
    std::vector<LlnPoint> out;
    for (std::size_t N : Ns) {
        const std::vector<double> q = to_quantile(ref, N).values();
        std::vector<double> errs;
        for (std::uint64_t rep = 0; rep < 5; ++rep) {
            const ParticleEnsemble ens = simulate(rho0, psi, N, tau, tau / 50.0,
                                                  seed + 1000 * rep);
            const std::vector<double> sorted = ens.sorted_positions();
            double s = 0.0;
            for (std::size_t k = 0; k < N; ++k) {
                const double d = sorted[k] - q[k];
                s += d * d;
            }
            errs.push_back(std::sqrt(s / static_cast<double>(N)));
        }
        std::sort(errs.begin(), errs.end());
        out.push_back({N, errs[errs.size() / 2]});
    }
    return out;
}

double lln_slope(const std::vector<LlnPoint>& points) {
    const auto n = static_cast<double>(points.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (const auto& p : points) {
        const double x = std::log(static_cast<double>(p.N));
        const double y = std::log(p.w2_error);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace wgf
