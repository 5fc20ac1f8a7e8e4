#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "test_util.hpp"
#include "wgf/density.hpp"
#include "wgf/functionals.hpp"
#include "wgf/smoothing.hpp"
#include "wgf/transport.hpp"

using namespace wgf;
using namespace testutil;

namespace {
const Grid kGrid(-14.0, 14.0, 4096);
}

TEST_CASE("w2: Gaussian closed form") {
    const auto a = gaussian_density(kGrid, 0.0, 1.0);
    CHECK(w2(a, a, 1 << 14) == doctest::Approx(0.0).epsilon(1e-12));
    const auto b = gaussian_density(kGrid, 1.0, 1.0);
    CHECK(w2(a, b, 1 << 14) == doctest::Approx(1.0).epsilon(1e-4));
    const auto c = gaussian_density(kGrid, 0.0, 2.0);
    CHECK(w2(a, c, 1 << 14) == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("w2: symmetry, translation scaling, triangle inequality") {
    Rng rng(5);
    const auto a = random_density(kGrid, rng);
    const auto b = random_density(kGrid, rng);
    const auto c = random_density(kGrid, rng);
    const std::size_t m = 1 << 13;
    CHECK(w2(a, b, m) == doctest::Approx(w2(b, a, m)).epsilon(1e-12));
    CHECK(w2(a, b, m) + w2(b, c, m) >= w2(a, c, m) - 1e-6);

    // push by x -> x + c: distance |c|
    for (double shift : {0.5, 1.75}) {
        const auto g1 = gaussian_density(kGrid, 0.0, 1.0);
        const auto g2 = gaussian_density(kGrid, shift, 1.0);
        CHECK(std::abs(w2(g1, g2, m) - shift) < kGrid.spacing());
    }
}

TEST_CASE("monotone_map: identity, affine Gaussian map, errors") {
    const auto rho = gaussian_density(kGrid, 0.0, 1.0);
    const auto id = monotone_map(rho, rho);
    for (std::size_t i = 0; i < kGrid.n; ++i) {
        if (rho.value(i) < 1e-12) continue;
        CHECK(std::abs(id.targets[i] - kGrid.center(i)) <= kGrid.spacing());
    }

    // N(0,1) -> N(m, s^2): T(x) = m + s x
    const auto dst = gaussian_density(kGrid, 1.0, 1.5);
    const auto map = monotone_map(rho, dst);
    for (double x : {-2.0, -1.0, 0.0, 0.5, 2.0}) {
        const auto i = static_cast<std::size_t>((x - kGrid.x_min) / kGrid.spacing());
        CHECK(map.targets[i] ==
              doctest::Approx(1.0 + 1.5 * kGrid.center(i)).epsilon(2e-3));
    }
    for (std::size_t i = 0; i + 1 < kGrid.n; ++i)
        CHECK(map.targets[i] <= map.targets[i + 1]);

    // flat target CDF wider than 10h -> error
    const auto bimodal = [&]() {
        std::vector<double> v(kGrid.n, 0.0);
        for (std::size_t i = 0; i < kGrid.n; ++i) {
            const double x = kGrid.center(i);
            if (std::abs(x + 5.0) < 1.0 || std::abs(x - 5.0) < 1.0) v[i] = 1.0;
        }
        return DensityMeasure(kGrid, std::move(v));
    }();
    CHECK_THROWS_AS(monotone_map(rho, bimodal), std::invalid_argument);
}

TEST_CASE("monge_ampere_residual certifies maps") {
    const auto rho = gaussian_density(kGrid, 0.0, 1.0);
    const auto id = monotone_map(rho, rho);
    CHECK(monge_ampere_residual(id, rho) < 1e-3);

    const auto dst = gaussian_density(kGrid, 1.0, 1.5);
    auto map = monotone_map(rho, dst);
    const double base = monge_ampere_residual(map, dst);
    CHECK(base < 1e-3);

    // corrupt one interior cell: residual spikes by >10x
    const auto mid = kGrid.n / 2;
    map.targets[mid] += 0.1;
    CHECK(monge_ampere_residual(map, dst) > 10.0 * std::max(base, 1e-5));
}

TEST_CASE("geodesic: Gaussian displacement interpolation") {
    const auto a = gaussian_density(kGrid, 0.0, 1.0);
    const auto b = gaussian_density(kGrid, 2.0, 1.0);
    const auto path = geodesic(a, b, 8);
    path.validate();
    // every intermediate is N(2t, 1)
    for (std::size_t k = 0; k <= 8; ++k) {
        const double t = path.times[k];
        CHECK(path.states[k].mean() == doctest::Approx(2.0 * t).epsilon(1e-4));
        CHECK(path.states[k].second_moment() - std::pow(2.0 * t, 2) ==
              doctest::Approx(1.0).epsilon(1e-3));
    }
    // constant path (identical charts short-circuit to exact states)
    const auto cpath = geodesic(a, a, 4);
    for (const auto& st : cpath.states) CHECK(w2(st, a, 4096) == 0.0);
}

TEST_CASE("geodesic: constant speed on a random pair") {
    Rng rng(17);
    const auto a = random_density(kGrid, rng);
    const auto b = random_density(kGrid, rng);
    const std::size_t K = 8;
    const auto path = geodesic(a, b, K, 1 << 14);
    const double total = w2(a, b, 1 << 14);
    for (std::size_t j = 0; j < K; ++j)
        for (std::size_t k = j + 1; k <= K; ++k) {
            const double expect = (path.times[k] - path.times[j]) * total;
            const double got = w2(path.states[j], path.states[k], 1 << 14);
            CHECK(got == doctest::Approx(expect).epsilon(0.02));
        }
}

TEST_CASE("dual_norm_sq: zero, Fisher identity, translation field") {
    const auto rho = gaussian_density(kGrid, 0.0, 1.0);
    const std::size_t n = kGrid.n;
    const double h = kGrid.spacing();

    CHECK(dual_norm_sq(std::vector<double>(n, 0.0), rho) == 0.0);

    // s = Lap rho -> Fisher information = 1/sigma^2
    for (double sig : {0.7, 1.0, 1.6}) {
        const auto r = gaussian_density(kGrid, 0.3, sig);
        std::vector<double> lap(n, 0.0);
        for (std::size_t i = 1; i + 1 < n; ++i)
            lap[i] = (r.value(i + 1) - 2.0 * r.value(i) + r.value(i - 1)) / (h * h);
        CHECK(dual_norm_sq(lap, r) ==
              doctest::Approx(gaussian_fisher(sig)).epsilon(1e-3));
        CHECK(dual_norm_sq(lap, r) ==
              doctest::Approx(fisher_information(r)).epsilon(0.02));
    }

    // s = -(rho v)' with v = c: kinetic energy c^2
    const double c = 0.8;
    std::vector<double> s(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i)
        s[i] = -c * (rho.value(i + 1) - rho.value(i - 1)) / (2.0 * h);
    CHECK(dual_norm_sq(s, rho) == doctest::Approx(c * c).epsilon(1e-4));
    const TangentField tf = tangent_velocity(s, rho);
    CHECK(tf.kinetic_energy() == doctest::Approx(c * c).epsilon(1e-4));

    // nonzero total mass rejected
    std::vector<double> bad(n, 1.0);
    CHECK_THROWS_AS(dual_norm_sq(bad, rho), std::invalid_argument);
}

TEST_CASE("path_action: BB equality on geodesics, lower bound off them") {
    const auto a = gaussian_density(kGrid, 0.0, 1.0);
    const auto b = gaussian_density(kGrid, 1.0, 1.0);
    const auto path = geodesic(a, b, 32, 1 << 14);
    const double w2sq = std::pow(w2(a, b, 1 << 14), 2);
    CHECK(path_action(path) == doctest::Approx(w2sq).epsilon(0.03));

    // a non-geodesic path between the same endpoints stays above w2^2
    const auto detour = gaussian_density(kGrid, 0.5, 1.6);
    const auto leg1 = geodesic(a, detour, 16, 1 << 14);
    const auto leg2 = geodesic(detour, b, 16, 1 << 14);
    MeasurePath glued;
    glued.chart.emplace();
    for (std::size_t k = 0; k <= 16; ++k) {
        glued.times.push_back(0.5 * leg1.times[k]);
        glued.states.push_back(leg1.states[k]);
        glued.chart->push_back((*leg1.chart)[k]);
    }
    for (std::size_t k = 1; k <= 16; ++k) {
        glued.times.push_back(0.5 + 0.5 * leg2.times[k]);
        glued.states.push_back(leg2.states[k]);
        glued.chart->push_back((*leg2.chart)[k]);
    }
    CHECK(path_action(glued) >= w2sq * (1.0 - 0.03));
    CHECK(path_action(glued) > w2sq * 1.05);  // this detour is genuinely longer

    // constant path has zero action
    const auto cpath = geodesic(a, a, 4);
    CHECK(path_action(cpath) < 1e-10);

    CHECK_THROWS_AS(path_action(geodesic(a, b, 3)), std::invalid_argument);
}

TEST_CASE("grad_free_energy_norm_sq: stationarity and Gaussian values") {
    const Grid g(-12.0, 12.0, 8192);
    const Potential quad = quadratic_potential(1.0);
    const Potential zero = zero_potential();

    CHECK(grad_free_energy_norm_sq(gaussian_density(g, 0.0, 1.0), quad) < 1e-4);
    const auto r = gaussian_density(g, 0.0, 0.8);
    CHECK(grad_free_energy_norm_sq(r, zero) ==
          doctest::Approx(fisher_information(r)).epsilon(1e-10));
    // N(m,1) with Psi = x^2/2: integral (x - (x - m))^2 rho = m^2
    for (double m : {0.5, 1.0, 2.0})
        CHECK(grad_free_energy_norm_sq(gaussian_density(g, m, 1.0), quad) ==
              doctest::Approx(m * m).epsilon(1e-3));
}

TEST_CASE("chain rule along a geodesic") {
    const Grid g(-14.0, 14.0, 4096);
    const Potential quad = quadratic_potential(1.0);
    const auto a = gaussian_density(g, -0.5, 1.0);
    const auto b = gaussian_density(g, 1.0, 1.3);
    const std::size_t K = 32;
    const auto path = geodesic(a, b, K, 1 << 16);
    const double h = g.spacing();

    for (std::size_t k = 4; k + 4 < K; k += 5) {
        const double dt = path.times[k + 1] - path.times[k - 1];
        const double dFdt = (free_energy(path.states[k + 1], quad) -
                             free_energy(path.states[k - 1], quad)) / dt;
        // tangent s = d rho/dt, central difference of states
        std::vector<double> s(g.n), gradF(g.n, 0.0);
        for (std::size_t i = 0; i < g.n; ++i)
            s[i] = (path.states[k + 1].value(i) - path.states[k - 1].value(i)) / dt;
        const auto& mid = path.states[k];
        for (std::size_t i = 1; i + 1 < g.n; ++i) {
            const double lap =
                (mid.value(i + 1) - 2.0 * mid.value(i) + mid.value(i - 1)) / (h * h);
            const double dv = (mid.value(i + 1) * quad.dpsi(g.center(i + 1)) -
                               mid.value(i - 1) * quad.dpsi(g.center(i - 1))) /
                              (2.0 * h);
            gradF[i] = -(lap + dv);
        }
        const double pairing = dual_pairing(gradF, s, mid);
        const double scale =
            std::max({std::abs(dFdt), std::abs(pairing), 0.05});
        CHECK(std::abs(dFdt - pairing) <= 0.05 * scale);
    }
}

TEST_CASE("geodesic_functional_bounds on a spliced pair") {
    const Grid g(-10.0, 10.0, 4096);
    const Potential quad = quadratic_potential(1.0);
    const auto rho0 = gaussian_density(g, 0.0, 1.0);
    const auto rho1 = tail_splice(rho0, gaussian_density(g, 0.3, 1.0), 6.0, 0.05);

    const auto rep = geodesic_functional_bounds(rho0, rho1, quad, 16);
    const double i0 = fisher_information(rho0);
    const double i1 = fisher_information(rho1);
    // genuinely ~2.2: rho1's truncated interior halves the density near |x|=M
    CHECK(rep.sup_tprime <= 2.5);
    CHECK(rep.max_fisher <= rep.comparison_constant * (i0 + i1) * 1.1);
    // F along the geodesic of a convex potential stays below the endpoints
    const double f_ends = std::max(free_energy(rho0, quad), free_energy(rho1, quad));
    CHECK(rep.max_free_energy <= f_ends + 0.01 * std::abs(f_ends));
    CHECK(std::isfinite(rep.max_drift_energy));

    // rho0 = rho1: maxima equal endpoint values
    const auto self = geodesic_functional_bounds(rho0, rho0, quad, 8);
    CHECK(self.max_fisher == doctest::Approx(i0).epsilon(1e-6));
    CHECK(self.max_free_energy ==
          doctest::Approx(free_energy(rho0, quad)).epsilon(1e-9));

    // non-tail-matched inputs rejected
    CHECK_THROWS_AS(
        geodesic_functional_bounds(rho0, gaussian_density(g, 0.3, 1.0), quad, 8),
        std::invalid_argument);
}

TEST_CASE("BB lower bound holds for every generated path (property)") {
    Rng rng(41);
    for (int rep = 0; rep < 6; ++rep) {
        const auto a = random_density(kGrid, rng);
        const auto b = random_density(kGrid, rng);
        const auto path = geodesic(a, b, 8, 1 << 13);
        const double w2sq = std::pow(w2(a, b, 1 << 13), 2);
        CHECK(path_action(path) >= w2sq * (1.0 - 0.03) - 1e-9);
    }
}
