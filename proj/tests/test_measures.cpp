#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "test_util.hpp"
#include "wgf/density.hpp"
#include "wgf/functionals.hpp"
#include "wgf/potential.hpp"
#include "wgf/smoothing.hpp"
#include "wgf/transport.hpp"

using namespace wgf;
using namespace testutil;

TEST_CASE("grid invariants") {
    CHECK_THROWS_AS(Grid(1.0, 0.0, 64), std::invalid_argument);
    CHECK_THROWS_AS(Grid(0.0, 1.0, 4), std::invalid_argument);
    const Grid g(-2.0, 2.0, 16);
    CHECK(g.spacing() == doctest::Approx(0.25));
    CHECK(g.center(0) == doctest::Approx(-1.875));
    CHECK(g.center(15) == doctest::Approx(1.875));
}

TEST_CASE("density normalization and moments") {
    const Grid g(-10.0, 10.0, 1024);
    const auto rho = gaussian_density(g, 0.5, 1.5);
    CHECK(std::abs(rho.total_mass() - 1.0) < 1e-10);
    CHECK(rho.mean() == doctest::Approx(0.5).epsilon(1e-6));
    // N(m, s^2): second moment m^2 + s^2
    CHECK(rho.second_moment() == doctest::Approx(0.25 + 2.25).epsilon(1e-6));

    CHECK_THROWS_AS(DensityMeasure(g, std::vector<double>(1024, -1.0)),
                    std::invalid_argument);
}

TEST_CASE("entropy: uniform, Gaussian closed forms") {
    const Grid g01(0.0, 1.0, 1024);
    const auto unif = uniform_density(g01, 0.0, 1.0);
    CHECK(std::abs(entropy(unif)) < 1e-12);  // log 1 = 0

    const Grid g(-10.0, 10.0, 1 << 16);
    // closed-form differential entropy, cross-checked by Simpson quadrature
    const double oracle = simpson(
        [](double x) {
            const double p = std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
            return p > 0.0 ? p * std::log(p) : 0.0;
        },
        -10.0, 10.0);
    CHECK(oracle == doctest::Approx(gaussian_entropy(1.0)).epsilon(1e-10));
    CHECK(entropy(gaussian_density(g, 0.0, 1.0)) ==
          doctest::Approx(-1.4189385332046727).epsilon(1e-8));
    CHECK(entropy(gaussian_density(g, 0.0, 0.5)) ==
          doctest::Approx(gaussian_entropy(0.5)).epsilon(1e-8));
}

TEST_CASE("entropy lower bound: uniform maximizes on the window") {
    const Grid g(-6.0, 6.0, 512);
    Rng rng(7);
    for (int rep = 0; rep < 20; ++rep) {
        const auto rho = random_density(g, rng);
        CHECK(entropy(rho) >= -std::log(g.range()) - 1e-12);
    }
}

TEST_CASE("internal and free energy") {
    const Grid g(-12.0, 12.0, 4096);
    const Potential zero = zero_potential();
    const Potential quad = quadratic_potential(1.0);
    const auto rho = gaussian_density(g, 0.0, 1.0);
    CHECK(internal_energy(rho, zero) == 0.0);
    CHECK(internal_energy(rho, quad) == doctest::Approx(0.5).epsilon(1e-8));
    const auto rho2 = gaussian_density(g, 1.5, 0.8);
    CHECK(internal_energy(rho2, quad) ==
          doctest::Approx(0.5 * (1.5 * 1.5 + 0.64)).epsilon(1e-8));
    CHECK(free_energy(rho, quad) ==
          doctest::Approx(gaussian_entropy(1.0) + 0.5).epsilon(1e-8));
}

TEST_CASE("free energy minimized by the stationary Gaussian") {
    // grid search over (m, sigma) for Psi = x^2/2: minimum at N(0,1)
    const Grid g(-12.0, 12.0, 2048);
    const Potential quad = quadratic_potential(1.0);
    const double f_star = free_energy(gaussian_density(g, 0.0, 1.0), quad);
    for (double m = -1.0; m <= 1.0; m += 0.5)
        for (double s = 0.6; s <= 1.6; s += 0.2) {
            if (std::abs(m) < 1e-12 && std::abs(s - 1.0) < 1e-12) continue;
            CHECK(free_energy(gaussian_density(g, m, s), quad) >= f_star - 1e-9);
        }
}

TEST_CASE("fisher information: Gaussian oracle") {
    const Grid g(-12.0, 12.0, 1 << 16);
    // quadrature oracle for N(0, sigma^2): integral (rho')^2/rho = 1/sigma^2
    const double sig = 0.7;
    const double oracle = simpson(
        [sig](double x) {
            const double p = std::exp(-0.5 * x * x / (sig * sig)) /
                             (sig * std::sqrt(2.0 * M_PI));
            const double dp = -x / (sig * sig) * p;
            return p > 1e-300 ? dp * dp / p : 0.0;
        },
        -12.0, 12.0);
    CHECK(oracle == doctest::Approx(1.0 / (sig * sig)).epsilon(1e-10));
    CHECK(fisher_information(gaussian_density(g, 0.0, sig)) ==
          doctest::Approx(1.0 / (sig * sig)).epsilon(1e-3));
    CHECK(fisher_information(gaussian_density(g, 0.0, 1.0)) ==
          doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("fisher information: uniform interior contributes nothing") {
    const Grid g(-4.0, 4.0, 512);
    const auto unif = uniform_density(g, -1.0, 1.0);
    // all of the (finite) value comes from the two jump cells
    double interior = 0.0;
    const double h = g.spacing();
    for (std::size_t i = 1; i + 1 < g.n; ++i) {
        if (std::abs(g.center(i)) > 0.9) continue;
        const double d = (unif.value(i + 1) - unif.value(i - 1)) / (2.0 * h);
        interior += h * d * d / std::max(unif.value(i), 1e-300);
    }
    CHECK(interior == 0.0);
    CHECK(fisher_information(unif) > 0.0);
}

TEST_CASE("relative entropy") {
    const Grid g(-12.0, 12.0, 8192);
    const auto rho = gaussian_density(g, 0.8, 1.0);
    const auto sigma = gaussian_density(g, 0.0, 1.0);
    CHECK(relative_entropy(rho, rho) == doctest::Approx(0.0).epsilon(1e-12));
    // KL(N(m,1) || N(0,1)) = m^2/2
    CHECK(relative_entropy(rho, sigma) == doctest::Approx(0.32).epsilon(1e-6));

    // absolute-continuity failure -> +inf sentinel
    const auto narrow = uniform_density(g, -1.0, 1.0);
    const auto wide = uniform_density(g, -3.0, 3.0);
    CHECK(std::isinf(relative_entropy(wide, narrow)));
    CHECK(std::isfinite(relative_entropy(narrow, wide)));
}

TEST_CASE("KL nonnegativity property") {
    const Grid g(-6.0, 6.0, 512);
    Rng rng(11);
    for (int rep = 0; rep < 25; ++rep) {
        const auto a = random_density(g, rng);
        const auto b = random_density(g, rng);
        const double kl = relative_entropy(a, b);
        CHECK(kl >= -1e-12);
    }
}

TEST_CASE("to_quantile: uniform and symmetric cases") {
    const Grid g(0.0, 1.0, 1024);
    const auto unif = uniform_density(g, 0.0, 1.0);
    const auto q = to_quantile(unif, 4).values();
    CHECK(q[0] == doctest::Approx(0.125).epsilon(1e-9));
    CHECK(q[1] == doctest::Approx(0.375).epsilon(1e-9));
    CHECK(q[2] == doctest::Approx(0.625).epsilon(1e-9));
    CHECK(q[3] == doctest::Approx(0.875).epsilon(1e-9));

    const Grid gg(-10.0, 10.0, 4096);
    const auto gauss = gaussian_density(gg, 0.0, 1.0);
    const auto q99 = to_quantile(gauss, 99).values();
    CHECK(std::abs(q99[49]) < gg.spacing());  // median of the standard normal
}

TEST_CASE("from_quantile: degenerate and round-trip") {
    const Grid g(-10.0, 10.0, 2048);
    // constant quantile array = Dirac: all mass lands in one or two cells
    const QuantileMeasure dirac(std::vector<double>(64, 0.37));
    const auto spike = from_quantile(dirac, g);
    double maxv = 0.0;
    double mass_near = 0.0;
    for (std::size_t i = 0; i < g.n; ++i) {
        maxv = std::max(maxv, spike.value(i));
        if (std::abs(g.center(i) - 0.37) < 2.0 * g.spacing())
            mass_near += g.spacing() * spike.value(i);
    }
    CHECK(mass_near == doctest::Approx(1.0).epsilon(1e-12));

    // round trip: second moments agree within the stated budget
    const auto rho = gaussian_density(g, 0.3, 1.2);
    for (std::size_t m : {512u, 4096u, 32768u}) {
        const auto back = from_quantile(to_quantile(rho, m), g);
        const double budget =
            4.0 * g.range() * (g.spacing() + g.range() / static_cast<double>(m));
        CHECK(std::abs(back.second_moment() - rho.second_moment()) <= budget);
    }

    // W2 round-trip bound from the spec contract
    const std::size_t m = 8192;
    const auto back = from_quantile(to_quantile(rho, m), g);
    CHECK(w2(back, rho, 1 << 14) <=
          2.0 * (g.spacing() + g.range() / static_cast<double>(m)));

    // quantiles outside the grid get clamped and reported
    double clipped = 0.0;
    std::vector<double> far{-30.0, -29.0, 0.0, 1.0, 2.0, 3.0};
    from_quantile(QuantileMeasure(far), g, &clipped);
    CHECK(clipped > 0.0);
}

TEST_CASE("mollify: moment identities and under-resolution guard") {
    const Grid g(-12.0, 12.0, 2048);
    const auto rho = gaussian_density(g, 0.0, 1.0);
    CHECK_THROWS_AS(mollify(rho, 0.5 * g.spacing() * 0.9), std::invalid_argument);

    // Gaussian convolution: N(0,1) * theta_eps = N(0, 1 + eps^2)
    const auto smooth = mollify(rho, 0.5);
    CHECK(smooth.second_moment() == doctest::Approx(1.25).epsilon(1e-6));
    CHECK(smooth.mean() == doctest::Approx(0.0).epsilon(1e-9));

    // Dirac-like single cell -> approximately N(x0, eps^2)
    std::vector<double> v(g.n, 0.0);
    v[1024] = 1.0;
    const DensityMeasure spike(g, std::move(v));
    const double x0 = g.center(1024);
    const auto blurred = mollify(spike, 0.5);
    CHECK(blurred.mean() == doctest::Approx(x0).epsilon(1e-9));
    CHECK(blurred.second_moment() - x0 * x0 ==
          doctest::Approx(0.25).epsilon(1e-3));
}

TEST_CASE("mollification Fisher bound (randomized property)") {
    const Grid g(-10.0, 10.0, 2048);
    Rng rng(23);
    for (int rep = 0; rep < 30; ++rep) {
        const auto rho = random_density(g, rng);
        for (double eps : {0.25, 0.5, 1.0}) {
            const double bound = 1.1 / (eps * eps);
            CHECK(fisher_information(mollify(rho, eps)) <= bound);
        }
    }
}

TEST_CASE("tail_splice: construction contract") {
    const Grid g(-10.0, 10.0, 4096);
    const auto rho0 = gaussian_density(g, 0.0, 1.0);
    const auto rho1 = gaussian_density(g, 0.3, 1.0);
    const double M = 6.0, eps = 0.05;
    const auto k = tail_splice(rho0, rho1, M, eps);

    // bit-identical tails beyond M + a (a = min(1, (x_max-M)/2) = 1)
    for (std::size_t i = 0; i < g.n; ++i)
        if (std::abs(g.center(i)) > M + 1.0) CHECK(k.value(i) == rho0.value(i));

    // normalized, strictly positive inside, finite Fisher
    CHECK(std::abs(k.total_mass() - 1.0) < 1e-10);
    for (std::size_t i = 0; i < g.n; ++i)
        if (std::abs(g.center(i)) <= M) CHECK(k.value(i) > 0.0);
    CHECK(std::isfinite(fisher_information(k)));

    // free energy close to F(rho1), improving as the splice tightens
    const Potential quad = quadratic_potential(1.0);
    const double f1 = free_energy(rho1, quad);
    double prev = std::numeric_limits<double>::infinity();
    for (double e : {eps, eps / 2.0, eps / 4.0}) {
        const double gap = std::abs(free_energy(tail_splice(rho0, rho1, M, e), quad) - f1);
        CHECK(gap < prev);
        prev = gap;
    }
    CHECK(prev <= 0.02 * std::abs(f1));

    // splicing a measure with itself stays close to it
    const auto self = tail_splice(rho0, rho0, M, eps);
    CHECK(w2(self, rho0, 4096) < 0.01);
}

TEST_CASE("tail_splice: error paths") {
    const Grid g(-10.0, 10.0, 2048);
    const auto rho0 = gaussian_density(g, 0.0, 1.0);
    const auto rho1 = gaussian_density(g, 0.3, 1.0);
    CHECK_THROWS_AS(tail_splice(rho0, rho1, 9.9, 0.05), std::invalid_argument);
    // rho0 vanishing at the splice radius
    const auto narrow = uniform_density(g, -2.0, 2.0);
    CHECK_THROWS_AS(tail_splice(narrow, rho1, 6.0, 0.05), std::invalid_argument);
}

TEST_CASE("second moment examples") {
    const Grid g(-12.0, 12.0, 4096);
    CHECK(second_moment(gaussian_density(g, 0.0, 1.0)) ==
          doctest::Approx(1.0).epsilon(1e-8));
    CHECK(second_moment(gaussian_density(g, 2.0, 0.5)) ==
          doctest::Approx(4.25).epsilon(1e-8));
    std::vector<double> v(g.n, 0.0);
    v[2048] = 1.0;  // cell centered nearest x=0
    CHECK(second_moment(DensityMeasure(g, std::move(v))) < 1e-4);
}

TEST_CASE("operations preserve normalization (property)") {
    const Grid g(-8.0, 8.0, 1024);
    Rng rng(37);
    for (int rep = 0; rep < 10; ++rep) {
        const auto rho = random_density(g, rng);
        CHECK(std::abs(mollify(rho, 0.3).total_mass() - 1.0) < 1e-10);
        CHECK(std::abs(from_quantile(to_quantile(rho, 2048), g).total_mass() - 1.0) <
              1e-10);
    }
}
