#include "wgf/potential.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "wgf/numerics.hpp"

namespace wgf {

namespace {

// Derivative consistency probe: central differences at a handful of points
// spanning a generic window, relative tolerance 1e-4.
void check_derivative(const std::function<double(double)>& f,
                      const std::function<double(double)>& df,
                      const std::string& name, const std::string& which) {
    const double pts[] = {-7.3, -3.1, -1.0, -0.37, 0.0, 0.52, 1.7, 4.9, 8.1};
    for (double x : pts) {
        const double step = 1e-5 * std::max(1.0, std::abs(x));
        const double fd = (f(x + step) - f(x - step)) / (2.0 * step);
        const double want = df(x);
        if (std::abs(fd - want) > 1e-4 * (1.0 + std::abs(want)))
            throw std::invalid_argument("Potential '" + name + "': " + which +
                                        " is not the derivative of its parent "
                                        "(mismatch at x=" + std::to_string(x) + ")");
    }
}

// Ratio-growth probe: max of r over the outer 10% of |x| against max over
// the inner half. A bounded quantity keeps the ratio near 1; polynomial
// growth pushes it well above the factor-2 threshold.
struct GrowthProbe {
    double inner_max = 0.0;
    double outer_max = 0.0;
    bool grows(double factor = 2.0) const {
        return outer_max > factor * std::max(inner_max, 1e-300);
    }
};

template <typename F>
GrowthProbe probe_growth(const Grid& probe, F&& r) {
    GrowthProbe g;
    const double radius = std::max(std::abs(probe.x_min), std::abs(probe.x_max));
    for (std::size_t i = 0; i < probe.n; ++i) {
        const double x = probe.center(i);
        const double v = std::abs(r(x));
        if (std::abs(x) <= 0.5 * radius) g.inner_max = std::max(g.inner_max, v);
        if (std::abs(x) >= 0.9 * radius) g.outer_max = std::max(g.outer_max, v);
    }
    return g;
}

// Rising-trend probe for f(x)/x^2 -> infinity checks: mean ratio over the
// outermost |x| decile must exceed the next decile by a clear margin.
template <typename F>
bool ratio_rises(const Grid& probe, F&& f, double margin = 1.2) {
    const double radius = std::max(std::abs(probe.x_min), std::abs(probe.x_max));
    double s_outer = 0.0, s_mid = 0.0;
    std::size_t n_outer = 0, n_mid = 0;
    for (std::size_t i = 0; i < probe.n; ++i) {
        const double x = probe.center(i);
        const double ax = std::abs(x);
        if (ax < 1.0) continue;  // ratios near the origin are uninformative
        const double r = f(x) / (x * x);
        if (ax >= 0.9 * radius) { s_outer += r; ++n_outer; }
        else if (ax >= 0.7 * radius && ax < 0.8 * radius) { s_mid += r; ++n_mid; }
    }
    if (n_outer == 0 || n_mid == 0) return false;
    const double outer = s_outer / static_cast<double>(n_outer);
    const double mid = s_mid / static_cast<double>(n_mid);
    return outer > margin * mid && outer > 0.0;
}

uint64_t splitmix64(uint64_t& s) {
    s += 0x9e3779b97f4a7c15ull;
    uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

double uniform01(uint64_t& s) {
    return static_cast<double>(splitmix64(s) >> 11) * 0x1.0p-53;
}

}  // namespace

Potential::Potential(std::string name, Fn psi, Fn dpsi, Fn d2psi, PotentialClass tag)
    : name_(std::move(name)), psi_(std::move(psi)), dpsi_(std::move(dpsi)),
      d2psi_(std::move(d2psi)), tag_(tag) {
    check_derivative(psi_, dpsi_, name_, "dpsi");
    check_derivative(dpsi_, d2psi_, name_, "d2psi");
}

Potential zero_potential() {
    auto z = [](double) { return 0.0; };
    return Potential("zero", z, z, z);
}

Potential quadratic_potential(double kappa) {
    return Potential("quadratic:" + std::to_string(kappa),
                     [kappa](double x) { return 0.5 * kappa * x * x; },
                     [kappa](double x) { return kappa * x; },
                     [kappa](double) { return kappa; });
}

Potential quartic_potential(double a) {
    return Potential("quartic:" + std::to_string(a),
                     [a](double x) { return a * x * x * x * x; },
                     [a](double x) { return 4.0 * a * x * x * x; },
                     [a](double x) { return 12.0 * a * x * x; });
}

Potential double_well_potential(double a, double b) {
    return Potential("double_well:" + std::to_string(a) + "," + std::to_string(b),
                     [a, b](double x) { return a * x * x * x * x - b * x * x; },
                     [a, b](double x) { return 4.0 * a * x * x * x - 2.0 * b * x; },
                     [a, b](double x) { return 12.0 * a * x * x - 2.0 * b; });
}

Potential make_potential(const std::string& spec) {
    const auto colon = spec.find(':');
    const std::string kind = spec.substr(0, colon);
    std::vector<double> args;
    if (colon != std::string::npos) {
        std::stringstream ss(spec.substr(colon + 1));
        std::string tok;
        while (std::getline(ss, tok, ','))
            if (!tok.empty()) args.push_back(std::stod(tok));
    }
    auto want = [&](std::size_t k) {
        if (args.size() != k)
            throw std::invalid_argument("potential '" + spec + "': expected " +
                                        std::to_string(k) + " parameter(s)");
    };
    if (kind == "zero") { want(0); return zero_potential(); }
    if (kind == "quadratic") { want(1); return quadratic_potential(args[0]); }
    if (kind == "quartic") { want(1); return quartic_potential(args[0]); }
    if (kind == "double_well") { want(2); return double_well_potential(args[0], args[1]); }
    throw std::invalid_argument("unknown potential '" + spec +
                                "' (known: zero, quadratic:k, quartic:a, double_well:a,b)");
}

ValidationReport validate_subquadratic(Potential& psi, const Grid& probe) {
    ValidationReport rep;
    rep.potential = psi.name();
    rep.assumption = "subquadratic";

    // 1. bounded from below
    double inf_psi = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < probe.n; ++i)
        inf_psi = std::min(inf_psi, psi.psi(probe.center(i)));
    rep.conditions.push_back(
        {"Psi bounded from below (witness: inf Psi on probe)",
         std::isfinite(inf_psi), inf_psi});

    // 2. |x||Psi'(x)| <= C (1 + x^2): the admissible C must stop growing
    auto ratio2 = [&](double x) { return std::abs(x) * std::abs(psi.dpsi(x)) / (1.0 + x * x); };
    const GrowthProbe g2 = probe_growth(probe, ratio2);
    rep.conditions.push_back(
        {"|x||Psi'| <= C(1+x^2) (witness: best C on probe)", !g2.grows(),
         std::max(g2.inner_max, g2.outer_max)});

    // 3. convexity
    double min_curv = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < probe.n; ++i)
        min_curv = std::min(min_curv, psi.d2psi(probe.center(i)));
    rep.conditions.push_back(
        {"Psi convex (witness: min Psi'')", min_curv >= -1e-9, min_curv});

    // 4. bounded Laplacian
    auto curv = [&](double x) { return psi.d2psi(x); };
    const GrowthProbe g4 = probe_growth(probe, curv);
    rep.conditions.push_back(
        {"Psi'' bounded (witness: sup |Psi''|)", !g4.grows(),
         std::max(g4.inner_max, g4.outer_max)});

    rep.passed = true;
    for (const auto& c : rep.conditions) rep.passed = rep.passed && c.passed;
    if (rep.passed) psi.set_class_tag(PotentialClass::subquadratic);
    return rep;
}

ValidationReport validate_superquadratic(Potential& psi, const Grid& probe) {
    ValidationReport rep;
    rep.potential = psi.name();
    rep.assumption = "superquadratic";
    const double h = probe.spacing();

    // 1. lambda-convexity of Psi (any finite lower curvature bound)
    double lam_psi = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < probe.n; ++i)
        lam_psi = std::min(lam_psi, psi.d2psi(probe.center(i)));
    rep.conditions.push_back(
        {"Psi semiconvex (witness: lambda_Psi)", std::isfinite(lam_psi), lam_psi});

    // 2. integral Psi e^{-2 Psi} finite, checked as tail decay of the
    //    integrand together with decay of the normalizer e^{-2 Psi}.
    {
        double integral = 0.0, edge = 0.0, norm_edge = 0.0;
        for (std::size_t i = 0; i < probe.n; ++i) {
            const double x = probe.center(i);
            const double w = std::exp(-2.0 * psi.psi(x));
            integral += h * std::abs(psi.psi(x)) * w;
            if (i == 0 || i + 1 == probe.n) {
                edge = std::max(edge, std::abs(psi.psi(x)) * w);
                norm_edge = std::max(norm_edge, w);
            }
        }
        const bool decays = norm_edge < 1e-4 && edge * probe.range() < 0.01 * (integral + 1e-12);
        rep.conditions.push_back(
            {"Psi e^{-2Psi} integrable (witness: probe quadrature)", decays, integral});
    }

    // 3. Psi / x^2 -> infinity
    rep.conditions.push_back(
        {"Psi superquadratic (Psi/x^2 rising at probe edge)",
         ratio_rises(probe, [&](double x) { return psi.psi(x); }),
         psi.psi(probe.x_max) / (probe.x_max * probe.x_max)});

    // 4. modulus-of-continuity pair with omega(r) = A r on sampled pairs
    {
        uint64_t seed = 0x5eedBEEF;
        double A = 0.0;
        bool ok = true;
        for (int k = 0; k < 4096; ++k) {
            const double x = probe.x_min + probe.range() * uniform01(seed);
            const double r = 1e-3 + (1.0 - 1e-3) * uniform01(seed);
            const double y = std::min(probe.x_max, std::max(probe.x_min,
                                x + (uniform01(seed) < 0.5 ? -r : r)));
            const double d = std::abs(y - x);
            if (d < 1e-12) continue;
            const double den1 = 1.0 + psi.psi(x);
            const double dP = psi.dpsi(x);
            const double den2 = 1.0 + dP * dP + psi.psi(x);
            if (den1 <= 0.0 || den2 <= 0.0) { ok = false; break; }
            const double diff = psi.psi(y) - psi.psi(x);
            A = std::max(A, diff / (d * den1));
            A = std::max(A, diff * diff / (d * den2));
        }
        ok = ok && A <= 1e6;
        rep.conditions.push_back(
            {"modulus pair admits omega(r)=A r (witness: fitted A)", ok, A});
    }

    // 5. zeta = |Psi'|^2 - 2 Psi'' superquadratic
    rep.conditions.push_back(
        {"zeta superquadratic (zeta/x^2 rising at probe edge)",
         ratio_rises(probe, [&](double x) { return psi.zeta(x); }),
         psi.zeta(probe.x_max) / (probe.x_max * probe.x_max)});

    // 6. lambda-convexity of zeta (finite-difference curvature of zeta)
    {
        double lam_zeta = std::numeric_limits<double>::infinity();
        for (std::size_t i = 1; i + 1 < probe.n; ++i) {
            const double x = probe.center(i);
            const double dd =
                (psi.zeta(x + h) - 2.0 * psi.zeta(x) + psi.zeta(x - h)) / (h * h);
            lam_zeta = std::min(lam_zeta, dd);
        }
        rep.conditions.push_back(
            {"zeta semiconvex (witness: lambda_zeta)", std::isfinite(lam_zeta), lam_zeta});
    }

    rep.passed = true;
    for (const auto& c : rep.conditions) rep.passed = rep.passed && c.passed;
    if (rep.passed) psi.set_class_tag(PotentialClass::superquadratic);
    return rep;
}

}  // namespace wgf
