#ifndef WGF_POTENTIAL_HPP
#define WGF_POTENTIAL_HPP

#include <functional>
#include <string>
#include <vector>

#include "wgf/grid.hpp"

namespace wgf {

enum class PotentialClass { unclassified, subquadratic, superquadratic };

// Drift potential with first and second derivatives. Construction verifies
// that dpsi/d2psi really are the derivatives (finite differences on a probe).
class Potential {
  public:
    using Fn = std::function<double(double)>;

    Potential(std::string name, Fn psi, Fn dpsi, Fn d2psi,
              PotentialClass tag = PotentialClass::unclassified);

    double psi(double x) const { return psi_(x); }
    double dpsi(double x) const { return dpsi_(x); }
    double d2psi(double x) const { return d2psi_(x); }
    // zeta = |psi'|^2 - 2 psi'' (the growth functional of the superquadratic class)
    double zeta(double x) const {
        const double d = dpsi_(x);
        return d * d - 2.0 * d2psi_(x);
    }

    const std::string& name() const { return name_; }
    PotentialClass class_tag() const { return tag_; }
    void set_class_tag(PotentialClass t) { tag_ = t; }

  private:
    std::string name_;
    Fn psi_, dpsi_, d2psi_;
    PotentialClass tag_;
};

// Built-in registry: "zero", "quadratic:kappa", "quartic:a",
// "double_well:a,b" (psi = a x^4 - b x^2).
Potential make_potential(const std::string& spec);

Potential zero_potential();
Potential quadratic_potential(double kappa);
Potential quartic_potential(double a);
Potential double_well_potential(double a, double b);

// One line per assumption condition: what was checked on the probe window,
// whether it held there, and the witnessing constant.
struct ConditionCheck {
    std::string description;
    bool passed = false;
    double witness = 0.0;
};

struct ValidationReport {
    std::string potential;
    std::string assumption;   // "subquadratic" or "superquadratic"
    bool passed = false;      // all conditions held on the probe
    std::vector<ConditionCheck> conditions;
    // Finite-grid checks are necessary conditions only, never a proof.
    std::string caveat = "necessary conditions verified on a finite probe window";
};

ValidationReport validate_subquadratic(Potential& psi, const Grid& probe);
ValidationReport validate_superquadratic(Potential& psi, const Grid& probe);

}  // namespace wgf

#endif
