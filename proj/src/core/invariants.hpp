#pragma once

#include <optional>
#include <string>

#include "core/grid.hpp"

namespace wg {

// The invariant quadruple: principal curvatures (nu1, nu2) and principal
// geodesic curvatures (gamma1, gamma2) on a shared grid, plus a validity
// mask. Analytic derivative fields, when supplied, are used verbatim by
// every consumer; otherwise finite differences are taken.
struct Quadruple {
  Field nu1, nu2, g1, g2;
  Mask mask;
  std::optional<Field> nu1_u, nu1_v, nu2_u, nu2_v;

  void validate() const {
    require_same_grid(nu1.grid, nu2.grid, "quadruple fields");
    require_same_grid(nu1.grid, g1.grid, "quadruple fields");
    require_same_grid(nu1.grid, g2.grid, "quadruple fields");
    require_same_grid(nu1.grid, mask.grid, "quadruple mask");
    for (const auto* d : {&nu1_u, &nu1_v, &nu2_u, &nu2_v})
      if (d->has_value())
        require_same_grid(nu1.grid, (*d)->grid, "quadruple derivatives");
  }
  const Grid& grid() const { return nu1.grid; }
};

// Principal-net fundamental forms; F and M vanish identically.
struct Forms {
  Field E, F, G, L, M, N;
  const Grid& grid() const { return E.grid; }
};

struct Frenet {
  Field kappa1, kappa2, tau1, tau2, theta1, theta2;
  Mask mask;
};

// Derivatives of nu1/nu2 honoring analytic fields when present.
Field nu1_deriv(const Quadruple& q, Axis axis);
Field nu2_deriv(const Quadruple& q, Axis axis);

// Restriction to a subrectangle (all fields, mask, derivative fields).
Quadruple crop_quadruple(const Quadruple& q, const Rect& r);

// Node valid iff |nu1-nu2| > tol, |gamma1| > tol, |gamma2| > tol and
// nu1 - nu2 > 0 (frame orientation convention), intersected with the
// quadruple's own mask.
Mask strong_regularity_mask(const Quadruple& q, double tol = 1e-9);

// sqrt(E) = (nu2)_u / (gamma2 (nu1-nu2)), sqrt(G) = (nu1)_v /
// (gamma1 (nu1-nu2)), with the signed difference: orientation-consistent
// sign pairs cancel, so charts of either frame orientation are accepted.
// OrientationViolation signals a nonpositive sqrt(E) or sqrt(G) at a valid
// node, StrongRegularityViolation a vanishing gamma or nu1 = nu2.
Forms forms_from_invariants(const Quadruple& q, double tol = 1e-9);

struct CodazziResiduals {
  Field r1, r2;
  Mask mask;
};

// r1 = gamma1 - (nu1)_v/(sqrt(G)(nu1-nu2)),
// r2 = gamma2 - (nu2)_u/(sqrt(E)(nu1-nu2)).
CodazziResiduals codazzi_residual(const Quadruple& q, const Forms& forms);

struct GaussResidual {
  Field r;
  Mask mask;
};

// (gamma1)_v/sqrt(G) - (gamma2)_u/sqrt(E) - (gamma1^2+gamma2^2) - nu1 nu2.
GaussResidual gauss_residual(const Quadruple& q, const Forms& forms);

// The three admissibility conditions of the invariant existence theorem:
// 1) pointwise positivity: nu1-nu2 > 0, gamma1 (nu1)_v > 0,
//    gamma2 (nu2)_u > 0;
// 2.1) (ln((nu1)_v/gamma1))_u = (nu1)_u/(nu1-nu2) and
//      (ln((nu2)_u/gamma2))_v = -(nu2)_v/(nu1-nu2), as residual fields;
// 2.2) the invariant Gauss identity
//      (nu1-nu2)/2 [ (gamma1^2)_v/(nu1)_v - (gamma2^2)_u/(nu2)_u ]
//        - (gamma1^2+gamma2^2) = nu1 nu2, as a residual field.
struct AdmissibilityReport {
  bool cond1 = false, cond21 = false, cond22 = false, pass = false;
  double min_nu_diff = 0;       // min over valid nodes of nu1-nu2
  double min_g1_nu1v = 0;       // min of gamma1 (nu1)_v
  double min_g2_nu2u = 0;       // min of gamma2 (nu2)_u
  double res21_u = 0, res21_v = 0, res22 = 0;  // max-norm residuals
  double tol = 0;
  std::string failed_condition;  // empty when pass
};

AdmissibilityReport bonnet_admissibility(const Quadruple& q, double tol);

// kappa_i = sqrt(gamma_i^2 + nu_i^2); theta_i = atan2(gamma_i, nu_i);
// tau_1 = (gamma1 X(nu1) - nu1 X(gamma1))/kappa1^2 with X = (1/sqrt(E)) d/du
// (the branch-safe form of -X(theta1)), and symmetrically
// tau_2 = (gamma2 Y(nu2) - nu2 Y(gamma2))/kappa2^2 with Y = (1/sqrt(G)) d/dv.
Frenet principal_line_frenet(const Quadruple& q, const Forms& forms,
                             double tol = 1e-12);

}  // namespace wg
