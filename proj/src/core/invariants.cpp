#include "core/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "core/errors.hpp"

namespace wg {

Field nu1_deriv(const Quadruple& q, Axis axis) {
  if (axis == Axis::U && q.nu1_u) return *q.nu1_u;
  if (axis == Axis::V && q.nu1_v) return *q.nu1_v;
  return partial_derivative(q.nu1, axis);
}

Field nu2_deriv(const Quadruple& q, Axis axis) {
  if (axis == Axis::U && q.nu2_u) return *q.nu2_u;
  if (axis == Axis::V && q.nu2_v) return *q.nu2_v;
  return partial_derivative(q.nu2, axis);
}

Quadruple crop_quadruple(const Quadruple& q, const Rect& r) {
  q.validate();
  Quadruple out{crop_field(q.nu1, r), crop_field(q.nu2, r),
                crop_field(q.g1, r),  crop_field(q.g2, r),
                crop_mask(q.mask, r), {},
                {},                   {},
                {}};
  if (q.nu1_u) out.nu1_u = crop_field(*q.nu1_u, r);
  if (q.nu1_v) out.nu1_v = crop_field(*q.nu1_v, r);
  if (q.nu2_u) out.nu2_u = crop_field(*q.nu2_u, r);
  if (q.nu2_v) out.nu2_v = crop_field(*q.nu2_v, r);
  return out;
}

Mask strong_regularity_mask(const Quadruple& q, double tol) {
  q.validate();
  Mask out(q.grid());
  for (std::size_t k = 0; k < q.grid().n(); ++k) {
    const double d = q.nu1.a[k] - q.nu2.a[k];
    const bool ok = q.mask.on[k] != 0 && std::abs(d) > tol &&
                    std::abs(q.g1.a[k]) > tol && std::abs(q.g2.a[k]) > tol &&
                    d > 0.0;
    out.on[k] = ok ? 1 : 0;
  }
  return out;
}

Forms forms_from_invariants(const Quadruple& q, double tol) {
  q.validate();
  const Grid& g = q.grid();
  Field nu2u = nu2_deriv(q, Axis::U);
  Field nu1v = nu1_deriv(q, Axis::V);

  Forms f{Field(g), Field(g), Field(g), Field(g), Field(g), Field(g)};
  for (std::size_t k = 0; k < g.n(); ++k) {
    if (!q.mask.on[k]) continue;
    const double d = q.nu1.a[k] - q.nu2.a[k];  // signed, as in the relations
    if (std::abs(d) <= tol)
      raise(Status::StrongRegularityViolation,
            "coincident principal curvatures at a valid node");
    if (std::abs(q.g1.a[k]) <= tol || std::abs(q.g2.a[k]) <= tol)
      raise(Status::StrongRegularityViolation,
            "vanishing principal geodesic curvature at a valid node");
    const double se = nu2u.a[k] / (q.g2.a[k] * d);
    const double sg = nu1v.a[k] / (q.g1.a[k] * d);
    if (!(se > 0.0) || !(sg > 0.0))
      raise(Status::OrientationViolation,
            "nonpositive metric coefficient from the curvature relations");
    f.E.a[k] = se * se;
    f.G.a[k] = sg * sg;
    f.L.a[k] = q.nu1.a[k] * f.E.a[k];
    f.N.a[k] = q.nu2.a[k] * f.G.a[k];
  }
  return f;
}

CodazziResiduals codazzi_residual(const Quadruple& q, const Forms& forms) {
  q.validate();
  require_same_grid(q.grid(), forms.grid(), "codazzi residual");
  const Grid& g = q.grid();
  Field nu1v = nu1_deriv(q, Axis::V);
  Field nu2u = nu2_deriv(q, Axis::U);
  Mask m = q.mask;
  if (!q.nu1_v) m = propagate_derivative_mask(m, Axis::V);
  if (!q.nu2_u) m = propagate_derivative_mask(m, Axis::U);

  CodazziResiduals out{Field(g), Field(g), m};
  for (std::size_t k = 0; k < g.n(); ++k) {
    if (!m.on[k]) continue;
    const double d = q.nu1.a[k] - q.nu2.a[k];
    const double se = std::sqrt(forms.E.a[k]);
    const double sg = std::sqrt(forms.G.a[k]);
    if (d == 0.0 || se == 0.0 || sg == 0.0) {
      out.mask.on[k] = 0;
      continue;
    }
    out.r1.a[k] = q.g1.a[k] - nu1v.a[k] / (sg * d);
    out.r2.a[k] = q.g2.a[k] - nu2u.a[k] / (se * d);
  }
  return out;
}

GaussResidual gauss_residual(const Quadruple& q, const Forms& forms) {
  q.validate();
  require_same_grid(q.grid(), forms.grid(), "gauss residual");
  const Grid& g = q.grid();
  Field g1v = partial_derivative(q.g1, Axis::V);
  Field g2u = partial_derivative(q.g2, Axis::U);
  Mask m = propagate_derivative_mask(propagate_derivative_mask(q.mask, Axis::V),
                                     Axis::U);
  GaussResidual out{Field(g), m};
  for (std::size_t k = 0; k < g.n(); ++k) {
    if (!m.on[k]) continue;
    const double se = std::sqrt(forms.E.a[k]);
    const double sg = std::sqrt(forms.G.a[k]);
    if (se == 0.0 || sg == 0.0) {
      out.mask.on[k] = 0;
      continue;
    }
    out.r.a[k] = g1v.a[k] / sg - g2u.a[k] / se -
                 (q.g1.a[k] * q.g1.a[k] + q.g2.a[k] * q.g2.a[k]) -
                 q.nu1.a[k] * q.nu2.a[k];
  }
  return out;
}

AdmissibilityReport bonnet_admissibility(const Quadruple& q, double tol) {
  q.validate();
  const Grid& g = q.grid();
  AdmissibilityReport rep;
  rep.tol = tol;

  Field nu1u = nu1_deriv(q, Axis::U);
  Field nu1v = nu1_deriv(q, Axis::V);
  Field nu2u = nu2_deriv(q, Axis::U);
  Field nu2v = nu2_deriv(q, Axis::V);

  // Condition 1: strict pointwise positivity on the valid set.
  double mind = std::numeric_limits<double>::infinity();
  double ming1 = std::numeric_limits<double>::infinity();
  double ming2 = std::numeric_limits<double>::infinity();
  Mask m1 = q.mask;
  if (!q.nu1_v) m1 = propagate_derivative_mask(m1, Axis::V);
  if (!q.nu2_u) m1 = propagate_derivative_mask(m1, Axis::U);
  bool any = false;
  for (std::size_t k = 0; k < g.n(); ++k) {
    if (!m1.on[k]) continue;
    any = true;
    mind = std::min(mind, q.nu1.a[k] - q.nu2.a[k]);
    ming1 = std::min(ming1, q.g1.a[k] * nu1v.a[k]);
    ming2 = std::min(ming2, q.g2.a[k] * nu2u.a[k]);
  }
  if (!any) raise(Status::EmptyMesh, "no valid nodes for admissibility check");
  rep.min_nu_diff = mind;
  rep.min_g1_nu1v = ming1;
  rep.min_g2_nu2u = ming2;
  rep.cond1 = mind > 0.0 && ming1 > 0.0 && ming2 > 0.0;
  if (!rep.cond1) {
    rep.failed_condition = "positivity";
    return rep;
  }

  // Condition 2.1: logarithmic compatibility, as residual fields. The
  // log arguments are positive on the valid set once condition 1 holds.
  Field lnP(g), lnQ(g);
  for (std::size_t k = 0; k < g.n(); ++k) {
    if (!m1.on[k]) continue;
    lnP.a[k] = std::log(nu1v.a[k] / q.g1.a[k]);
    lnQ.a[k] = std::log(nu2u.a[k] / q.g2.a[k]);
  }
  Field lnPu = partial_derivative(lnP, Axis::U);
  Field lnQv = partial_derivative(lnQ, Axis::V);
  Mask m2 = propagate_derivative_mask(propagate_derivative_mask(m1, Axis::U),
                                      Axis::V);
  double ru = 0, rv = 0;
  for (std::size_t k = 0; k < g.n(); ++k) {
    if (!m2.on[k]) continue;
    const double d = q.nu1.a[k] - q.nu2.a[k];
    ru = std::max(ru, std::abs(lnPu.a[k] - nu1u.a[k] / d));
    rv = std::max(rv, std::abs(lnQv.a[k] + nu2v.a[k] / d));
  }
  rep.res21_u = ru;
  rep.res21_v = rv;
  rep.cond21 = ru <= tol && rv <= tol;

  // Condition 2.2: the invariant Gauss identity.
  Field g1sq = map_field(q.g1, [](double x) { return x * x; });
  Field g2sq = map_field(q.g2, [](double x) { return x * x; });
  Field g1sqv = partial_derivative(g1sq, Axis::V);
  Field g2squ = partial_derivative(g2sq, Axis::U);
  double r22 = 0;
  for (std::size_t k = 0; k < g.n(); ++k) {
    if (!m2.on[k]) continue;
    const double d = q.nu1.a[k] - q.nu2.a[k];
    const double lhs =
        0.5 * d * (g1sqv.a[k] / nu1v.a[k] - g2squ.a[k] / nu2u.a[k]) -
        (q.g1.a[k] * q.g1.a[k] + q.g2.a[k] * q.g2.a[k]);
    r22 = std::max(r22, std::abs(lhs - q.nu1.a[k] * q.nu2.a[k]));
  }
  rep.res22 = r22;
  rep.cond22 = r22 <= tol;

  rep.pass = rep.cond1 && rep.cond21 && rep.cond22;
  if (!rep.cond21)
    rep.failed_condition = "log-compatibility";
  else if (!rep.cond22)
    rep.failed_condition = "gauss-identity";
  return rep;
}

Frenet principal_line_frenet(const Quadruple& q, const Forms& forms,
                             double tol) {
  q.validate();
  require_same_grid(q.grid(), forms.grid(), "frenet data");
  const Grid& g = q.grid();

  Field nu1u = nu1_deriv(q, Axis::U);
  Field nu2v = nu2_deriv(q, Axis::V);
  Field g1u = partial_derivative(q.g1, Axis::U);
  Field g2v = partial_derivative(q.g2, Axis::V);

  Mask m = q.mask;
  if (!q.nu1_u) m = propagate_derivative_mask(m, Axis::U);
  if (!q.nu2_v) m = propagate_derivative_mask(m, Axis::V);
  m = propagate_derivative_mask(propagate_derivative_mask(m, Axis::U), Axis::V);

  Frenet out{Field(g), Field(g), Field(g), Field(g), Field(g), Field(g), m};
  for (std::size_t k = 0; k < g.n(); ++k) {
    if (!m.on[k]) continue;
    const double k1sq = q.g1.a[k] * q.g1.a[k] + q.nu1.a[k] * q.nu1.a[k];
    const double k2sq = q.g2.a[k] * q.g2.a[k] + q.nu2.a[k] * q.nu2.a[k];
    if (k1sq <= tol * tol || k2sq <= tol * tol)
      raise(Status::VanishingCurvature,
            "principal line with vanishing space curvature");
    out.kappa1.a[k] = std::sqrt(k1sq);
    out.kappa2.a[k] = std::sqrt(k2sq);
    out.theta1.a[k] = std::atan2(q.g1.a[k], q.nu1.a[k]);
    out.theta2.a[k] = std::atan2(q.g2.a[k], q.nu2.a[k]);
    const double se = std::sqrt(forms.E.a[k]);
    const double sg = std::sqrt(forms.G.a[k]);
    out.tau1.a[k] =
        (q.g1.a[k] * nu1u.a[k] - q.nu1.a[k] * g1u.a[k]) / (se * k1sq);
    out.tau2.a[k] =
        (q.g2.a[k] * nu2v.a[k] - q.nu2.a[k] * g2v.a[k]) / (sg * k2sq);
  }
  return out;
}

}  // namespace wg
