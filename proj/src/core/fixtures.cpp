#include "core/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

#include "core/errors.hpp"

namespace wg {

namespace {

// ---------------------------------------------------------------------------
// Kuen surface, chart adapted to the curvature lines with the third
// coordinate transformed so that E + G = 1 (u > cosh v branch).
// Abbreviations: c = cosh v, s = sinh v, D = u^2 + c^2.

AnalyticSurface make_kuen_canonical() {
  AnalyticSurface f;
  f.name = "kuen_canonical";
  f.u0 = 2.6;
  f.u1 = 3.4;
  f.v0 = 0.4;
  f.v1 = 1.2;
  f.handedness = -1;
  f.in_domain = [](double u, double v) {
    return u > 0.0 && v != 0.0 && u > std::cosh(v);
  };
  f.position = [](double u, double v) {
    const double c = std::cosh(v), s = std::sinh(v), D = u * u + c * c;
    return Vec3(2 * c * (std::cos(u) + u * std::sin(u)) / D,
                2 * c * (std::sin(u) - u * std::cos(u)) / D,
                v - 2 * s * c / D);
  };
  f.d_u = [](double u, double v) {
    const double c = std::cosh(v), s = std::sinh(v), D = u * u + c * c;
    const double D2 = D * D;
    return Vec3(
        2 * c * u * ((D - 2) * std::cos(u) - 2 * u * std::sin(u)) / D2,
        2 * c * u * ((D - 2) * std::sin(u) + 2 * u * std::cos(u)) / D2,
        4 * u * s * c / D2);
  };
  f.d_v = [](double u, double v) {
    const double c = std::cosh(v), s = std::sinh(v), D = u * u + c * c;
    const double D2 = D * D, w = u * u - c * c;
    return Vec3(2 * s * w * (std::cos(u) + u * std::sin(u)) / D2,
                2 * s * w * (std::sin(u) - u * std::cos(u)) / D2,
                1 - 2 * ((c * c + s * s) * D - 2 * s * s * c * c) / D2);
  };
  f.E = [](double u, double v) {
    const double c = std::cosh(v), D = u * u + c * c;
    return 4 * u * u * c * c / (D * D);
  };
  f.G = [](double u, double v) {
    const double c = std::cosh(v), D = u * u + c * c;
    const double w = u * u - c * c;
    return w * w / (D * D);
  };
  f.L = [](double u, double v) {
    const double c = std::cosh(v), D = u * u + c * c;
    return 2 * u * c * (u * u - c * c) / (D * D);
  };
  f.N = [](double u, double v) {
    const double c = std::cosh(v), D = u * u + c * c;
    return -2 * u * c * (u * u - c * c) / (D * D);
  };
  f.nu1 = [](double u, double v) {
    const double c = std::cosh(v);
    return (u * u - c * c) / (2 * u * c);
  };
  f.nu2 = [](double u, double v) {
    const double c = std::cosh(v);
    return -2 * u * c / (u * u - c * c);
  };
  f.g1 = [](double, double v) { return -std::tanh(v); };
  f.g2 = [](double u, double v) {
    const double c = std::cosh(v);
    return 2 * c / (u * u - c * c);
  };
  f.nu1_u = [](double u, double v) {
    const double c = std::cosh(v);
    return (u * u + c * c) / (2 * u * u * c);
  };
  f.nu1_v = [](double u, double v) {
    const double c = std::cosh(v), s = std::sinh(v);
    return -s * (u * u + c * c) / (2 * u * c * c);
  };
  f.nu2_u = [](double u, double v) {
    const double c = std::cosh(v), w = u * u - c * c;
    return 2 * c * (u * u + c * c) / (w * w);
  };
  f.nu2_v = [](double u, double v) {
    const double c = std::cosh(v), s = std::sinh(v), w = u * u - c * c;
    return -2 * u * s * (u * u + c * c) / (w * w);
  };
  return f;
}

// ---------------------------------------------------------------------------
// Kuen surface over the curvature-line chart with x3 = ln tan(v/2) + ...,
// on the branch u sin v < 1. Abbreviations: s = sin v, C = cos v,
// D = 1 + u^2 s^2.

AnalyticSurface make_kuen_principal() {
  AnalyticSurface f;
  f.name = "kuen_principal";
  f.u0 = 0.3;
  f.u1 = 0.9;
  f.v0 = std::numbers::pi / 6;
  f.v1 = std::numbers::pi / 2 - 0.1;
  f.handedness = 1;
  f.in_domain = [](double u, double v) {
    return u > 0.0 && v > 0.0 && v < std::numbers::pi &&
           u * std::sin(v) < 1.0;
  };
  f.position = [](double u, double v) {
    const double s = std::sin(v), C = std::cos(v), D = 1 + u * u * s * s;
    return Vec3(2 * s * (std::cos(u) + u * std::sin(u)) / D,
                2 * s * (std::sin(u) - u * std::cos(u)) / D,
                std::log(std::tan(v / 2)) + 2 * C / D);
  };
  f.d_u = [](double u, double v) {
    const double s = std::sin(v), C = std::cos(v), D = 1 + u * u * s * s;
    const double D2 = D * D, s2 = s * s;
    return Vec3(
        2 * s * u * ((D - 2 * s2) * std::cos(u) - 2 * u * s2 * std::sin(u)) /
            D2,
        2 * s * u * ((D - 2 * s2) * std::sin(u) + 2 * u * s2 * std::cos(u)) /
            D2,
        -4 * u * s2 * C / D2);
  };
  f.d_v = [](double u, double v) {
    const double s = std::sin(v), C = std::cos(v), D = 1 + u * u * s * s;
    const double D2 = D * D, w = 1 - u * u * s * s;
    return Vec3(2 * C * w * (std::cos(u) + u * std::sin(u)) / D2,
                2 * C * w * (std::sin(u) - u * std::cos(u)) / D2,
                1 / s - 2 * s * (D + 2 * u * u * C * C) / D2);
  };
  f.E = [](double u, double v) {
    const double s = std::sin(v), D = 1 + u * u * s * s;
    return 4 * u * u * s * s / (D * D);
  };
  f.G = [](double u, double v) {
    const double s = std::sin(v), D = 1 + u * u * s * s;
    const double w = 1 - u * u * s * s;
    return w * w / (s * s * D * D);
  };
  f.L = [](double u, double v) {
    const double s = std::sin(v), D = 1 + u * u * s * s;
    return 2 * u * s * (u * u * s * s - 1) / (D * D);
  };
  f.N = [](double u, double v) {
    const double s = std::sin(v), D = 1 + u * u * s * s;
    return 2 * u * (1 - u * u * s * s) / (s * D * D);
  };
  f.nu1 = [](double u, double v) {
    const double s = std::sin(v);
    return (u * u * s * s - 1) / (2 * u * s);
  };
  f.nu2 = [](double u, double v) {
    const double s = std::sin(v);
    return 2 * u * s / (1 - u * u * s * s);
  };
  f.g1 = [](double, double v) { return -std::cos(v); };
  f.g2 = [](double u, double v) {
    const double s = std::sin(v);
    return -2 * s / (1 - u * u * s * s);
  };
  f.nu1_u = [](double u, double v) {
    const double s = std::sin(v);
    return (u * u * s * s + 1) / (2 * u * u * s);
  };
  f.nu1_v = [](double u, double v) {
    const double s = std::sin(v), C = std::cos(v);
    return C * (u * u * s * s + 1) / (2 * u * s * s);
  };
  f.nu2_u = [](double u, double v) {
    const double s = std::sin(v), w = 1 - u * u * s * s;
    return 2 * s * (1 + u * u * s * s) / (w * w);
  };
  f.nu2_v = [](double u, double v) {
    const double s = std::sin(v), C = std::cos(v), w = 1 - u * u * s * s;
    return 2 * u * C * (1 + u * u * s * s) / (w * w);
  };
  return f;
}

// ---------------------------------------------------------------------------
// Control fixtures.

AnalyticSurface make_sphere() {
  AnalyticSurface f;
  f.name = "sphere";
  f.violation = "umbilical";
  f.u0 = 0.4;
  f.u1 = 2.7;
  f.v0 = 0.0;
  f.v1 = 6.2;
  f.in_domain = [](double u, double) {
    return u > 0.0 && u < std::numbers::pi;
  };
  f.position = [](double u, double v) {
    return Vec3(2 * std::sin(u) * std::cos(v), 2 * std::sin(u) * std::sin(v),
                2 * std::cos(u));
  };
  f.d_u = [](double u, double v) {
    return Vec3(2 * std::cos(u) * std::cos(v), 2 * std::cos(u) * std::sin(v),
                -2 * std::sin(u));
  };
  f.d_v = [](double u, double v) {
    return Vec3(-2 * std::sin(u) * std::sin(v), 2 * std::sin(u) * std::cos(v),
                0.0);
  };
  f.E = [](double, double) { return 4.0; };
  f.G = [](double u, double) {
    const double s = std::sin(u);
    return 4 * s * s;
  };
  f.L = [](double, double) { return -2.0; };
  f.N = [](double u, double) {
    const double s = std::sin(u);
    return -2 * s * s;
  };
  f.nu1 = [](double, double) { return -0.5; };
  f.nu2 = [](double, double) { return -0.5; };
  f.g1 = [](double, double) { return 0.0; };
  f.g2 = [](double u, double) { return std::cos(u) / (2 * std::sin(u)); };
  f.nu1_u = f.nu1_v = f.nu2_u = f.nu2_v = [](double, double) { return 0.0; };
  return f;
}

AnalyticSurface make_catenoid() {
  AnalyticSurface f;
  f.name = "catenoid";
  f.violation = "gamma1-zero";
  f.u0 = 0.2;
  f.u1 = 1.2;
  f.v0 = 0.0;
  f.v1 = 6.2;
  f.in_domain = [](double, double) { return true; };
  f.position = [](double u, double v) {
    return Vec3(std::cosh(u) * std::cos(v), std::cosh(u) * std::sin(v), u);
  };
  f.d_u = [](double u, double v) {
    return Vec3(std::sinh(u) * std::cos(v), std::sinh(u) * std::sin(v), 1.0);
  };
  f.d_v = [](double u, double v) {
    return Vec3(-std::cosh(u) * std::sin(v), std::cosh(u) * std::cos(v), 0.0);
  };
  f.E = [](double u, double) {
    const double c = std::cosh(u);
    return c * c;
  };
  f.G = f.E;
  f.L = [](double, double) { return -1.0; };
  f.N = [](double, double) { return 1.0; };
  f.nu1 = [](double u, double) {
    const double c = std::cosh(u);
    return -1 / (c * c);
  };
  f.nu2 = [](double u, double) {
    const double c = std::cosh(u);
    return 1 / (c * c);
  };
  f.g1 = [](double, double) { return 0.0; };
  f.g2 = [](double u, double) {
    const double c = std::cosh(u);
    return std::sinh(u) / (c * c);
  };
  f.nu1_u = [](double u, double) {
    const double c = std::cosh(u);
    return 2 * std::sinh(u) / (c * c * c);
  };
  f.nu2_u = [](double u, double) {
    const double c = std::cosh(u);
    return -2 * std::sinh(u) / (c * c * c);
  };
  f.nu1_v = f.nu2_v = [](double, double) { return 0.0; };
  return f;
}

AnalyticSurface make_pseudosphere() {
  AnalyticSurface f;
  f.name = "pseudosphere";
  f.violation = "nu-gradient-zero";
  f.u0 = 0.5;
  f.u1 = 1.5;
  f.v0 = 0.0;
  f.v1 = 6.2;
  f.in_domain = [](double u, double) { return u > 0.0; };
  f.position = [](double u, double v) {
    const double s = 1 / std::cosh(u);
    return Vec3(s * std::cos(v), s * std::sin(v), u - std::tanh(u));
  };
  f.d_u = [](double u, double v) {
    const double s = 1 / std::cosh(u), t = std::tanh(u);
    return Vec3(-s * t * std::cos(v), -s * t * std::sin(v), t * t);
  };
  f.d_v = [](double u, double v) {
    const double s = 1 / std::cosh(u);
    return Vec3(-s * std::sin(v), s * std::cos(v), 0.0);
  };
  f.E = [](double u, double) {
    const double t = std::tanh(u);
    return t * t;
  };
  f.G = [](double u, double) {
    const double s = 1 / std::cosh(u);
    return s * s;
  };
  f.L = [](double u, double) {
    const double t = std::tanh(u);
    return -t * t / std::sinh(u);
  };
  f.N = [](double u, double) {
    const double s = 1 / std::cosh(u);
    return std::sinh(u) * s * s;
  };
  f.nu1 = [](double u, double) { return -1 / std::sinh(u); };
  f.nu2 = [](double u, double) { return std::sinh(u); };
  f.g1 = [](double, double) { return 0.0; };
  f.g2 = [](double, double) { return -1.0; };
  f.nu1_u = [](double u, double) {
    const double sh = std::sinh(u);
    return std::cosh(u) / (sh * sh);
  };
  f.nu2_u = [](double u, double) { return std::cosh(u); };
  f.nu1_v = f.nu2_v = [](double, double) { return 0.0; };
  return f;
}

}  // namespace

const AnalyticSurface& kuen(Chart chart) {
  static const AnalyticSurface canonical = make_kuen_canonical();
  static const AnalyticSurface principal = make_kuen_principal();
  return chart == Chart::Canonical ? canonical : principal;
}

std::vector<const AnalyticSurface*> negative_fixtures() {
  return {&analytic_surface("sphere"), &analytic_surface("catenoid"),
          &analytic_surface("pseudosphere")};
}

const AnalyticSurface& analytic_surface(const std::string& name) {
  static const AnalyticSurface sphere = make_sphere();
  static const AnalyticSurface catenoid = make_catenoid();
  static const AnalyticSurface pseudosphere = make_pseudosphere();
  if (name == "kuen_canonical") return kuen(Chart::Canonical);
  if (name == "kuen_principal") return kuen(Chart::Principal);
  if (name == "sphere") return sphere;
  if (name == "catenoid") return catenoid;
  if (name == "pseudosphere") return pseudosphere;
  raise(Status::InvalidArgument, "unknown fixture surface: " + name);
}

std::vector<std::string> analytic_surface_names() {
  return {"kuen_canonical", "kuen_principal", "sphere", "catenoid",
          "pseudosphere"};
}

Mat3 analytic_frame(const AnalyticSurface& s, double u, double v) {
  const Vec3 X = s.d_u(u, v).normalized();
  const Vec3 Y = s.d_v(u, v).normalized();
  Mat3 F;
  F.row(0) = X;
  F.row(1) = Y;
  F.row(2) = s.handedness * X.cross(Y);
  return F;
}

Mask domain_mask(const AnalyticSurface& s, const Grid& g) {
  Mask m(g);
  for (int j = 0; j < g.nv; ++j)
    for (int i = 0; i < g.nu; ++i)
      m.set(i, j, s.in_domain(g.u(i), g.v(j)));
  return m;
}

Field sample_scalar(const ScalarFn& f, const Grid& g) {
  Field out(g);
  for (int j = 0; j < g.nv; ++j)
    for (int i = 0; i < g.nu; ++i) out.at(i, j) = f(g.u(i), g.v(j));
  return out;
}

namespace {

Field sample_masked(const ScalarFn& f, const Grid& g, const Mask& m) {
  Field out(g);
  for (int j = 0; j < g.nv; ++j)
    for (int i = 0; i < g.nu; ++i)
      if (m.at(i, j)) out.at(i, j) = f(g.u(i), g.v(j));
  return out;
}

}  // namespace

Quadruple sample_quadruple(const AnalyticSurface& s, const Grid& g,
                           bool analytic_derivs) {
  Mask m = domain_mask(s, g);
  Quadruple q{sample_masked(s.nu1, g, m), sample_masked(s.nu2, g, m),
              sample_masked(s.g1, g, m),  sample_masked(s.g2, g, m),
              m,
              {},
              {},
              {},
              {}};
  if (analytic_derivs && s.nu1_u && s.nu1_v && s.nu2_u && s.nu2_v) {
    q.nu1_u = sample_masked(s.nu1_u, g, m);
    q.nu1_v = sample_masked(s.nu1_v, g, m);
    q.nu2_u = sample_masked(s.nu2_u, g, m);
    q.nu2_v = sample_masked(s.nu2_v, g, m);
  }
  return q;
}

SurfaceSamples sample_positions(const AnalyticSurface& s, const Grid& g) {
  SurfaceSamples out{g, std::vector<Vec3>(g.n(), Vec3::Zero()),
                     std::vector<Vec3>(g.n(), Vec3::Zero()), domain_mask(s, g)};
  for (int j = 0; j < g.nv; ++j)
    for (int i = 0; i < g.nu; ++i) {
      if (!out.mask.at(i, j)) continue;
      const double u = g.u(i), v = g.v(j);
      out.x[g.idx(i, j)] = s.position(u, v);
      out.normal[g.idx(i, j)] = analytic_frame(s, u, v).row(2);
    }
  return out;
}

MeshFormsResult mesh_forms(const SurfaceSamples& s, double tol) {
  const Grid& g = s.grid;
  if (s.x.size() != g.n())
    raise(Status::InvalidArgument, "position count does not match the grid");

  Field comp[3] = {Field(g), Field(g), Field(g)};
  for (int c = 0; c < 3; ++c)
    for (std::size_t k = 0; k < g.n(); ++k) comp[c].a[k] = s.x[k][c];

  Field xu[3], xv[3], xuu[3], xvv[3], xuv[3];
  for (int c = 0; c < 3; ++c) {
    xu[c] = partial_derivative(comp[c], Axis::U);
    xv[c] = partial_derivative(comp[c], Axis::V);
    xuu[c] = second_derivative(comp[c], Axis::U);
    xvv[c] = second_derivative(comp[c], Axis::V);
    xuv[c] = partial_derivative(xu[c], Axis::V);
  }

  // Validity: first derivatives and the mixed partial live on m1, straight
  // second derivatives on m2; gammas add one more derivative of E and G.
  Mask m1 = propagate_derivative_mask(
      propagate_derivative_mask(s.mask, Axis::U), Axis::V);
  Mask m2 = propagate_second_derivative_mask(
      propagate_second_derivative_mask(s.mask, Axis::U), Axis::V);
  Mask mL(g);
  for (std::size_t k = 0; k < g.n(); ++k)
    mL.on[k] = (m1.on[k] && m2.on[k]) ? 1 : 0;

  Forms forms{Field(g), Field(g), Field(g), Field(g), Field(g), Field(g)};
  Field nu1(g), nu2(g);
  double max_F = 0, max_M = 0;
  double min_cross = std::numeric_limits<double>::infinity();
  std::vector<Vec3> unit_normal(g.n(), Vec3::Zero());

  for (std::size_t k = 0; k < g.n(); ++k) {
    if (!m1.on[k]) continue;
    const Vec3 a(xu[0].a[k], xu[1].a[k], xu[2].a[k]);
    const Vec3 b(xv[0].a[k], xv[1].a[k], xv[2].a[k]);
    forms.E.a[k] = a.dot(a);
    forms.F.a[k] = a.dot(b);
    forms.G.a[k] = b.dot(b);
    max_F = std::max(max_F, std::abs(forms.F.a[k]));
    const Vec3 cr = a.cross(b);
    const double n = cr.norm();
    min_cross = std::min(min_cross, n);
    if (n < tol)
      raise(Status::DegenerateImmersion,
            "x_u x x_v vanishes at a valid node");
    unit_normal[k] = cr / n;
    if (!mL.on[k]) continue;
    const Vec3 duu(xuu[0].a[k], xuu[1].a[k], xuu[2].a[k]);
    const Vec3 dvv(xvv[0].a[k], xvv[1].a[k], xvv[2].a[k]);
    const Vec3 duv(xuv[0].a[k], xuv[1].a[k], xuv[2].a[k]);
    forms.L.a[k] = duu.dot(unit_normal[k]);
    forms.M.a[k] = duv.dot(unit_normal[k]);
    forms.N.a[k] = dvv.dot(unit_normal[k]);
    max_M = std::max(max_M, std::abs(forms.M.a[k]));
    nu1.a[k] = forms.L.a[k] / forms.E.a[k];
    nu2.a[k] = forms.N.a[k] / forms.G.a[k];
  }

  // Gammas from the metric alone (normal-independent).
  Field Ev = partial_derivative(forms.E, Axis::V);
  Field Gu = partial_derivative(forms.G, Axis::U);
  Mask mg = propagate_derivative_mask(propagate_derivative_mask(m1, Axis::V),
                                      Axis::U);
  Mask mq(g);
  for (std::size_t k = 0; k < g.n(); ++k)
    mq.on[k] = (mL.on[k] && mg.on[k]) ? 1 : 0;

  Field g1(g), g2(g);
  for (std::size_t k = 0; k < g.n(); ++k) {
    if (!mq.on[k]) continue;
    const double E = forms.E.a[k], G = forms.G.a[k];
    g1.a[k] = -Ev.a[k] / (2 * E * std::sqrt(G));
    g2.a[k] = Gu.a[k] / (2 * G * std::sqrt(E));
  }

  // Orient the normal so that nu1 - nu2 > 0 in the median; a global flip
  // negates L, M, N and both principal curvatures.
  std::vector<double> diffs;
  for (std::size_t k = 0; k < g.n(); ++k)
    if (mq.on[k]) diffs.push_back(nu1.a[k] - nu2.a[k]);
  bool flipped = false;
  if (!diffs.empty()) {
    auto mid = diffs.begin() + diffs.size() / 2;
    std::nth_element(diffs.begin(), mid, diffs.end());
    if (*mid < 0) {
      flipped = true;
      for (std::size_t k = 0; k < g.n(); ++k) {
        forms.L.a[k] = -forms.L.a[k];
        forms.M.a[k] = -forms.M.a[k];
        forms.N.a[k] = -forms.N.a[k];
        nu1.a[k] = -nu1.a[k];
        nu2.a[k] = -nu2.a[k];
      }
    }
  }

  MeshFormsResult out{std::move(forms),
                      Quadruple{std::move(nu1),
                                std::move(nu2),
                                std::move(g1),
                                std::move(g2),
                                mq,
                                {},
                                {},
                                {},
                                {}},
                      flipped,
                      max_F,
                      max_M,
                      min_cross};
  return out;
}

ProbeReport weingarten_relation_probe(const Quadruple& q, double tol) {
  q.validate();
  Mask sr = strong_regularity_mask(q);
  std::vector<std::pair<double, double>> pts;  // (nu1, nu2)
  for (std::size_t k = 0; k < q.grid().n(); ++k)
    if (sr.on[k]) pts.emplace_back(q.nu1.a[k], q.nu2.a[k]);

  ProbeReport rep;
  rep.tol = tol;
  rep.samples = pts.size();
  if (pts.size() < 100)
    raise(Status::TooFewSamples,
          "weingarten probe needs 100 strongly regular samples, got " +
              std::to_string(pts.size()));

  // Constant Gauss curvature: nu2 = c/nu1, least squares in c.
  bool k_usable = true;
  double sn = 0, sd = 0;
  for (const auto& [n1, n2] : pts) {
    if (std::abs(n1) < 1e-300) {
      k_usable = false;
      break;
    }
    sn += n2 / n1;
    sd += 1 / (n1 * n1);
  }
  if (k_usable && sd > 0) {
    const double c = sn / sd;
    double sc = 0;
    for (const auto& [n1, n2] : pts) sc = std::max(sc, std::abs(n2 - c / n1));
    rep.scatter_K = sc;
    if (sc <= tol) {
      rep.relation = "K = const";
      rep.value = c;
      rep.scatter = sc;
      rep.functional = true;
      return rep;
    }
  } else {
    rep.scatter_K = std::numeric_limits<double>::infinity();
  }

  // Constant mean curvature: nu1 + nu2 = 2H.
  double sum = 0;
  for (const auto& [n1, n2] : pts) sum += n1 + n2;
  const double twoH = sum / pts.size();
  double sh = 0;
  for (const auto& [n1, n2] : pts)
    sh = std::max(sh, std::abs(n1 + n2 - twoH));
  rep.scatter_H = sh;
  if (sh <= tol) {
    rep.relation = "H = const";
    rep.value = twoH / 2;
    rep.scatter = sh;
    rep.functional = true;
    return rep;
  }

  // General functional relation: windowed moving average over samples
  // sorted by nu1.
  std::sort(pts.begin(), pts.end());
  const std::size_t n = pts.size();
  const std::size_t w = std::max<std::size_t>(5, n / 50);
  double ss = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = (i >= w / 2) ? i - w / 2 : 0;
    const std::size_t hi = std::min(n, lo + w);
    double acc = 0;
    for (std::size_t k = lo; k < hi; ++k) acc += pts[k].second;
    const double fit = acc / (hi - lo);
    ss = std::max(ss, std::abs(pts[i].second - fit));
  }
  rep.scatter_spline = ss;
  rep.scatter = ss;
  if (ss <= tol) {
    rep.relation = "functional";
    rep.functional = true;
  } else {
    rep.relation = "none";
  }
  return rep;
}

std::vector<std::string> diagnose_violations(const Quadruple& q, double atol) {
  q.validate();
  std::vector<std::string> out;
  const Field diff =
      zip_fields(q.nu1, q.nu2, [](double a, double b) { return a - b; });
  if (max_abs_masked(diff, q.mask) <= atol) out.push_back("umbilical");
  if (max_abs_masked(q.g1, q.mask) <= atol) out.push_back("gamma1-zero");
  if (max_abs_masked(q.g2, q.mask) <= atol) out.push_back("gamma2-zero");
  // nu1 = f(nu) with f' != 0, so nu_u*nu_v vanishes identically exactly when
  // one partial of nu1 does.
  Field n1u = nu1_deriv(q, Axis::U);
  Field n1v = nu1_deriv(q, Axis::V);
  Mask m = q.mask;
  if (!q.nu1_u || !q.nu1_v) {
    m = propagate_derivative_mask(propagate_derivative_mask(m, Axis::U),
                                  Axis::V);
  }
  if (max_abs_masked(n1u, m) <= atol || max_abs_masked(n1v, m) <= atol)
    out.push_back("nu-gradient-zero");
  return out;
}

double liouville_star(double u, double v) {
  return std::log(8.0) - 2 * std::log1p(u * u + v * v);
}

}  // namespace wg
