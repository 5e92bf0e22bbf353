#pragma once

#include <functional>
#include <string>
#include <vector>

#include "core/grid.hpp"
#include "core/invariants.hpp"
#include "core/vec.hpp"

namespace wg {

using ScalarFn = std::function<double(double, double)>;
using VectorFn = std::function<Vec3(double, double)>;

// A closed-form reference surface: immersion, first derivatives, form
// coefficients and invariants as analytic evaluators. `handedness` fixes the
// unit normal as l = handedness * (X x Y); the L, N and curvature evaluators
// are consistent with that normal. Second-order curvature data may be null
// on control fixtures; `violation` names the regularity condition a control
// fixture is designed to break (empty for fully regular surfaces).
struct AnalyticSurface {
  std::string name;
  std::string violation;
  double u0 = 0, u1 = 1, v0 = 0, v1 = 1;  // default sampling window
  int handedness = 1;
  std::function<bool(double, double)> in_domain;
  VectorFn position, d_u, d_v;
  ScalarFn E, G, L, N;
  ScalarFn nu1, nu2, g1, g2;
  ScalarFn nu1_u, nu1_v, nu2_u, nu2_v;

  Grid window_grid(int nu, int nv) const {
    return Grid(nu, nv, u0, v0, (u1 - u0) / (nu - 1), (v1 - v0) / (nv - 1));
  }
};

enum class Chart { Principal, Canonical };

// The Kuen surface in its two charts (all coefficients in closed form).
const AnalyticSurface& kuen(Chart chart);

// Control fixtures, each violating one regularity condition:
// sphere ("umbilical"), catenoid ("gamma1-zero"), pseudosphere
// ("nu-gradient-zero").
std::vector<const AnalyticSurface*> negative_fixtures();

// Lookup by name: kuen_canonical, kuen_principal, sphere, catenoid,
// pseudosphere. Unknown names raise InvalidArgument.
const AnalyticSurface& analytic_surface(const std::string& name);
std::vector<std::string> analytic_surface_names();

// Orthonormal frame rows (X, Y, l) at a point: X = x_u/|x_u|,
// Y = x_v/|x_v|, l = handedness * X x Y.
Mat3 analytic_frame(const AnalyticSurface& s, double u, double v);

// Nodes where in_domain holds.
Mask domain_mask(const AnalyticSurface& s, const Grid& g);

Field sample_scalar(const ScalarFn& f, const Grid& g);

// Invariant quadruple sampled on a grid; when analytic_derivs is set the
// closed-form curvature derivatives are attached (when the surface has them).
Quadruple sample_quadruple(const AnalyticSurface& s, const Grid& g,
                           bool analytic_derivs = true);

struct SurfaceSamples {
  Grid grid;
  std::vector<Vec3> x;
  std::vector<Vec3> normal;  // may be empty
  Mask mask;
};

SurfaceSamples sample_positions(const AnalyticSurface& s, const Grid& g);

struct MeshFormsResult {
  Forms forms;
  Quadruple quad;
  bool normal_flipped = false;  // normal negated to make median(nu1-nu2) > 0
  double max_F = 0, max_M = 0;  // principal-net defect
  double min_cross = 0;         // smallest |x_u x x_v| seen
};

// First/second fundamental forms and an invariant-quadruple estimate from
// position samples, by finite differences. The normal starts as
// x_u x x_v/|...| and is negated when the median of nu1-nu2 over valid
// nodes is negative (recorded in normal_flipped). |x_u x x_v| below tol at
// a valid node raises DegenerateImmersion.
MeshFormsResult mesh_forms(const SurfaceSamples& s, double tol = 1e-12);

struct ProbeReport {
  std::string relation;  // "K = const" | "H = const" | "functional" | "none"
  double value = 0;      // fitted K or H
  double scatter = 0;    // max vertical deviation around the accepted fit
  bool functional = false;
  double tol = 0;
  std::size_t samples = 0;
  double scatter_K = 0, scatter_H = 0, scatter_spline = 0;
};

// Tests whether nu2 is a function of nu1 on the strongly regular node set:
// least-squares nu2 = c/nu1 (constant Gauss curvature), then
// nu1 + nu2 = 2H (constant mean curvature), then a windowed moving average
// over samples sorted by nu1; the first fit whose scatter is <= tol wins.
// Fewer than 100 strongly regular samples raise TooFewSamples.
ProbeReport weingarten_relation_probe(const Quadruple& q, double tol = 1e-6);

// Which regularity conditions a sampled quadruple violates identically:
// any of "umbilical" (nu1 = nu2), "gamma1-zero", "gamma2-zero",
// "nu-gradient-zero" (nu1 a one-parameter function, so nu_u*nu_v = 0).
std::vector<std::string> diagnose_violations(const Quadruple& q,
                                             double atol = 1e-12);

// ln(8/(1+u^2+v^2)^2), the closed-form reference solution used by the
// elliptic solver tests and the solve-pde boundary fixtures.
double liouville_star(double u, double v);

}  // namespace wg
