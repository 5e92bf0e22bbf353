#pragma once

#include <string>
#include <vector>

#include "core/fixtures.hpp"
#include "core/grid.hpp"
#include "core/invariants.hpp"
#include "core/vec.hpp"

namespace wg {

// A curve in natural parametrization, sampled uniformly: curvature and
// torsion per node, positions optional (integrated from the tangent when
// absent). kappa must stay positive for the Frenet frame to exist.
struct SpaceCurve {
  std::vector<double> v;      // uniform natural-parameter samples
  std::vector<double> kappa;  // > 0
  std::vector<double> tau;
  std::vector<Vec3> x;  // optional positions (empty = integrate tangent)
};

// Rotation-minimizing pair (e1, e2) spanning the normal plane along the
// curve: theta = -integral of tau (theta(0) = 0), e1 = cos(theta) n +
// sin(theta) b, e2 = -sin(theta) n + cos(theta) b. The pair then rotates
// only about directions orthogonal to the tangent.
struct TorseFrame {
  std::vector<double> v;
  std::vector<double> theta;
  std::vector<Vec3> t, n, b, e1, e2;
  std::vector<Vec3> x;      // curve positions (input or integrated)
  double ortho_drift = 0;   // max |F F^T - I| over the sweep
};

// Frenet sweep with exact rotation steps (midpoint coefficients), then the
// normal-plane pair from the accumulated angle. DegenerateCurve on any
// kappa <= 0 sample.
TorseFrame torse_forming_frame(const SpaceCurve& c);

// Unit-speed plane curve recovered from its curvature: phi' = kappa1,
// lambda' = cos phi, mu' = sin phi with lambda(0) = mu(0) = phi(0) = 0, by
// the midpoint rule. Step increments have unit speed exactly; the recorded
// defect is the worst deviation of |increment|/du from 1.
struct PlaneProfile {
  std::vector<double> u;  // uniform samples starting at 0
  std::vector<double> lambda, mu, phi;
  std::vector<double> kappa1;
  bool kappa1_vanishes = false;  // kappa1 hits or crosses zero somewhere
  double unit_speed_defect = 0;
};

PlaneProfile profile_from_curvature(const std::vector<double>& kappa1,
                                    double du, double u0 = 0);

// Surface swept by planting the profile into the moving (e1, e2) plane:
//   Z(u, v) = x(v) + lambda(u) e1(v) + mu(u) e2(v).
// The u-lines are geodesics (E = 1, F = 0, gamma1 = 0); the metric and
// invariants come out in closed form:
//   G = W^2 with W = 1 - kappa (lambda cos theta - mu sin theta),
//   nu1 = kappa1(u),
//   nu2 = -kappa (mu' cos theta + lambda' sin theta) / W,
//   gamma2 = -kappa (lambda' cos theta - mu' sin theta) / W,
// oriented by the normal l = -mu' e1 + lambda' e2. Nodes within a relative
// margin of 1e-6 of the characteristic set W = 0 are masked;
// SmoothnessViolation only when nothing remains.
struct GammaSurface {
  SurfaceSamples samples;  // positions + normals + mask on the (u, v) grid
  Forms forms;
  Quadruple quad;
  TorseFrame frame;
  PlaneProfile profile;
};

GammaSurface gamma_surface(const SpaceCurve& c, const PlaneProfile& profile);

// Principal curvatures on a characteristic circle of a canal surface:
//   nu1 = 1/R,
//   nu2 = -(R'' + sqrt(1-R'^2) k cos v)
//         / (1 - R'^2 - R R'' - R sqrt(1-R'^2) k cos v).
// All spec functions are evaluated at the circle parameter v (constants for
// the classical fixtures). 1 - R'^2 <= 0 raises CharacteristicDegenerate;
// a vanishing denominator (focal point) raises DomainViolation.
struct CanalSpec {
  std::function<double(double)> R, Rp, Rpp, k;
};

std::pair<double, double> canal_curvatures(const CanalSpec& spec, double v);

// Rotational-surface characterization: gamma1 must vanish; for generating
// data also kappa constant and tau zero along the center curve.
struct RotationalReport {
  bool rotational = false;
  double gamma1_max = 0;
  double kappa_variation = 0;  // max |kappa - mean kappa| (curve overload)
  double tau_max = 0;          // curve overload only
};

RotationalReport rotational_test(const Quadruple& q, double tol = 1e-10);
RotationalReport rotational_test(const SpaceCurve& c, const Quadruple& q,
                                 double tol = 1e-10);

// Canal characterization per principal-line family: a family consists of
// circles iff its torsion vanishes and its curvature is constant along
// each line of the family. Family 1 runs along u (v fixed), family 2
// along v (u fixed).
struct CircleFamilyReport {
  bool family1 = false, family2 = false;
  double tau1_max = 0, kappa1_line_variation = 0;
  double tau2_max = 0, kappa2_line_variation = 0;
};

CircleFamilyReport circle_family_test(const Frenet& frenet,
                                      double tol = 1e-10);

// Generating-data file: "GAMMA v1", per-line "v kappa tau" samples, then
// "PROFILE", per-line "u kappa1" samples; both blocks uniformly spaced.
struct GammaFile {
  SpaceCurve curve;  // positions left empty
  std::vector<double> profile_u;
  std::vector<double> profile_kappa1;
};

GammaFile read_gamma_file(const std::string& path);
void write_gamma_file(const GammaFile& gf, const std::string& path);

// The classical torus as a swept surface: center circle of radius 2
// (kappa = 1/2, tau = 0, natural parameter over [0, 4 pi]) and unit-circle
// profile (kappa1 = 1, exact lambda = sin u, mu = 1 - cos u over [0, 2 pi]).
SpaceCurve torus_center_circle(int n_v);
PlaneProfile torus_circle_profile(int n_u);

}  // namespace wg
