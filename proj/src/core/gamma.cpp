#include "core/gamma.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "core/errors.hpp"
#include "core/frame.hpp"

namespace wg {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Uniform spacing of a sample axis; InvalidArgument when it drifts.
double uniform_step(const std::vector<double>& s, const char* what) {
  if (s.size() < 2)
    raise(Status::InvalidArgument,
          std::string(what) + " needs at least two samples");
  const int n = int(s.size());
  const double h = (s.back() - s.front()) / (n - 1);
  if (!(h > 0))
    raise(Status::InvalidArgument,
          std::string(what) + " samples must be strictly increasing");
  const double tol = 1e-9 * std::max(1.0, std::abs(s.back() - s.front()));
  for (int k = 0; k < n; ++k)
    if (std::abs(s[k] - (s.front() + k * h)) > tol)
      raise(Status::InvalidArgument,
            std::string(what) + " samples are not uniformly spaced");
  return h;
}

double max_orthonormality_error(const Mat3& F) {
  const Mat3 err = F * F.transpose() - Mat3::Identity();
  return err.cwiseAbs().maxCoeff();
}

}  // namespace

TorseFrame torse_forming_frame(const SpaceCurve& c) {
  const int n = int(c.v.size());
  if (c.kappa.size() != c.v.size() || c.tau.size() != c.v.size())
    raise(Status::InvalidArgument,
          "curve samples v/kappa/tau must have equal lengths");
  const double h = uniform_step(c.v, "curve parameter");
  for (int k = 0; k < n; ++k)
    if (!(c.kappa[k] > 0))
      raise(Status::DegenerateCurve,
            "curvature must stay positive (sample " + std::to_string(k) +
                ")");

  double kmax = 0;
  for (double kv : c.kappa) kmax = std::max(kmax, kv);
  if (!c.x.empty()) {
    if (c.x.size() != c.v.size())
      raise(Status::InvalidArgument,
            "curve positions must match the parameter samples");
    // Chord length of a unit-speed arc differs from h by O((kappa h)^2).
    const double tol = std::max(1e-6, kmax * kmax * h * h / 8);
    for (int k = 0; k + 1 < n; ++k) {
      const double chord = (c.x[k + 1] - c.x[k]).norm();
      if (std::abs(chord / h - 1) > tol)
        raise(Status::InvalidArgument,
              "curve positions are not in natural parametrization");
    }
  }

  TorseFrame out;
  out.v = c.v;
  out.t.resize(n);
  out.n.resize(n);
  out.b.resize(n);
  out.e1.resize(n);
  out.e2.resize(n);
  out.x.resize(n);

  // Frenet sweep: rows (t, n, b) obey F' = K F with
  // K = [[0, kappa, 0], [-kappa, 0, tau], [0, -tau, 0]].
  Mat3 F = Mat3::Identity();
  out.ortho_drift = 0;
  for (int k = 0; k < n; ++k) {
    if (k > 0) {
      const double km = 0.5 * (c.kappa[k - 1] + c.kappa[k]);
      const double tm = 0.5 * (c.tau[k - 1] + c.tau[k]);
      F = rotation_exponential(h * km, 0.0, h * tm) * F;
    }
    out.ortho_drift = std::max(out.ortho_drift, max_orthonormality_error(F));
    out.t[k] = F.row(0);
    out.n[k] = F.row(1);
    out.b[k] = F.row(2);
  }

  std::vector<double> neg_tau(n);
  for (int k = 0; k < n; ++k) neg_tau[k] = -c.tau[k];
  out.theta = cumulative_integral(neg_tau, h, Rule::Trapezoid);
  for (int k = 0; k < n; ++k) {
    const double ct = std::cos(out.theta[k]), st = std::sin(out.theta[k]);
    out.e1[k] = ct * out.n[k] + st * out.b[k];
    out.e2[k] = -st * out.n[k] + ct * out.b[k];
  }

  if (!c.x.empty()) {
    out.x = c.x;
  } else {
    out.x[0] = Vec3::Zero();
    for (int k = 0; k + 1 < n; ++k)
      out.x[k + 1] = out.x[k] + 0.5 * h * (out.t[k] + out.t[k + 1]);
  }
  return out;
}

PlaneProfile profile_from_curvature(const std::vector<double>& kappa1,
                                    double du, double u0) {
  const int n = int(kappa1.size());
  if (n < 2)
    raise(Status::InvalidArgument, "profile needs at least two samples");
  if (!(du > 0))
    raise(Status::InvalidArgument, "profile spacing must be positive");

  PlaneProfile p;
  p.kappa1 = kappa1;
  p.u.resize(n);
  p.lambda.assign(n, 0.0);
  p.mu.assign(n, 0.0);
  p.phi.assign(n, 0.0);
  for (int k = 0; k < n; ++k) p.u[k] = u0 + k * du;

  for (int k = 0; k < n; ++k) {
    if (kappa1[k] == 0) p.kappa1_vanishes = true;
    if (k + 1 < n && kappa1[k] * kappa1[k + 1] < 0) p.kappa1_vanishes = true;
  }

  for (int k = 0; k + 1 < n; ++k) {
    const double km = 0.5 * (kappa1[k] + kappa1[k + 1]);
    const double phim = p.phi[k] + 0.5 * du * km;
    p.phi[k + 1] = p.phi[k] + du * km;
    p.lambda[k + 1] = p.lambda[k] + du * std::cos(phim);
    p.mu[k + 1] = p.mu[k] + du * std::sin(phim);
    const double step = std::hypot(p.lambda[k + 1] - p.lambda[k],
                                   p.mu[k + 1] - p.mu[k]);
    p.unit_speed_defect =
        std::max(p.unit_speed_defect, std::abs(step / du - 1));
  }
  return p;
}

GammaSurface gamma_surface(const SpaceCurve& c, const PlaneProfile& profile) {
  GammaSurface out;
  out.frame = torse_forming_frame(c);
  out.profile = profile;

  const int nu = int(profile.u.size());
  const int nv = int(c.v.size());
  if (int(profile.lambda.size()) != nu || int(profile.mu.size()) != nu ||
      int(profile.phi.size()) != nu || int(profile.kappa1.size()) != nu)
    raise(Status::InvalidArgument, "profile sample arrays must match");
  const double du = uniform_step(profile.u, "profile parameter");
  const double dv = uniform_step(c.v, "curve parameter");
  Grid g(nu, nv, profile.u.front(), c.v.front(), du, dv);

  out.samples.grid = g;
  out.samples.x.resize(g.n());
  out.samples.normal.resize(g.n());
  out.samples.mask = Mask(g, true);
  out.forms.E = Field(g, 1.0);
  out.forms.F = Field(g);
  out.forms.G = Field(g);
  out.forms.L = Field(g);
  out.forms.M = Field(g);
  out.forms.N = Field(g);
  out.quad.nu1 = Field(g);
  out.quad.nu2 = Field(g);
  out.quad.g1 = Field(g);
  out.quad.g2 = Field(g);
  out.quad.mask = Mask(g, true);

  std::size_t kept = 0;
  for (int j = 0; j < nv; ++j) {
    const double kap = c.kappa[j];
    const double ct = std::cos(out.frame.theta[j]);
    const double st = std::sin(out.frame.theta[j]);
    for (int i = 0; i < nu; ++i) {
      const std::size_t k = g.idx(i, j);
      const double lam = profile.lambda[i], mu = profile.mu[i];
      const double lp = std::cos(profile.phi[i]);
      const double mp = std::sin(profile.phi[i]);

      out.samples.x[k] =
          out.frame.x[j] + lam * out.frame.e1[j] + mu * out.frame.e2[j];
      out.samples.normal[k] = -mp * out.frame.e1[j] + lp * out.frame.e2[j];

      const double offset = lam * ct - mu * st;
      if (std::abs(offset - 1 / kap) < 1e-6 / kap) {
        out.samples.mask.on[k] = 0;
        out.quad.mask.on[k] = 0;
        continue;
      }
      ++kept;
      const double W = 1 - kap * offset;
      out.forms.G.a[k] = W * W;
      const double nu1 = profile.kappa1[i];
      const double nu2 = -kap * (mp * ct + lp * st) / W;
      out.quad.nu1.a[k] = nu1;
      out.quad.nu2.a[k] = nu2;
      out.quad.g2.a[k] = -kap * (lp * ct - mp * st) / W;
      out.forms.L.a[k] = nu1;  // L = nu1 E with E = 1
      out.forms.N.a[k] = nu2 * W * W;
    }
  }
  if (kept == 0)
    raise(Status::SmoothnessViolation,
          "every node lies on the characteristic set of the sweep");
  return out;
}

std::pair<double, double> canal_curvatures(const CanalSpec& spec, double v) {
  if (!spec.R || !spec.Rp || !spec.Rpp || !spec.k)
    raise(Status::InvalidArgument, "canal spec must supply R, R', R'', k");
  const double R = spec.R(v), Rp = spec.Rp(v), Rpp = spec.Rpp(v),
               kc = spec.k(v);
  if (!(R > 0))
    raise(Status::InvalidArgument, "sphere radius must be positive");
  const double w = 1 - Rp * Rp;
  if (!(w > 0))
    raise(Status::CharacteristicDegenerate,
          "1 - R'^2 must be positive for real characteristic circles");
  const double sq = std::sqrt(w);
  const double numer = Rpp + sq * kc * std::cos(v);
  const double denom = w - R * Rpp - R * sq * kc * std::cos(v);
  if (std::abs(denom) < 1e-12)
    raise(Status::DomainViolation, "characteristic focal point");
  return {1 / R, -numer / denom};
}

RotationalReport rotational_test(const Quadruple& q, double tol) {
  RotationalReport rep;
  rep.gamma1_max = max_abs_masked(q.g1, q.mask);
  rep.rotational = rep.gamma1_max <= tol;
  return rep;
}

RotationalReport rotational_test(const SpaceCurve& c, const Quadruple& q,
                                 double tol) {
  RotationalReport rep = rotational_test(q, tol);
  if (c.kappa.empty())
    raise(Status::InvalidArgument, "curve has no curvature samples");
  double mean = 0;
  for (double kv : c.kappa) mean += kv;
  mean /= double(c.kappa.size());
  for (double kv : c.kappa)
    rep.kappa_variation = std::max(rep.kappa_variation, std::abs(kv - mean));
  for (double tv : c.tau) rep.tau_max = std::max(rep.tau_max, std::abs(tv));
  rep.rotational = rep.rotational && rep.kappa_variation <= tol &&
                   rep.tau_max <= tol;
  return rep;
}

CircleFamilyReport circle_family_test(const Frenet& frenet, double tol) {
  const Grid& g = frenet.kappa1.grid;
  CircleFamilyReport rep;
  rep.tau1_max = max_abs_masked(frenet.tau1, frenet.mask);
  rep.tau2_max = max_abs_masked(frenet.tau2, frenet.mask);

  // Family 1 lines run along u (v fixed): kappa1 must be constant per line.
  for (int j = 0; j < g.nv; ++j) {
    bool first = true;
    double lo = 0, hi = 0;
    for (int i = 0; i < g.nu; ++i) {
      if (!frenet.mask.at(i, j)) continue;
      const double x = frenet.kappa1.at(i, j);
      if (first) {
        lo = hi = x;
        first = false;
      } else {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
      }
    }
    if (!first)
      rep.kappa1_line_variation = std::max(rep.kappa1_line_variation, hi - lo);
  }
  // Family 2 lines run along v (u fixed).
  for (int i = 0; i < g.nu; ++i) {
    bool first = true;
    double lo = 0, hi = 0;
    for (int j = 0; j < g.nv; ++j) {
      if (!frenet.mask.at(i, j)) continue;
      const double x = frenet.kappa2.at(i, j);
      if (first) {
        lo = hi = x;
        first = false;
      } else {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
      }
    }
    if (!first)
      rep.kappa2_line_variation = std::max(rep.kappa2_line_variation, hi - lo);
  }
  rep.family1 = rep.tau1_max <= tol && rep.kappa1_line_variation <= tol;
  rep.family2 = rep.tau2_max <= tol && rep.kappa2_line_variation <= tol;
  return rep;
}

GammaFile read_gamma_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(Status::Io, "cannot open " + path);
  std::string magic, version;
  in >> magic >> version;
  if (magic != "GAMMA" || version != "v1")
    raise(Status::Io, "not a GAMMA v1 file: " + path);

  GammaFile gf;
  std::string tok;
  while (in >> tok) {
    if (tok == "PROFILE") break;
    double kap, tau;
    if (!(in >> kap >> tau))
      raise(Status::Io, "truncated curve sample in " + path);
    gf.curve.v.push_back(std::stod(tok));
    gf.curve.kappa.push_back(kap);
    gf.curve.tau.push_back(tau);
  }
  if (tok != "PROFILE")
    raise(Status::Io, "missing PROFILE block in " + path);
  double u, k1;
  while (in >> u >> k1) {
    gf.profile_u.push_back(u);
    gf.profile_kappa1.push_back(k1);
  }
  uniform_step(gf.curve.v, "curve parameter");
  uniform_step(gf.profile_u, "profile parameter");
  return gf;
}

void write_gamma_file(const GammaFile& gf, const std::string& path) {
  std::FILE* fp = std::fopen(path.c_str(), "w");
  if (!fp) raise(Status::Io, "cannot open " + path + " for writing");
  std::fprintf(fp, "GAMMA v1\n");
  for (std::size_t k = 0; k < gf.curve.v.size(); ++k)
    std::fprintf(fp, "%.17g %.17g %.17g\n", gf.curve.v[k], gf.curve.kappa[k],
                 gf.curve.tau[k]);
  std::fprintf(fp, "PROFILE\n");
  for (std::size_t k = 0; k < gf.profile_u.size(); ++k)
    std::fprintf(fp, "%.17g %.17g\n", gf.profile_u[k], gf.profile_kappa1[k]);
  std::fclose(fp);
}

SpaceCurve torus_center_circle(int n_v) {
  if (n_v < 2) raise(Status::InvalidArgument, "need at least two samples");
  SpaceCurve c;
  c.v.resize(n_v);
  c.kappa.assign(n_v, 0.5);
  c.tau.assign(n_v, 0.0);
  c.x.resize(n_v);
  const double h = 4 * kPi / (n_v - 1);
  for (int k = 0; k < n_v; ++k) {
    c.v[k] = k * h;
    // Circle of radius 2 through the origin, consistent with the identity
    // initial frame: t(0) = (1,0,0), n(0) = (0,1,0).
    c.x[k] = Vec3(2 * std::sin(c.v[k] / 2), 2 - 2 * std::cos(c.v[k] / 2), 0);
  }
  return c;
}

PlaneProfile torus_circle_profile(int n_u) {
  if (n_u < 2) raise(Status::InvalidArgument, "need at least two samples");
  PlaneProfile p;
  p.u.resize(n_u);
  p.lambda.resize(n_u);
  p.mu.resize(n_u);
  p.phi.resize(n_u);
  p.kappa1.assign(n_u, 1.0);
  const double h = 2 * kPi / (n_u - 1);
  for (int k = 0; k < n_u; ++k) {
    p.u[k] = k * h;
    p.phi[k] = p.u[k];
    p.lambda[k] = std::sin(p.u[k]);
    p.mu[k] = 1 - std::cos(p.u[k]);
  }
  return p;
}

}  // namespace wg
