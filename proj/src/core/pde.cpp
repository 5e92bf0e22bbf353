#include "core/pde.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>

#include "core/errors.hpp"

#ifdef WG_HAVE_LAPACKE
#include <lapacke.h>
#endif

namespace wg {

namespace {

// Adaptive Simpson quadrature with the classical Richardson acceptance test.
double simpson_rec(const std::function<double(double)>& h, double a, double b,
                   double fa, double fm, double fb, double whole, double tol,
                   int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = h(lm), frm = h(rm);
  const double left = (m - a) / 6 * (fa + 4 * flm + fm);
  const double right = (b - m) / 6 * (fm + 4 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15 * tol)
    return left + right + delta / 15;
  return simpson_rec(h, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
         simpson_rec(h, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

double adaptive_simpson(const std::function<double(double)>& h, double a,
                        double b, double tol) {
  if (a == b) return 0.0;
  const double fa = h(a), fb = h(b), fm = h(0.5 * (a + b));
  const double whole = (b - a) / 6 * (fa + 4 * fm + fb);
  return simpson_rec(h, a, b, fa, fm, fb, whole, tol, 48);
}

}  // namespace

double WeingartenPair::If(double nu) const {
  if (branch_guard) branch_guard(nu);
  if (If_raw) return If_raw(nu) - If_raw(nu0);
  auto integrand = [this](double s) {
    const double d = f(s) - g(s);
    if (!(d > 0))
      raise(Status::PairDomainViolation,
            "f - g must stay positive along the antiderivative path");
    return fp(s) / d;
  };
  return adaptive_simpson(integrand, nu0, nu, 1e-12);
}

double WeingartenPair::Ig(double nu) const {
  if (branch_guard) branch_guard(nu);
  if (Ig_raw) return Ig_raw(nu) - Ig_raw(nu0);
  auto integrand = [this](double s) {
    const double d = g(s) - f(s);
    if (!(d < 0))
      raise(Status::PairDomainViolation,
            "f - g must stay positive along the antiderivative path");
    return gp(s) / d;
  };
  return adaptive_simpson(integrand, nu0, nu, 1e-12);
}

void WeingartenPair::require_valid(double nu) const {
  const double d = f(nu) - g(nu);
  if (!(d > 0))
    raise(Status::PairDomainViolation,
          "f - g must be positive (violated at nu = " + std::to_string(nu) +
              ")");
  const double prod = fp(nu) * gp(nu);
  if (!(prod != 0) || !std::isfinite(prod))
    raise(Status::PairDomainViolation,
          "f' g' must be nonzero (violated at nu = " + std::to_string(nu) +
              ")");
}

std::pair<double, double> canonical_scaling_cmc(double nu0) {
  if (!(nu0 > 0))
    raise(Status::InvalidBasePoint,
          "CMC canonical scaling requires nu0 > 0");
  const double a = std::sqrt(2 * nu0);
  return {a, a};
}

std::pair<double, double> canonical_scaling_constK(double K, double nu0) {
  if (!(nu0 * (nu0 * nu0 - K) > 0))
    raise(Status::InvalidBasePoint,
          "constant-K canonical scaling requires nu0 (nu0^2 - K) > 0");
  const double eps = (nu0 * nu0 - K) > 0 ? 1.0 : -1.0;
  const double a = std::sqrt(eps * (nu0 * nu0 - K));
  return {a, a / std::abs(nu0)};
}

WeingartenPair make_cmc_pair(double H, double nu0) {
  const auto [a, b] = canonical_scaling_cmc(nu0);
  return make_cmc_pair_scaled(H, nu0, a, b);
}

WeingartenPair make_cmc_pair_scaled(double H, double nu0, double a, double b) {
  if (!(nu0 > 0))
    raise(Status::InvalidBasePoint, "the CMC pair branch requires nu0 > 0");
  if (!(a > 0) || !(b > 0))
    raise(Status::InvalidArgument, "scale constants must be positive");
  WeingartenPair p;
  p.name = "cmc";
  p.H = H;
  p.nu0 = nu0;
  p.a = a;
  p.b = b;
  p.f = [H](double s) { return H + s; };
  p.g = [H](double s) { return H - s; };
  p.fp = [](double) { return 1.0; };
  p.gp = [](double) { return -1.0; };
  p.fpp = [](double) { return 0.0; };
  p.gpp = [](double) { return 0.0; };
  p.If_raw = [](double s) { return 0.5 * std::log(s); };
  p.Ig_raw = p.If_raw;
  p.branch_guard = [](double s) {
    if (!(s > 0))
      raise(Status::PairDomainViolation,
            "the CMC pair branch requires nu > 0 (got nu = " +
                std::to_string(s) + ")");
  };
  return p;
}

WeingartenPair make_constK_pair(double K, double nu0) {
  if (K == 0)
    raise(Status::InvalidArgument,
          "constant-K pair needs K != 0 (g = K/nu degenerates)");
  const auto [a, b] = canonical_scaling_constK(K, nu0);
  return make_constK_pair_scaled(K, nu0, a, b);
}

WeingartenPair make_constK_pair_scaled(double K, double nu0, double a,
                                       double b) {
  if (K == 0)
    raise(Status::InvalidArgument,
          "constant-K pair needs K != 0 (g = K/nu degenerates)");
  if (nu0 == 0 || nu0 * nu0 == K)
    raise(Status::InvalidBasePoint,
          "constant-K base point must satisfy nu0 != 0 and nu0^2 != K");
  if (!(a > 0) || !(b > 0))
    raise(Status::InvalidArgument, "scale constants must be positive");
  WeingartenPair p;
  p.name = "constK";
  p.K = K;
  p.eps = (nu0 * nu0 - K) > 0 ? 1.0 : -1.0;
  p.nu0 = nu0;
  p.a = a;
  p.b = b;
  p.f = [](double s) { return s; };
  p.g = [K](double s) { return K / s; };
  p.fp = [](double) { return 1.0; };
  p.gp = [K](double s) { return -K / (s * s); };
  p.fpp = [](double) { return 0.0; };
  p.gpp = [K](double s) { return 2 * K / (s * s * s); };
  p.If_raw = [K](double s) { return 0.5 * std::log(std::abs(s * s - K)); };
  p.Ig_raw = [K](double s) {
    return 0.5 * std::log(std::abs(s * s - K)) - std::log(std::abs(s));
  };
  p.branch_guard = [K, nu0](double s) {
    if (s * nu0 <= 0 || (s * s - K) * (nu0 * nu0 - K) <= 0)
      raise(Status::PairDomainViolation,
            "nu = " + std::to_string(s) +
                " leaves the base-point branch of the constant-K pair");
  };
  return p;
}

namespace {

Mask input_mask(const Grid& g, const Mask* mask, const char* where) {
  if (!mask) return Mask(g);
  require_same_grid(g, mask->grid, where);
  return *mask;
}

Mask intersect(const Mask& a, const Mask& b) {
  Mask out(a.grid, true);
  for (std::size_t k = 0; k < out.on.size(); ++k)
    out.on[k] = (a.on[k] && b.on[k]) ? 1 : 0;
  return out;
}

}  // namespace

ResidualField natural_residual_general(const Field& nu,
                                       const WeingartenPair& pair,
                                       bool normalized, const Mask* mask) {
  const Grid& g = nu.grid;
  Mask m0 = input_mask(g, mask, "natural residual");
  Field nu_u = partial_derivative(nu, Axis::U);
  Field nu_v = partial_derivative(nu, Axis::V);
  Field nu_uu = second_derivative(nu, Axis::U);
  Field nu_vv = second_derivative(nu, Axis::V);
  Mask m = intersect(propagate_second_derivative_mask(m0, Axis::U),
                     propagate_second_derivative_mask(m0, Axis::V));
  ResidualField out{Field(g), m};
  for (std::size_t k = 0; k < g.n(); ++k) {
    if (!m.on[k]) continue;
    const double x = nu.a[k];
    pair.require_valid(x);
    const double fv = pair.f(x), gv = pair.g(x);
    const double fpv = pair.fp(x), gpv = pair.gp(x);
    const double d = fv - gv;
    const double pre_v = pair.b * pair.b * std::exp(2 * pair.Ig(x));
    const double pre_u = pair.a * pair.a * std::exp(2 * pair.If(x));
    const double tv =
        pre_v * (fpv * nu_vv.a[k] +
                 (pair.fpp(x) - 2 * fpv * fpv / d) * nu_v.a[k] * nu_v.a[k]);
    const double tu =
        pre_u * (gpv * nu_uu.a[k] +
                 (pair.gpp(x) + 2 * gpv * gpv / d) * nu_u.a[k] * nu_u.a[k]);
    double r = tv - tu - fv * gv * d;
    if (normalized) r /= pre_v * fpv;
    out.r.a[k] = r;
  }
  return out;
}

ResidualField natural_residual_cmc(const Field& nu, double H,
                                   const Mask* mask) {
  const Grid& g = nu.grid;
  Mask m0 = input_mask(g, mask, "CMC residual");
  Field lognu(g);
  for (std::size_t k = 0; k < g.n(); ++k) {
    if (!m0.on[k]) continue;
    if (!(nu.a[k] > 0))
      raise(Status::DomainViolation,
            "the CMC equation requires nu > 0 at valid nodes");
    lognu.a[k] = std::log(nu.a[k]);
  }
  Field lap = laplacian(lognu, LapKind::Elliptic);
  Mask m = propagate_laplacian_mask(m0);
  ResidualField out{Field(g), m};
  for (std::size_t k = 0; k < g.n(); ++k) {
    if (!m.on[k]) continue;
    const double x = nu.a[k];
    out.r.a[k] = lap.a[k] - (H * H - x * x) / x;
  }
  return out;
}

ResidualField natural_residual_constK(const Field& nu, double K,
                                      const Mask* mask) {
  const Grid& g = nu.grid;
  Mask m0 = input_mask(g, mask, "constant-K residual");
  for (std::size_t k = 0; k < g.n(); ++k)
    if (m0.on[k] && !(nu.a[k] * nu.a[k] - K > 0))
      raise(Status::DomainViolation,
            "the constant-K equation requires nu^2 - K > 0 at valid nodes");
  Field nu_u = partial_derivative(nu, Axis::U);
  Field nu_v = partial_derivative(nu, Axis::V);
  Field nu_uu = second_derivative(nu, Axis::U);
  Field nu_vv = second_derivative(nu, Axis::V);
  Mask m = intersect(propagate_second_derivative_mask(m0, Axis::U),
                     propagate_second_derivative_mask(m0, Axis::V));
  ResidualField out{Field(g), m};
  for (std::size_t k = 0; k < g.n(); ++k) {
    if (!m.on[k]) continue;
    const double x = nu.a[k];
    out.r.a[k] = nu_vv.a[k] + K * nu_uu.a[k] -
                 2 * x * (nu_v.a[k] * nu_v.a[k] + K * nu_u.a[k] * nu_u.a[k]) /
                     (x * x - K) -
                 K * x;
  }
  return out;
}

Field substitute_lambda(const Field& in, SubstitutionCase c, bool inverse,
                        double H, const Mask* mask) {
  const Grid& g = in.grid;
  Mask m0 = input_mask(g, mask, "substitution");
  if (c == SubstitutionCase::Cmc && H == 0)
    raise(Status::InvalidArgument, "the CMC substitution needs H != 0");
  Field out(g);
  constexpr double pi = 3.14159265358979323846;
  for (std::size_t k = 0; k < g.n(); ++k) {
    if (!m0.on[k]) continue;
    const double x = in.a[k];
    double y = 0;
    if (!inverse) {
      switch (c) {
        case SubstitutionCase::Minimal:
          y = std::exp(x);
          break;
        case SubstitutionCase::Cmc:
          y = H * std::exp(x);
          break;
        case SubstitutionCase::ConstKPlus:
          if (x == 0)
            raise(Status::DomainViolation,
                  "K=+1 substitution needs lambda != 0");
          y = -1.0 / std::tanh(0.5 * x);
          break;
        case SubstitutionCase::ConstKMinus:
          if (!(std::abs(x) < pi))
            raise(Status::DomainViolation,
                  "K=-1 substitution needs |lambda| < pi");
          y = std::tan(0.5 * x);
          break;
      }
    } else {
      switch (c) {
        case SubstitutionCase::Minimal:
          if (!(x > 0))
            raise(Status::DomainViolation,
                  "minimal substitution needs nu > 0");
          y = std::log(x);
          break;
        case SubstitutionCase::Cmc:
          if (!(x / H > 0))
            raise(Status::DomainViolation,
                  "CMC substitution needs nu/H > 0");
          y = std::log(x / H);
          break;
        case SubstitutionCase::ConstKPlus:
          if (!(std::abs(x) > 1))
            raise(Status::DomainViolation,
                  "K=+1 substitution needs |nu| > 1");
          y = -2.0 * std::atanh(1.0 / x);
          break;
        case SubstitutionCase::ConstKMinus:
          y = 2.0 * std::atan(x);
          break;
      }
    }
    out.a[k] = y;
  }
  return out;
}

std::vector<double> solve_banded_builtin(int n, int kl, int ku,
                                         std::vector<double> band,
                                         std::vector<double> rhs) {
  const int ldab = 2 * kl + ku + 1;
  const int kutot = ku + kl;  // pivoting fills the extra upper band
  if (n < 1 || kl < 0 || ku < 0 ||
      band.size() != std::size_t(ldab) * std::size_t(n) ||
      rhs.size() != std::size_t(n))
    raise(Status::InvalidArgument, "banded system dimensions are inconsistent");
  auto at = [&](int i, int j) -> double& {
    return band[std::size_t(j) * ldab + (kl + ku + i - j)];
  };
  for (int k = 0; k < n; ++k) {
    const int iend = std::min(n - 1, k + kl);
    int p = k;
    for (int i = k + 1; i <= iend; ++i)
      if (std::abs(at(i, k)) > std::abs(at(p, k))) p = i;
    if (at(p, k) == 0)
      raise(Status::Internal, "singular banded system");
    const int jend = std::min(n - 1, k + kutot);
    if (p != k) {
      for (int j = k; j <= jend; ++j) std::swap(at(k, j), at(p, j));
      std::swap(rhs[k], rhs[p]);
    }
    const double piv = at(k, k);
    for (int i = k + 1; i <= iend; ++i) {
      const double mlt = at(i, k) / piv;
      if (mlt == 0) continue;
      for (int j = k + 1; j <= jend; ++j) at(i, j) -= mlt * at(k, j);
      rhs[i] -= mlt * rhs[k];
    }
  }
  for (int k = n - 1; k >= 0; --k) {
    double s = rhs[k];
    const int jend = std::min(n - 1, k + kutot);
    for (int j = k + 1; j <= jend; ++j) s -= at(k, j) * rhs[j];
    rhs[k] = s / at(k, k);
  }
  return rhs;
}

std::vector<double> solve_banded(int n, int kl, int ku,
                                 std::vector<double> band,
                                 std::vector<double> rhs) {
#ifdef WG_HAVE_LAPACKE
  const int ldab = 2 * kl + ku + 1;
  if (n < 1 || kl < 0 || ku < 0 ||
      band.size() != std::size_t(ldab) * std::size_t(n) ||
      rhs.size() != std::size_t(n))
    raise(Status::InvalidArgument, "banded system dimensions are inconsistent");
  std::vector<lapack_int> ipiv(n);
  const lapack_int info =
      LAPACKE_dgbsv(LAPACK_COL_MAJOR, n, kl, ku, 1, band.data(), ldab,
                    ipiv.data(), rhs.data(), n);
  if (info != 0)
    raise(Status::Internal,
          "banded solve failed (dgbsv info = " + std::to_string(info) + ")");
  return rhs;
#else
  return solve_banded_builtin(n, kl, ku, std::move(band), std::move(rhs));
#endif
}

EllipticSolution solve_elliptic(EllipticKind kind, const Field& boundary,
                                const EllipticOptions& opt) {
  const Grid& g = boundary.grid;
  if (g.nu < 3 || g.nv < 3)
    raise(Status::GridTooSmall, "elliptic solve needs at least a 3x3 grid");
  if (opt.source) require_same_grid(g, opt.source->grid, "elliptic source");

  std::function<double(double)> N, Np;
  switch (kind) {
    case EllipticKind::Liouville:
      N = [](double x) { return std::exp(x); };
      Np = N;
      break;
    case EllipticKind::SinhGordon: {
      const double H = opt.H;
      N = [H](double x) { return 2 * H * std::sinh(x); };
      Np = [H](double x) { return 2 * H * std::cosh(x); };
      break;
    }
    case EllipticKind::SinhGordonK1:
      N = [](double x) { return std::sinh(x); };
      Np = [](double x) { return std::cosh(x); };
      break;
  }

  const int nui = g.nu - 2, nvi = g.nv - 2;
  const int n = nui * nvi, kl = nui, ku = nui, ldab = 2 * kl + ku + 1;
  const double idu2 = 1 / (g.du * g.du), idv2 = 1 / (g.dv * g.dv);

  Field lam = boundary;
  for (int j = 1; j <= nvi; ++j)
    for (int i = 1; i <= nui; ++i) lam.at(i, j) = 0;

  // Residual of the discrete equation; `nonlin` off gives the plain
  // five-point Laplacian (used for the harmonic-extension initial guess).
  auto assemble_residual = [&](const Field& L, bool nonlin,
                               std::vector<double>& F) {
    double norm = 0;
    for (int j = 1; j <= nvi; ++j)
      for (int i = 1; i <= nui; ++i) {
        const double lc = L.at(i, j);
        double r = (L.at(i - 1, j) + L.at(i + 1, j) - 2 * lc) * idu2 +
                   (L.at(i, j - 1) + L.at(i, j + 1) - 2 * lc) * idv2;
        if (nonlin) {
          r += N(lc);
          if (opt.source) r -= opt.source->at(i, j);
        }
        F[(j - 1) * nui + (i - 1)] = r;
        norm = std::max(norm, std::abs(r));
      }
    return norm;
  };

  auto assemble_matrix = [&](const Field& L, bool nonlin,
                             std::vector<double>& band) {
    std::fill(band.begin(), band.end(), 0.0);
    for (int j = 1; j <= nvi; ++j)
      for (int i = 1; i <= nui; ++i) {
        const int m = (j - 1) * nui + (i - 1);
        double diag = -2 * idu2 - 2 * idv2;
        if (nonlin) diag += Np(L.at(i, j));
        band[std::size_t(m) * ldab + kl + ku] = diag;
        if (i > 1) band[std::size_t(m - 1) * ldab + kl + ku + 1] = idu2;
        if (i < nui) band[std::size_t(m + 1) * ldab + kl + ku - 1] = idu2;
        if (j > 1) band[std::size_t(m - nui) * ldab + kl + ku + nui] = idv2;
        if (j < nvi) band[std::size_t(m + nui) * ldab + kl + ku - nui] = idv2;
      }
  };

  auto apply_update = [&](Field& L, const std::vector<double>& d,
                          double alpha) {
    for (int j = 1; j <= nvi; ++j)
      for (int i = 1; i <= nui; ++i)
        L.at(i, j) += alpha * d[(j - 1) * nui + (i - 1)];
  };

  std::vector<double> F(n), band(std::size_t(ldab) * n);

  // Harmonic extension of the boundary data as the initial guess.
  assemble_residual(lam, false, F);
  assemble_matrix(lam, false, band);
  for (double& x : F) x = -x;
  apply_update(lam, solve_banded(n, kl, ku, band, F), 1.0);

  EllipticSolution out;
  double normF = assemble_residual(lam, true, F);
  out.residual_history.push_back(normF);

  bool converged = false;
  for (int it = 1; it <= opt.max_iter && !converged; ++it) {
    assemble_matrix(lam, true, band);
    std::vector<double> rhs(F);
    for (double& x : rhs) x = -x;
    std::vector<double> delta = solve_banded(n, kl, ku, band, rhs);
    double ndelta = 0;
    for (double x : delta) ndelta = std::max(ndelta, std::abs(x));

    if (ndelta <= opt.update_tol && normF <= opt.residual_tol) {
      // Converged: take the last (tiny) undamped correction as-is.
      apply_update(lam, delta, 1.0);
      normF = assemble_residual(lam, true, F);
      out.residual_history.push_back(normF);
      out.iterations = it;
      converged = true;
      break;
    }

    double alpha = 1.0;
    Field trial = lam;
    std::vector<double> Ft(n);
    double normT;
    while (true) {
      trial = lam;
      apply_update(trial, delta, alpha);
      normT = assemble_residual(trial, true, Ft);
      if (std::isfinite(normT) && normT <= (1 - 1e-4 * alpha) * normF) break;
      alpha *= 0.5;
      if (alpha < 1e-12)
        raise(Status::LineSearchFailure,
              "Newton damping underflow at iteration " + std::to_string(it) +
                  " (residual " + std::to_string(normF) + ")");
    }
    lam = trial;
    F = Ft;
    normF = normT;
    out.residual_history.push_back(normF);
    out.iterations = it;
  }
  if (!converged)
    raise(Status::NoConvergence,
          "no convergence after " + std::to_string(opt.max_iter) +
              " Newton iterations (residual " + std::to_string(normF) + ")");

  out.lambda = std::move(lam);
  out.residual = normF;
  out.branch = Mask(g, true);
  if (kind == EllipticKind::SinhGordonK1)
    for (std::size_t k = 0; k < g.n(); ++k)
      out.branch.on[k] = out.lambda.a[k] < 0 ? 1 : 0;
  return out;
}

HyperbolicSolution solve_hyperbolic_sine_gordon(const Grid& g,
                                                const HyperbolicInitial& init) {
  if (init.lambda.size() != std::size_t(g.nu) ||
      init.lambda_v.size() != std::size_t(g.nu))
    raise(Status::InvalidArgument,
          "initial strip must supply lambda and lambda_v at every u node");
  if (g.dv > g.du)
    raise(Status::CflViolation,
          "marching requires dv <= du (dv = " + std::to_string(g.dv) +
              ", du = " + std::to_string(g.du) + ")");

  HyperbolicSolution out{Field(g), Mask(g, false), Mask(g, false), 0.0};
  Field& L = out.lambda;
  const double idu2 = 1 / (g.du * g.du);
  const double dv2 = g.dv * g.dv;

  auto blow_check = [&](double x, int i, int j) {
    if (!std::isfinite(x) || std::abs(x) > 1e3)
      raise(Status::BlowUp, "solution blew up at node (" + std::to_string(i) +
                                ", " + std::to_string(j) + ")");
  };

  for (int i = 0; i < g.nu; ++i) {
    L.at(i, 0) = init.lambda[i];
    blow_check(L.at(i, 0), i, 0);
    out.cone.set(i, 0, true);
  }
  out.max_abs = 0;
  for (int i = 0; i < g.nu; ++i)
    out.max_abs = std::max(out.max_abs, std::abs(L.at(i, 0)));

  // First row by second-order Taylor, then leapfrog; the computed span
  // shrinks by one node per side each step.
  for (int j = 1; j < g.nv; ++j) {
    const int lo = j, hi = g.nu - 1 - j;  // inclusive span of row j
    if (lo > hi) break;
    for (int i = lo; i <= hi; ++i) {
      const double uu =
          (L.at(i - 1, j - 1) - 2 * L.at(i, j - 1) + L.at(i + 1, j - 1)) *
          idu2;
      double val;
      if (j == 1) {
        val = init.lambda[i] + g.dv * init.lambda_v[i] +
              0.5 * dv2 * (uu - std::sin(init.lambda[i]));
      } else {
        val = 2 * L.at(i, j - 1) - L.at(i, j - 2) +
              dv2 * (uu - std::sin(L.at(i, j - 1)));
      }
      blow_check(val, i, j);
      L.at(i, j) = val;
      out.cone.set(i, j, true);
      out.max_abs = std::max(out.max_abs, std::abs(val));
    }
  }

  constexpr double half_pi = 1.57079632679489661923;
  for (std::size_t k = 0; k < g.n(); ++k)
    out.branch.on[k] =
        (out.cone.on[k] && out.lambda.a[k] > 0 && out.lambda.a[k] < half_pi)
            ? 1
            : 0;
  return out;
}

namespace {

// gamma1 = e^{Ig} b f' nu_v / (f-g); gamma2 = e^{If} a g' nu_u / (f-g)
// (the latter is -e^{If} a g' nu_u / (g-f)).
void gammas_from_pair(const WeingartenPair& pair, double x, double nu_u,
                      double nu_v, double& g1, double& g2) {
  const double d = pair.f(x) - pair.g(x);
  g1 = std::exp(pair.Ig(x)) * pair.b * pair.fp(x) * nu_v / d;
  g2 = std::exp(pair.If(x)) * pair.a * pair.gp(x) * nu_u / d;
}

}  // namespace

Quadruple invariants_from_nu(const Field& nu, const WeingartenPair& pair,
                             const Mask* mask) {
  const Grid& g = nu.grid;
  Mask m0 = input_mask(g, mask, "invariants from nu");
  Field nu_u = partial_derivative(nu, Axis::U);
  Field nu_v = partial_derivative(nu, Axis::V);
  Mask m = intersect(propagate_derivative_mask(m0, Axis::U),
                     propagate_derivative_mask(m0, Axis::V));
  Quadruple q{Field(g), Field(g), Field(g), Field(g), m, {}, {}, {}, {}};
  for (std::size_t k = 0; k < g.n(); ++k) {
    if (!m.on[k]) continue;
    const double x = nu.a[k];
    pair.require_valid(x);
    if (nu_u.a[k] == 0 || nu_v.a[k] == 0) {
      const int i = int(k % g.nu), j = int(k / g.nu);
      raise(Status::ZeroGradient,
            "nu_u nu_v vanishes at valid node (" + std::to_string(i) + ", " +
                std::to_string(j) + ")");
    }
    q.nu1.a[k] = pair.f(x);
    q.nu2.a[k] = pair.g(x);
    gammas_from_pair(pair, x, nu_u.a[k], nu_v.a[k], q.g1.a[k], q.g2.a[k]);
  }
  return q;
}

TauPair frenet_tau_from_pair(const Field& nu, const WeingartenPair& pair,
                             const Mask* mask) {
  const Grid& g = nu.grid;
  Mask m0 = input_mask(g, mask, "pair torsions");
  Field nu_u = partial_derivative(nu, Axis::U);
  Field nu_v = partial_derivative(nu, Axis::V);
  Field nu_uv = partial_derivative(nu_u, Axis::V);
  Mask m = propagate_derivative_mask(propagate_derivative_mask(m0, Axis::U),
                                     Axis::V);
  const double c =
      pair.a * pair.b / (pair.f(pair.nu0) - pair.g(pair.nu0));
  TauPair out{Field(g), Field(g), m};
  for (std::size_t k = 0; k < g.n(); ++k) {
    if (!m.on[k]) continue;
    const double x = nu.a[k];
    pair.require_valid(x);
    const double fv = pair.f(x), gv = pair.g(x);
    const double fpv = pair.fp(x), gpv = pair.gp(x);
    const double d = fv - gv;
    double g1, g2;
    gammas_from_pair(pair, x, nu_u.a[k], nu_v.a[k], g1, g2);
    const double k1sq = fv * fv + g1 * g1;
    const double k2sq = gv * gv + g2 * g2;
    if (k1sq <= 1e-24 || k2sq <= 1e-24)
      raise(Status::VanishingCurvature,
            "a principal line is straight; its torsion is undefined");
    const double uv = nu_uv.a[k], prod = nu_u.a[k] * nu_v.a[k];
    out.tau1.a[k] =
        -c / k1sq *
        (fv * fpv * uv +
         (fv * pair.fpp(x) - fpv * fpv * (2 * fv - gv) / d) * prod);
    out.tau2.a[k] =
        -c / k2sq *
        (gv * gpv * uv +
         (gv * pair.gpp(x) + gpv * gpv * (2 * gv - fv) / d) * prod);
  }
  return out;
}

Frenet principal_line_frenet(const Quadruple& q, const Forms& forms,
                             const Field& nu, const WeingartenPair& pair,
                             double tol) {
  require_same_grid(q.grid(), nu.grid, "pair Frenet data");
  Frenet fr = principal_line_frenet(q, forms, tol);
  TauPair tp = frenet_tau_from_pair(nu, pair, &q.mask);
  fr.tau1 = std::move(tp.tau1);
  fr.tau2 = std::move(tp.tau2);
  fr.mask = intersect(fr.mask, tp.mask);
  return fr;
}

}  // namespace wg
