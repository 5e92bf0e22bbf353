#include "core/reparam.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "core/errors.hpp"

namespace wg {

namespace {

// Antiderivative with the classical additive normalization when the pair
// carries closed forms; the quadrature fallback only shifts by a constant,
// which neither the deviations nor the criterion depend on.
double raw_If(const WeingartenPair& p, double x) {
  if (p.branch_guard) p.branch_guard(x);
  return p.If_raw ? p.If_raw(x) : p.If(x);
}

double raw_Ig(const WeingartenPair& p, double x) {
  if (p.branch_guard) p.branch_guard(x);
  return p.Ig_raw ? p.Ig_raw(x) : p.Ig(x);
}

}  // namespace

LambdaMu lambda_mu_functions(const Forms& forms, const WeingartenPair& pair,
                             const Field& nu) {
  const Grid& g = forms.grid();
  require_same_grid(g, nu.grid, "lambda/mu input");
  Field lam(g), mu(g);
  for (std::size_t k = 0; k < g.n(); ++k) {
    const double E = forms.E.a[k], G = forms.G.a[k];
    if (!(E > 0) || !(G > 0))
      raise(Status::InvalidArgument,
            "metric coefficients must be positive for lambda/mu");
    const double x = nu.a[k];
    lam.a[k] = 0.5 * std::log(E) + raw_If(pair, x);
    mu.a[k] = 0.5 * std::log(G) + raw_Ig(pair, x);
  }

  LambdaMu out;
  out.lambda.resize(g.nu);
  out.mu.resize(g.nv);
  for (int i = 0; i < g.nu; ++i) {
    double s = 0;
    for (int j = 0; j < g.nv; ++j) s += lam.at(i, j);
    out.lambda[i] = s / g.nv;
  }
  for (int j = 0; j < g.nv; ++j) {
    double s = 0;
    for (int i = 0; i < g.nu; ++i) s += mu.at(i, j);
    out.mu[j] = s / g.nu;
  }
  for (int j = 0; j < g.nv; ++j)
    for (int i = 0; i < g.nu; ++i) {
      out.lambda_dev =
          std::max(out.lambda_dev, std::abs(lam.at(i, j) - out.lambda[i]));
      out.mu_dev = std::max(out.mu_dev, std::abs(mu.at(i, j) - out.mu[j]));
    }
  return out;
}

CriterionReport geometric_criterion(const Forms& forms, const Quadruple& q,
                                    double tol) {
  const Grid& g = forms.grid();
  require_same_grid(g, q.grid(), "criterion input");
  CriterionReport rep;
  rep.field = Field(g);
  rep.tol = tol;
  double sum = 0;
  std::size_t count = 0;
  bool first = true;
  for (std::size_t k = 0; k < g.n(); ++k) {
    const double val = std::sqrt(std::max(0.0, forms.E.a[k] * forms.G.a[k])) *
                       (q.nu1.a[k] - q.nu2.a[k]);
    rep.field.a[k] = val;
    if (!q.mask.on[k]) continue;
    sum += val;
    ++count;
    if (first) {
      rep.max = rep.min = val;
      first = false;
    } else {
      rep.max = std::max(rep.max, val);
      rep.min = std::min(rep.min, val);
    }
  }
  if (count) {
    rep.mean = sum / double(count);
    rep.constant = rep.mean;
    rep.is_constant = (rep.max - rep.min) <= tol * std::abs(rep.mean);
  }
  return rep;
}

namespace {

// Value and derivative of the Lagrange interpolant through up to four
// consecutive axis samples, evaluated at parameter position x.
void lagrange_eval(std::span<const double> y, double x0, double dx, int first,
                   int count, double x, double& val, double& der) {
  val = 0;
  der = 0;
  for (int m = 0; m < count; ++m) {
    const double xm = x0 + (first + m) * dx;
    double num = 1, dnum = 0;
    for (int l = 0; l < count; ++l) {
      if (l == m) continue;
      const double xl = x0 + (first + l) * dx;
      dnum = dnum * (x - xl) + num;
      num *= (x - xl);
    }
    double den = 1;
    for (int l = 0; l < count; ++l) {
      if (l == m) continue;
      den *= (xm - (x0 + (first + l) * dx));
    }
    val += y[first + m] * num / den;
    der += y[first + m] * dnum / den;
  }
}

// Inverts a strictly increasing sampled axis map: returns x with s(x) = t.
// Bracket by binary search over sample intervals, then Newton on the local
// cubic interpolant with bisection fallback.
double invert_axis(std::span<const double> s, double x0, double dx,
                   double t) {
  const int n = int(s.size());
  if (t <= s.front()) return x0;
  if (t >= s.back()) return x0 + (n - 1) * dx;
  int lo = 0, hi = n - 1;
  while (hi - lo > 1) {
    const int mid = (lo + hi) / 2;
    (s[mid] <= t ? lo : hi) = mid;
  }
  const int count = std::min(4, n);
  const int first = std::clamp(lo - 1, 0, n - count);
  double a = x0 + lo * dx, b = x0 + hi * dx;
  double x = a + (b - a) * (t - s[lo]) / (s[hi] - s[lo]);
  for (int it = 0; it < 80; ++it) {
    double val, der;
    lagrange_eval(s, x0, dx, first, count, x, val, der);
    const double f = val - t;
    if (std::abs(f) <= 1e-14 * (1 + std::abs(t))) break;
    if (f > 0)
      b = x;
    else
      a = x;
    double step = der != 0 ? x - f / der : a - 1;  // force bisection if flat
    if (!(step > a && step < b)) step = 0.5 * (a + b);
    if (std::abs(step - x) <= 1e-16 * (1 + std::abs(x))) {
      x = step;
      break;
    }
    x = step;
  }
  return x;
}

}  // namespace

ReparamResult geometric_reparam(const Forms& forms, const WeingartenPair& pair,
                                const Field& nu, double a, double b,
                                int base_i, int base_j, const Quadruple* q,
                                double ubar0, double vbar0) {
  const Grid& g = forms.grid();
  require_same_grid(g, nu.grid, "reparametrization input");
  if (q) require_same_grid(g, q->grid(), "reparametrization quadruple");
  if (base_i < 0 || base_i >= g.nu || base_j < 0 || base_j >= g.nv)
    raise(Status::InvalidArgument, "base node outside the grid");

  ReparamResult out;
  out.separability = lambda_mu_functions(forms, pair, nu);

  // Row/column-averaged integrands (relative antiderivatives so that the
  // canonical metric formulas below hold exactly at the base point).
  std::vector<double> pbar(g.nu, 0.0), qbar(g.nv, 0.0);
  for (int j = 0; j < g.nv; ++j)
    for (int i = 0; i < g.nu; ++i) {
      const double x = nu.at(i, j);
      const double E = forms.E.at(i, j), G = forms.G.at(i, j);
      if (!(E > 0) || !(G > 0))
        raise(Status::InvalidArgument,
              "metric coefficients must be positive for reparametrization");
      pbar[i] += std::sqrt(E) * std::exp(pair.If(x)) / g.nv;
      qbar[j] += std::sqrt(G) * std::exp(pair.Ig(x)) / g.nu;
    }
  for (int i = 0; i < g.nu; ++i)
    if (!(a * pbar[i] > 0))
      raise(Status::NonMonotone,
            "the ubar integrand is not one-signed (column " +
                std::to_string(i) + ")");
  for (int j = 0; j < g.nv; ++j)
    if (!(b * qbar[j] > 0))
      raise(Status::NonMonotone,
            "the vbar integrand is not one-signed (row " + std::to_string(j) +
                ")");

  std::vector<double> Iu = cumulative_integral(pbar, g.du, Rule::Simpson);
  std::vector<double> Iv = cumulative_integral(qbar, g.dv, Rule::Simpson);
  std::vector<double> ub(g.nu), vb(g.nv);
  for (int i = 0; i < g.nu; ++i)
    ub[i] = a * (Iu[i] - Iu[base_i]) + ubar0;
  for (int j = 0; j < g.nv; ++j)
    vb[j] = b * (Iv[j] - Iv[base_j]) + vbar0;

  out.map.a = a;
  out.map.b = b;
  out.map.ubar0 = ubar0;
  out.map.vbar0 = vbar0;
  out.map.ubar = Field(g);
  out.map.vbar = Field(g);
  for (int j = 0; j < g.nv; ++j)
    for (int i = 0; i < g.nu; ++i) {
      out.map.ubar.at(i, j) = ub[i];
      out.map.vbar.at(i, j) = vb[j];
    }
  out.map.u_monotone = true;  // guaranteed by the sign checks above
  out.map.v_monotone = true;

  // Uniform target grid spanning the same parameter ranges.
  Grid tg(g.nu, g.nv, ub.front(), vb.front(),
          (ub.back() - ub.front()) / (g.nu - 1),
          (vb.back() - vb.front()) / (g.nv - 1));

  // Preimages of the target axis nodes under the monotone axis maps.
  std::vector<double> usrc(tg.nu), vsrc(tg.nv);
  for (int i = 0; i < tg.nu; ++i)
    usrc[i] = invert_axis(ub, g.u0, g.du, tg.u(i));
  for (int j = 0; j < tg.nv; ++j)
    vsrc[j] = invert_axis(vb, g.v0, g.dv, tg.v(j));

  out.nu = Field(tg);
  for (int j = 0; j < tg.nv; ++j)
    for (int i = 0; i < tg.nu; ++i)
      out.nu.at(i, j) = resample_value(nu, usrc[i], vsrc[j]);

  // The metric transforms by the closed formula; the second form follows
  // from the principal-chart relations L = nu1 E, N = nu2 G.
  out.forms.E = Field(tg);
  out.forms.F = Field(tg);
  out.forms.G = Field(tg);
  out.forms.L = Field(tg);
  out.forms.M = Field(tg);
  out.forms.N = Field(tg);
  for (std::size_t k = 0; k < tg.n(); ++k) {
    const double x = out.nu.a[k];
    pair.require_valid(x);
    const double Ebar = std::exp(-2 * pair.If(x)) / (a * a);
    const double Gbar = std::exp(-2 * pair.Ig(x)) / (b * b);
    out.forms.E.a[k] = Ebar;
    out.forms.G.a[k] = Gbar;
    out.forms.L.a[k] = pair.f(x) * Ebar;
    out.forms.N.a[k] = pair.g(x) * Gbar;
  }

  if (q) {
    out.quad.nu1 = Field(tg);
    out.quad.nu2 = Field(tg);
    out.quad.g1 = Field(tg);
    out.quad.g2 = Field(tg);
    out.quad.mask = Mask(tg, true);
    for (int j = 0; j < tg.nv; ++j)
      for (int i = 0; i < tg.nu; ++i) {
        const std::size_t k = tg.idx(i, j);
        out.quad.nu1.a[k] = resample_value(q->nu1, usrc[i], vsrc[j]);
        out.quad.nu2.a[k] = resample_value(q->nu2, usrc[i], vsrc[j]);
        out.quad.g1.a[k] = resample_value(q->g1, usrc[i], vsrc[j]);
        out.quad.g2.a[k] = resample_value(q->g2, usrc[i], vsrc[j]);
      }
  } else {
    out.quad = invariants_from_nu(out.nu, pair);
  }
  return out;
}

void write_reparam_map(const ReparamMap& m, const std::string& base_path) {
  write_field(m.ubar, base_path + ".ubar");
  write_field(m.vbar, base_path + ".vbar");
  std::FILE* fp = std::fopen(base_path.c_str(), "w");
  if (!fp) raise(Status::Io, "cannot open " + base_path + " for writing");
  std::fprintf(fp, "REPARAM v1\n");
  std::fprintf(fp, "a %.17g\n", m.a);
  std::fprintf(fp, "b %.17g\n", m.b);
  std::fprintf(fp, "ubar0 %.17g\n", m.ubar0);
  std::fprintf(fp, "vbar0 %.17g\n", m.vbar0);
  std::fprintf(fp, "u_monotone %d\n", m.u_monotone ? 1 : 0);
  std::fprintf(fp, "v_monotone %d\n", m.v_monotone ? 1 : 0);
  std::fclose(fp);
}

ReparamMap read_reparam_map(const std::string& base_path) {
  std::ifstream in(base_path);
  if (!in) raise(Status::Io, "cannot open " + base_path);
  std::string magic, version;
  in >> magic >> version;
  if (magic != "REPARAM" || version != "v1")
    raise(Status::Io, "not a REPARAM v1 file: " + base_path);
  ReparamMap m;
  std::string key;
  int um = 1, vm = 1;
  while (in >> key) {
    if (key == "a")
      in >> m.a;
    else if (key == "b")
      in >> m.b;
    else if (key == "ubar0")
      in >> m.ubar0;
    else if (key == "vbar0")
      in >> m.vbar0;
    else if (key == "u_monotone")
      in >> um;
    else if (key == "v_monotone")
      in >> vm;
    else
      raise(Status::Io, "unknown header entry '" + key + "' in " + base_path);
    if (!in) raise(Status::Io, "truncated header in " + base_path);
  }
  m.u_monotone = um != 0;
  m.v_monotone = vm != 0;
  m.ubar = read_field(base_path + ".ubar");
  m.vbar = read_field(base_path + ".vbar");
  return m;
}

}  // namespace wg
