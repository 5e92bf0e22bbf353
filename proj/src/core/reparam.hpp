#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "core/grid.hpp"
#include "core/invariants.hpp"
#include "core/pde.hpp"

namespace wg {

// Separated metric functions of a principal chart carrying a Weingarten
// relation: lambda(u) = ln(sqrt(E) e^{If}) and mu(v) = ln(sqrt(G) e^{Ig})
// are functions of one variable each. Both are evaluated per node, averaged
// along the other axis, and the largest deviation from the average is the
// separability residual (O(h^2) on genuine data, large otherwise).
struct LambdaMu {
  std::vector<double> lambda;  // per u node (v-average)
  std::vector<double> mu;      // per v node (u-average)
  double lambda_dev = 0;
  double mu_dev = 0;
  double residual() const { return std::max(lambda_dev, mu_dev); }
};

// Uses the closed-form antiderivatives when the pair carries them (the
// additive normalization then matches the classical formulas exactly).
LambdaMu lambda_mu_functions(const Forms& forms, const WeingartenPair& pair,
                             const Field& nu);

// The chart is geometric iff sqrt(EG) (nu1 - nu2) is constant. The field
// is kept signed; statistics run over the quadruple's valid nodes.
struct CriterionReport {
  Field field;
  double constant = 0;  // mean over valid nodes
  double tol = 1e-8;
  double max = 0, min = 0, mean = 0;
  bool is_constant = false;  // (max - min) <= tol * |mean|
};

CriterionReport geometric_criterion(const Forms& forms, const Quadruple& q,
                                    double tol = 1e-8);

// Strictly monotone change of principal parameters
//   ubar(u) = a * integral of sqrt(E) e^{If(nu)} du + ubar0,
//   vbar(v) = b * integral of sqrt(G) e^{Ig(nu)} dv + vbar0,
// with the integrands averaged along the other axis before integrating.
struct ReparamMap {
  Field ubar, vbar;  // full-grid fields, constant along the other axis
  double a = 1, b = 1, ubar0 = 0, vbar0 = 0;
  bool u_monotone = false, v_monotone = false;
};

struct ReparamResult {
  ReparamMap map;
  Field nu;        // resampled onto the uniform (ubar, vbar) grid
  Forms forms;     // transformed metric: E = (1/a^2) e^{-2 If(nu)}, etc.
  Quadruple quad;  // resampled when supplied, else rebuilt from nu
  LambdaMu separability;
};

// Resamples to a uniform target grid with the same node counts; the first
// fundamental form transforms by the closed formula (it is not resampled),
// the second follows from L = nu1 E, N = nu2 G. Requires full-rectangle
// (unmasked) input data. NonMonotone if an integrand is not one-signed
// after scaling by a (resp. b).
ReparamResult geometric_reparam(const Forms& forms, const WeingartenPair& pair,
                                const Field& nu, double a, double b,
                                int base_i, int base_j,
                                const Quadruple* q = nullptr, double ubar0 = 0,
                                double vbar0 = 0);

// Serialization: `<base>.ubar` and `<base>.vbar` field files plus `<base>`
// itself as a small text header carrying the constants and flags.
void write_reparam_map(const ReparamMap& m, const std::string& base_path);
ReparamMap read_reparam_map(const std::string& base_path);

}  // namespace wg
