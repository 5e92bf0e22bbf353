#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "core/grid.hpp"
#include "core/invariants.hpp"

namespace wg {

// A functional relation between the principal curvatures expressed through
// a common parameter: nu1 = f(nu), nu2 = g(nu), with scale constants a, b
// and a base point nu0. If/Ig are the antiderivatives of f'/(f-g) and
// g'/(g-f) taken from nu0; they drive the metric prefactors
// E = (1/a^2) e^{-2 If}, G = (1/b^2) e^{-2 Ig}. Closed-form antiderivatives
// may be supplied (If_raw/Ig_raw, base point free); otherwise adaptive
// quadrature from nu0 is used.
struct WeingartenPair {
  std::string name;  // "cmc", "constK", or a custom label
  std::function<double(double)> f, g;      // curvature relation
  std::function<double(double)> fp, gp;    // first derivatives
  std::function<double(double)> fpp, gpp;  // second derivatives
  double nu0 = 1;
  double a = 1, b = 1;
  std::optional<double> H;  // constant mean curvature pairs
  std::optional<double> K;  // constant Gauss curvature pairs
  double eps = 1;           // sign(nu0^2 - K) for constant-K pairs

  // Optional closed-form antiderivatives (any additive constant).
  std::function<double(double)> If_raw, Ig_raw;
  // Optional branch guard: raises if nu cannot be joined to nu0 without
  // crossing a singularity of the relation (set by the factories).
  std::function<void(double)> branch_guard;

  double If(double nu) const;  // integral of f'/(f-g) from nu0 to nu
  double Ig(double nu) const;  // integral of g'/(g-f) from nu0 to nu
  // f(nu)-g(nu) > 0 and f'(nu) g'(nu) != 0, else PairDomainViolation.
  void require_valid(double nu) const;
};

// Canonical scale constants: a^2 = 2 nu0 (CMC); a^2 = eps (nu0^2 - K),
// b^2 = a^2 / nu0^2 (constant K). InvalidBasePoint outside the valid range
// (nu0 > 0 for CMC, nu0 (nu0^2 - K) > 0 for constant K).
std::pair<double, double> canonical_scaling_cmc(double nu0);
std::pair<double, double> canonical_scaling_constK(double K, double nu0);

// f = H + nu, g = H - nu with the canonical scaling a = b = sqrt(2 nu0).
WeingartenPair make_cmc_pair(double H, double nu0);
// f = nu, g = K/nu with the canonical scaling; K must be nonzero.
WeingartenPair make_constK_pair(double K, double nu0);

// The same pairs with caller-chosen scale constants (the reparametrization
// map is defined for any a, b > 0). The base point only has to sit on a
// branch: nu0 > 0 for CMC; nu0 != 0 and nu0^2 != K for constant K — in
// particular nu0 < 0 branches, which canonical scaling rejects, are valid.
WeingartenPair make_cmc_pair_scaled(double H, double nu0, double a, double b);
WeingartenPair make_constK_pair_scaled(double K, double nu0, double a,
                                       double b);

struct ResidualField {
  Field r;
  Mask mask;  // nodes where the finite-difference stencils are valid
};

// Pointwise residual of the natural equation for a general pair:
//   b^2 e^{2 Ig} [f' nu_vv + (f'' - 2 f'^2/(f-g)) nu_v^2]
// - a^2 e^{2 If} [g' nu_uu + (g'' - 2 g'^2/(g-f)) nu_u^2] - f g (f-g).
// With `normalized`, the result is divided by b^2 e^{2 Ig} f', which turns
// the CMC case into nu * (residual of the specialized CMC equation) and the
// constant-K case into exactly the specialized form below.
ResidualField natural_residual_general(const Field& nu,
                                       const WeingartenPair& pair,
                                       bool normalized = false,
                                       const Mask* mask = nullptr);

// Residual of the constant-mean-curvature equation
//   laplacian(ln nu) - (H^2 - nu^2)/nu.     (requires nu > 0)
ResidualField natural_residual_cmc(const Field& nu, double H,
                                   const Mask* mask = nullptr);

// Residual of the constant-Gauss-curvature equation
//   nu_vv + K nu_uu - 2 nu (nu_v^2 + K nu_u^2)/(nu^2 - K) - K nu,
// valid where nu^2 - K != 0 (DomainViolation otherwise).
ResidualField natural_residual_constK(const Field& nu, double K,
                                      const Mask* mask = nullptr);

// The classical substitutions that reduce the natural equation to the
// Liouville / sinh-Gordon / sine-Gordon forms.
enum class SubstitutionCase {
  Minimal,     // nu = e^lambda
  Cmc,         // nu = H e^lambda
  ConstKPlus,  // nu = -coth(lambda/2), lambda = -2 artanh(1/nu), |nu| > 1
  ConstKMinus  // nu = tan(lambda/2),   lambda = 2 arctan nu
};

// Forward map (lambda -> nu) or, with `inverse`, nu -> lambda. The two
// directions are mutually inverse to machine precision on the valid
// domains; out-of-domain values raise DomainViolation naming the case.
Field substitute_lambda(const Field& in, SubstitutionCase c, bool inverse,
                        double H = 0.5, const Mask* mask = nullptr);

enum class EllipticKind {
  Liouville,     // laplacian lambda = -e^lambda
  SinhGordon,    // laplacian lambda = -2 H sinh lambda
  SinhGordonK1,  // laplacian lambda = -sinh lambda (K = +1 branch)
};

struct EllipticOptions {
  double H = 0.5;               // SinhGordon only
  double update_tol = 1e-11;    // max-norm Newton update
  double residual_tol = 1e-10;  // max-norm discrete residual
  int max_iter = 500;
  const Field* source = nullptr;  // optional manufactured forcing s(u,v):
                                  // solves laplacian + N(lambda) = s
};

struct EllipticSolution {
  Field lambda;  // full grid, boundary ring = input data
  double residual = 0;
  int iterations = 0;
  std::vector<double> residual_history;  // max-norm after each accepted step
  Mask branch;  // K=+1 case: nodes with lambda < 0; all-on otherwise
};

// Damped-Newton solve of the five-point discretization with Dirichlet data
// taken from the boundary ring of `boundary` (interior values ignored).
// Converged when both the Newton update and the residual drop below the
// tolerances; NoConvergence / LineSearchFailure otherwise.
EllipticSolution solve_elliptic(EllipticKind kind, const Field& boundary,
                                const EllipticOptions& opt = {});

struct HyperbolicInitial {
  std::vector<double> lambda;    // on the first grid row (v = v0)
  std::vector<double> lambda_v;  // v-derivative on the same row
};

struct HyperbolicSolution {
  Field lambda;  // values outside the dependence cone are zero
  Mask cone;     // nodes actually computed
  Mask branch;   // cone nodes with 0 < lambda < pi/2
  double max_abs = 0;
};

// Explicit second-order marching for lambda_vv = lambda_uu - sin lambda
// from a Goursat strip at the first row; each v-step trims one u-node per
// side (domain of dependence). Requires dv <= du (CflViolation); BlowUp
// if |lambda| exceeds 1e3.
HyperbolicSolution solve_hyperbolic_sine_gordon(const Grid& g,
                                                const HyperbolicInitial& init);

// Invariant quadruple generated by a solution nu of the natural equation:
//   nu1 = f(nu), nu2 = g(nu),
//   gamma1 =  e^{Ig} b f' nu_v / (f-g),
//   gamma2 = -e^{If} a g' nu_u / (g-f).
// Raises ZeroGradient where nu_u or nu_v vanishes at a valid node.
Quadruple invariants_from_nu(const Field& nu, const WeingartenPair& pair,
                             const Mask* mask = nullptr);

struct TauPair {
  Field tau1, tau2;
  Mask mask;
};

// Principal-line torsions straight from nu and the pair (no frame needed):
//   tau1 = -c/(f^2+gamma1^2) (f f' nu_uv + [f f'' - f'^2 (2f-g)/(f-g)] nu_u nu_v)
// and symmetrically for tau2, with the constant c = a b / (f(nu0)-g(nu0))
// (c = 1 under the canonical scalings).
TauPair frenet_tau_from_pair(const Field& nu, const WeingartenPair& pair,
                             const Mask* mask = nullptr);

// Frenet data with kappa/theta from the quadruple as usual but the
// torsions computed from the pair route above.
Frenet principal_line_frenet(const Quadruple& q, const Forms& forms,
                             const Field& nu, const WeingartenPair& pair,
                             double tol = 1e-12);

// Banded linear solve, LAPACK band storage: `band` is column-major with
// leading dimension 2*kl+ku+1 and A(i,j) at band[j*ldab + kl+ku+i-j].
// Dispatches to LAPACKE when available, else the built-in elimination.
std::vector<double> solve_banded(int n, int kl, int ku,
                                 std::vector<double> band,
                                 std::vector<double> rhs);
// The portable built-in path (partial-pivoted band LU), always compiled.
std::vector<double> solve_banded_builtin(int n, int kl, int ku,
                                         std::vector<double> band,
                                         std::vector<double> rhs);

}  // namespace wg
