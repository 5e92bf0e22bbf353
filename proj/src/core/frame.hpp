#pragma once

#include <span>
#include <vector>

#include "core/grid.hpp"
#include "core/invariants.hpp"
#include "core/vec.hpp"

namespace wg {

// Closed-form exponential of the skew matrix
//   [[0, s12, s13], [-s12, 0, s23], [-s13, -s23, 0]]
// — an exact rotation for any input, with a series near zero angle.
Mat3 rotation_exponential(double s12, double s13, double s23);

// Connection coefficients of the moving-frame system F_u = A(u,v) F,
// F_v = B(u,v) F, where the rows of F are (X, Y, l):
//   A = [[0, a1, b1], [-a1, 0, 0], [-b1, 0, 0]],
//   B = [[0, a2, 0], [-a2, 0, b2], [0, -b2, 0]],
// with a1 = gamma1 sqrt(E), b1 = nu1 sqrt(E), a2 = gamma2 sqrt(G),
// b2 = nu2 sqrt(G); both matrices are skew by construction.
struct ConnectionMatrices {
  Field a1, b1, a2, b2;
  Mask mask;

  const Grid& grid() const { return a1.grid; }
  Mat3 A(int i, int j) const;
  Mat3 B(int i, int j) const;
};

ConnectionMatrices connection_matrices(const Quadruple& q, const Forms& forms,
                                       double tol = 1e-9);

struct IntegrabilityResidual {
  Field r;  // Frobenius norm of B_u - A_v - (AB - BA) per node
  Mask mask;
};

IntegrabilityResidual integrability_residual(const ConnectionMatrices& C);

enum class SweepOrder { RowThenColumns, ColumnThenRows };

struct FrameField {
  Grid grid;
  std::vector<Mat3> F;     // rows (X, Y, l) per node
  double ortho_drift = 0;  // max over nodes of |F F^T - I|_max
  double det_drift = 0;    // max over nodes of |det F - det F(0,0)|
};

// Integrates the frame system from the frame at the grid's lower-left node:
// first along one boundary line, then along every transversal line (the
// transversal lines are independent and integrated concurrently). Each step
// applies the closed-form rotation exp(h*S) with S the average of the skew
// matrices at the step's endpoints, so frames stay exactly orthogonal.
// A non-orthonormal seed (beyond 1e-10) raises BadInitialFrame; masked nodes
// inside the domain raise InvalidArgument (crop to a full rectangle first).
FrameField integrate_frame(const ConnectionMatrices& C, const Mat3& initial,
                           SweepOrder order = SweepOrder::RowThenColumns);

struct PositionField {
  Grid grid;
  std::vector<Vec3> x;
  double loop_defect = 0;  // max |closed-loop integral| / (du*dv) over cells
};

// Integrates x_u = sqrt(E) X, x_v = sqrt(G) Y along the same sweep with
// per-panel trapezoid steps; the loop defect diagnoses path independence.
PositionField integrate_position(const FrameField& frames, const Forms& forms,
                                 const Vec3& x0,
                                 SweepOrder order = SweepOrder::RowThenColumns);

struct ReconstructDiagnostics {
  double integrability_max = 0;
  double loop_defect = 0;
  double ortho_drift = 0;
  double det_drift = 0;
  double sweep_difference = 0;  // max |x(row-first) - x(column-first)|
  AdmissibilityReport admissibility;
};

struct ReconstructedSurface {
  Grid grid;   // subgrid actually reconstructed
  Rect rect;   // its location inside the input grid
  std::vector<Mat3> frames;
  std::vector<Vec3> x;
  Forms forms;
  Quadruple quad;  // the cropped input data the surface was built from
  ReconstructDiagnostics diag;
};

struct ReconstructOptions {
  double admissibility_tol = -1;  // <= 0 means 10*max(du,dv)^2
  double strong_reg_tol = 1e-9;
  bool sweep_diagnostic = true;
};

// Full pipeline: strong-regularity mask -> largest unmasked rectangle ->
// admissibility gate -> forms -> connection matrices -> frame sweep ->
// position sweep. Inadmissible data raises AdmissibilityFailure naming the
// failed condition; an empty regular set raises EmptyMesh.
ReconstructedSurface reconstruct(const Quadruple& q,
                                 const Mat3& frame0 = Mat3::Identity(),
                                 const Vec3& x0 = Vec3::Zero(),
                                 const ReconstructOptions& opt = {});

struct RigidMotion {
  Mat3 R;
  Vec3 t;
  double rms = 0;
};

// Least-squares proper rigid motion q ~ R p + t (Kabsch, reflection
// excluded). Collinear configurations raise DegenerateAlignment; fewer than
// 3 points raise TooFewSamples; size mismatch raises InvalidArgument.
RigidMotion rigid_align(std::span<const Vec3> P, std::span<const Vec3> Q);

}  // namespace wg
