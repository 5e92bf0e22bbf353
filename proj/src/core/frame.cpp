#include "core/frame.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <functional>
#include <thread>

#include "core/errors.hpp"

namespace wg {

namespace {

Mat3 skew_from(double s12, double s13, double s23) {
  Mat3 S;
  S << 0, s12, s13, -s12, 0, s23, -s13, -s23, 0;
  return S;
}

}  // namespace

Mat3 rotation_exponential(double s12, double s13, double s23) {
  const Mat3 S = skew_from(s12, s13, s23);
  const double theta2 = s12 * s12 + s13 * s13 + s23 * s23;
  const double theta = std::sqrt(theta2);
  double A, B;
  if (theta < 1e-4) {
    A = 1 - theta2 / 6 + theta2 * theta2 / 120;
    B = 0.5 - theta2 / 24 + theta2 * theta2 / 720;
  } else {
    A = std::sin(theta) / theta;
    B = (1 - std::cos(theta)) / theta2;
  }
  return Mat3::Identity() + A * S + B * (S * S);
}

Mat3 ConnectionMatrices::A(int i, int j) const {
  const std::size_t k = a1.grid.idx(i, j);
  return skew_from(a1.a[k], b1.a[k], 0.0);
}

Mat3 ConnectionMatrices::B(int i, int j) const {
  const std::size_t k = a1.grid.idx(i, j);
  return skew_from(a2.a[k], 0.0, b2.a[k]);
}

ConnectionMatrices connection_matrices(const Quadruple& q, const Forms& forms,
                                       double tol) {
  q.validate();
  require_same_grid(q.grid(), forms.grid(), "connection matrices");
  const Grid& g = q.grid();
  ConnectionMatrices C{Field(g), Field(g), Field(g), Field(g), q.mask};
  for (std::size_t k = 0; k < g.n(); ++k) {
    if (!q.mask.on[k]) continue;
    const double E = forms.E.a[k], G = forms.G.a[k];
    if (!(E > tol * tol) || !(G > tol * tol))
      raise(Status::StrongRegularityViolation,
            "degenerate metric coefficient at a valid node");
    const double se = std::sqrt(E), sg = std::sqrt(G);
    C.a1.a[k] = q.g1.a[k] * se;
    C.b1.a[k] = q.nu1.a[k] * se;
    C.a2.a[k] = q.g2.a[k] * sg;
    C.b2.a[k] = q.nu2.a[k] * sg;
  }
  return C;
}

IntegrabilityResidual integrability_residual(const ConnectionMatrices& C) {
  const Grid& g = C.grid();
  Field a2u = partial_derivative(C.a2, Axis::U);
  Field b2u = partial_derivative(C.b2, Axis::U);
  Field a1v = partial_derivative(C.a1, Axis::V);
  Field b1v = partial_derivative(C.b1, Axis::V);
  Mask mu = propagate_derivative_mask(C.mask, Axis::U);
  Mask mv = propagate_derivative_mask(C.mask, Axis::V);
  IntegrabilityResidual out{Field(g), Mask(g)};
  for (std::size_t k = 0; k < g.n(); ++k) {
    out.mask.on[k] = (mu.on[k] && mv.on[k]) ? 1 : 0;
    if (!out.mask.on[k]) continue;
    // With the sparsity of A and B, B_u - A_v - [A,B] has the independent
    // entries below; the commutator contributes (-b1*b2, a1*b2, a2*b1).
    const double r12 = a2u.a[k] - a1v.a[k] + C.b1.a[k] * C.b2.a[k];
    const double r13 = -b1v.a[k] - C.a1.a[k] * C.b2.a[k];
    const double r23 = b2u.a[k] - C.a2.a[k] * C.b1.a[k];
    out.r.a[k] = std::sqrt(2 * (r12 * r12 + r13 * r13 + r23 * r23));
  }
  return out;
}

namespace {

void require_full_mask(const Mask& m) {
  for (auto b : m.on)
    if (!b)
      raise(Status::InvalidArgument,
            "masked node inside the sweep domain; crop to a full "
            "rectangle first");
}

void run_parallel(int count, const std::function<void(int, int)>& body) {
  const int threads = std::clamp(thread_cap(), 1, count);
  if (threads <= 1) {
    body(0, count);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  const int chunk = (count + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    const int lo = t * chunk;
    const int hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back(body, lo, hi);
  }
  for (auto& th : pool) th.join();
}

}  // namespace

FrameField integrate_frame(const ConnectionMatrices& C, const Mat3& initial,
                           SweepOrder order) {
  const Grid& g = C.grid();
  require_full_mask(C.mask);
  const Mat3 err = initial * initial.transpose() - Mat3::Identity();
  if (err.cwiseAbs().maxCoeff() > 1e-10)
    raise(Status::BadInitialFrame, "seed frame is not orthonormal");

  FrameField out{g, std::vector<Mat3>(g.n()), 0, 0};
  out.F[g.idx(0, 0)] = initial;

  auto step_u = [&](int i, int j) {
    const std::size_t k0 = g.idx(i, j), k1 = g.idx(i + 1, j);
    return rotation_exponential(g.du * 0.5 * (C.a1.a[k0] + C.a1.a[k1]),
                   g.du * 0.5 * (C.b1.a[k0] + C.b1.a[k1]), 0.0);
  };
  auto step_v = [&](int i, int j) {
    const std::size_t k0 = g.idx(i, j), k1 = g.idx(i, j + 1);
    return rotation_exponential(g.dv * 0.5 * (C.a2.a[k0] + C.a2.a[k1]), 0.0,
                   g.dv * 0.5 * (C.b2.a[k0] + C.b2.a[k1]));
  };

  if (order == SweepOrder::RowThenColumns) {
    for (int i = 0; i + 1 < g.nu; ++i)
      out.F[g.idx(i + 1, 0)] = step_u(i, 0) * out.F[g.idx(i, 0)];
    run_parallel(g.nu, [&](int lo, int hi) {
      for (int i = lo; i < hi; ++i)
        for (int j = 0; j + 1 < g.nv; ++j)
          out.F[g.idx(i, j + 1)] = step_v(i, j) * out.F[g.idx(i, j)];
    });
  } else {
    for (int j = 0; j + 1 < g.nv; ++j)
      out.F[g.idx(0, j + 1)] = step_v(0, j) * out.F[g.idx(0, j)];
    run_parallel(g.nv, [&](int lo, int hi) {
      for (int j = lo; j < hi; ++j)
        for (int i = 0; i + 1 < g.nu; ++i)
          out.F[g.idx(i + 1, j)] = step_u(i, j) * out.F[g.idx(i, j)];
    });
  }

  const double det0 = initial.determinant();
  for (const Mat3& F : out.F) {
    const double o = (F * F.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff();
    out.ortho_drift = std::max(out.ortho_drift, o);
    out.det_drift = std::max(out.det_drift, std::abs(F.determinant() - det0));
  }
  return out;
}

PositionField integrate_position(const FrameField& frames, const Forms& forms,
                                 const Vec3& x0, SweepOrder order) {
  const Grid& g = frames.grid;
  require_same_grid(g, forms.grid(), "position integration");

  // Tangents x_u = sqrt(E) X, x_v = sqrt(G) Y.
  std::vector<Vec3> tu(g.n()), tv(g.n());
  for (std::size_t k = 0; k < g.n(); ++k) {
    tu[k] = std::sqrt(forms.E.a[k]) * frames.F[k].row(0).transpose();
    tv[k] = std::sqrt(forms.G.a[k]) * frames.F[k].row(1).transpose();
  }

  PositionField out{g, std::vector<Vec3>(g.n(), Vec3::Zero()), 0};
  out.x[g.idx(0, 0)] = x0;
  auto panel_u = [&](int i, int j) {
    return g.du * 0.5 * (tu[g.idx(i, j)] + tu[g.idx(i + 1, j)]);
  };
  auto panel_v = [&](int i, int j) {
    return g.dv * 0.5 * (tv[g.idx(i, j)] + tv[g.idx(i, j + 1)]);
  };

  if (order == SweepOrder::RowThenColumns) {
    for (int i = 0; i + 1 < g.nu; ++i)
      out.x[g.idx(i + 1, 0)] = out.x[g.idx(i, 0)] + panel_u(i, 0);
    run_parallel(g.nu, [&](int lo, int hi) {
      for (int i = lo; i < hi; ++i)
        for (int j = 0; j + 1 < g.nv; ++j)
          out.x[g.idx(i, j + 1)] = out.x[g.idx(i, j)] + panel_v(i, j);
    });
  } else {
    for (int j = 0; j + 1 < g.nv; ++j)
      out.x[g.idx(0, j + 1)] = out.x[g.idx(0, j)] + panel_v(0, j);
    run_parallel(g.nv, [&](int lo, int hi) {
      for (int j = lo; j < hi; ++j)
        for (int i = 0; i + 1 < g.nu; ++i)
          out.x[g.idx(i + 1, j)] = out.x[g.idx(i, j)] + panel_u(i, j);
    });
  }

  // Closed-loop defect per unit cell area, max over cells.
  double defect = 0;
  for (int j = 0; j + 1 < g.nv; ++j)
    for (int i = 0; i + 1 < g.nu; ++i) {
      const Vec3 loop = panel_u(i, j) + panel_v(i + 1, j) -
                        panel_u(i, j + 1) - panel_v(i, j);
      defect = std::max(defect, loop.norm());
    }
  out.loop_defect = defect / (g.du * g.dv);
  return out;
}

ReconstructedSurface reconstruct(const Quadruple& q, const Mat3& frame0,
                                 const Vec3& x0,
                                 const ReconstructOptions& opt) {
  q.validate();
  const Grid& g = q.grid();
  Mask sr = strong_regularity_mask(q, opt.strong_reg_tol);
  const Rect rect = largest_unmasked_rect(sr);
  if (rect.empty() || rect.nu < 3 || rect.nv < 3)
    raise(Status::EmptyMesh, "no strongly regular rectangle to reconstruct");

  Quadruple qr = crop_quadruple(q, rect);
  const double tol = opt.admissibility_tol > 0
                         ? opt.admissibility_tol
                         : 10 * std::max(g.du, g.dv) * std::max(g.du, g.dv);
  AdmissibilityReport adm = bonnet_admissibility(qr, tol);
  if (!adm.pass)
    raise(Status::AdmissibilityFailure,
          "invariant data inadmissible: " + adm.failed_condition +
              " condition failed at tolerance " + std::to_string(adm.tol));

  Forms forms = forms_from_invariants(qr, opt.strong_reg_tol);
  ConnectionMatrices C = connection_matrices(qr, forms, opt.strong_reg_tol);
  IntegrabilityResidual integ = integrability_residual(C);
  FrameField frames = integrate_frame(C, frame0);
  PositionField pos = integrate_position(frames, forms, x0);

  ReconstructedSurface out{frames.grid,
                           rect,
                           std::move(frames.F),
                           std::move(pos.x),
                           std::move(forms),
                           std::move(qr),
                           ReconstructDiagnostics{}};
  out.diag.integrability_max = max_abs_masked(integ.r, integ.mask);
  out.diag.loop_defect = pos.loop_defect;
  out.diag.ortho_drift = frames.ortho_drift;
  out.diag.det_drift = frames.det_drift;
  out.diag.admissibility = adm;

  if (opt.sweep_diagnostic) {
    FrameField f2 = integrate_frame(C, frame0, SweepOrder::ColumnThenRows);
    PositionField p2 =
        integrate_position(f2, out.forms, x0, SweepOrder::ColumnThenRows);
    double d = 0;
    for (std::size_t k = 0; k < out.x.size(); ++k)
      d = std::max(d, (out.x[k] - p2.x[k]).norm());
    out.diag.sweep_difference = d;
  }
  return out;
}

RigidMotion rigid_align(std::span<const Vec3> P, std::span<const Vec3> Q) {
  if (P.size() != Q.size())
    raise(Status::InvalidArgument, "point sets differ in size");
  if (P.size() < 3)
    raise(Status::TooFewSamples, "rigid alignment needs at least 3 points");

  Vec3 pbar = Vec3::Zero(), qbar = Vec3::Zero();
  for (std::size_t k = 0; k < P.size(); ++k) {
    pbar += P[k];
    qbar += Q[k];
  }
  pbar /= double(P.size());
  qbar /= double(Q.size());

  Mat3 H = Mat3::Zero();
  for (std::size_t k = 0; k < P.size(); ++k)
    H += (P[k] - pbar) * (Q[k] - qbar).transpose();

  Eigen::JacobiSVD<Mat3> svd(H, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec3 sigma = svd.singularValues();
  if (!(sigma(0) > 0) || sigma(1) <= 1e-12 * sigma(0))
    raise(Status::DegenerateAlignment,
          "collinear configuration; rotation undetermined");
  Mat3 D = Mat3::Identity();
  D(2, 2) = (svd.matrixV() * svd.matrixU().transpose()).determinant() < 0
                ? -1.0
                : 1.0;
  RigidMotion m;
  m.R = svd.matrixV() * D * svd.matrixU().transpose();
  m.t = qbar - m.R * pbar;
  double acc = 0;
  for (std::size_t k = 0; k < P.size(); ++k)
    acc += (m.R * P[k] + m.t - Q[k]).squaredNorm();
  m.rms = std::sqrt(acc / double(P.size()));
  return m;
}

}  // namespace wg
