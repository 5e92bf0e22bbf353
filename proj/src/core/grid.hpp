#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "core/errors.hpp"

namespace wg {

// Uniform rectangular parameter grid. Node (i, j) sits at
// (u0 + i*du, v0 + j*dv), 0 <= i < nu, 0 <= j < nv; values are stored
// row-major with index j*nu + i (row j = constant v).
struct Grid {
  int nu = 0, nv = 0;
  double u0 = 0, v0 = 0, du = 0, dv = 0;

  Grid() = default;
  Grid(int nu_, int nv_, double u0_, double v0_, double du_, double dv_)
      : nu(nu_), nv(nv_), u0(u0_), v0(v0_), du(du_), dv(dv_) {
    if (nu < 2 || nv < 2)
      raise(Status::InvalidArgument, "grid needs at least 2x2 nodes");
    if (!(du > 0) || !(dv > 0))
      raise(Status::InvalidArgument, "grid spacing must be positive");
  }

  double u(int i) const { return u0 + i * du; }
  double v(int j) const { return v0 + j * dv; }
  std::size_t idx(int i, int j) const {
    return static_cast<std::size_t>(j) * nu + i;
  }
  std::size_t n() const { return static_cast<std::size_t>(nu) * nv; }
  double umax() const { return u0 + (nu - 1) * du; }
  double vmax() const { return v0 + (nv - 1) * dv; }

  bool operator==(const Grid& o) const {
    return nu == o.nu && nv == o.nv && u0 == o.u0 && v0 == o.v0 &&
           du == o.du && dv == o.dv;
  }
};

inline void require_same_grid(const Grid& a, const Grid& b,
                              const char* what) {
  if (!(a == b)) raise(Status::GridMismatch, what);
}

struct Field {
  Grid grid;
  std::vector<double> a;

  Field() = default;
  explicit Field(const Grid& g, double init = 0.0) : grid(g), a(g.n(), init) {}

  double& at(int i, int j) { return a[grid.idx(i, j)]; }
  double at(int i, int j) const { return a[grid.idx(i, j)]; }
};

// on[idx] != 0 means the node is valid (unmasked); 0 means excluded.
struct Mask {
  Grid grid;
  std::vector<std::uint8_t> on;

  Mask() = default;
  explicit Mask(const Grid& g, bool all_on = true)
      : grid(g), on(g.n(), all_on ? 1 : 0) {}

  bool at(int i, int j) const { return on[grid.idx(i, j)] != 0; }
  void set(int i, int j, bool value) { on[grid.idx(i, j)] = value ? 1 : 0; }
  std::size_t count_on() const {
    std::size_t k = 0;
    for (auto b : on) k += (b != 0);
    return k;
  }
};

enum class Axis { U, V };
enum class LapKind { Elliptic, Hyperbolic };
enum class Rule { Trapezoid, Simpson };

// Second-order finite differences: central at interior nodes, one-sided
// three-point at the boundary. Exact for polynomials of degree <= 2 along
// the axis.
Field partial_derivative(const Field& f, Axis axis);

// Second derivative along one axis: three-point stencil inside, four-point
// one-sided at the boundary (three-point when only 3 nodes exist).
Field second_derivative(const Field& f, Axis axis);

// Elliptic: f_uu + f_vv. Hyperbolic: f_uu - f_vv. Three-point second
// derivatives inside, four-point one-sided at the boundary.
Field laplacian(const Field& f, LapKind kind);

// Mask propagation: an output node is masked as soon as any node its
// stencil touches is masked. Stencils are fixed by grid position, so this
// is independent of the field values.
Mask propagate_derivative_mask(const Mask& m, Axis axis);
Mask propagate_second_derivative_mask(const Mask& m, Axis axis);
Mask propagate_laplacian_mask(const Mask& m);

// Antiderivative samples with value 0 at the first sample. Trapezoid is
// O(h^2); Simpson is O(h^4) on smooth integrands (first node via a cubic
// panel, then two-panel chains), with the final panel integrated by
// trapezoid when the panel count is odd.
std::vector<double> cumulative_integral(std::span<const double> samples,
                                        double h, Rule rule);

// Bicubic (tensor-product cubic Lagrange) interpolation, O(h^4) on smooth
// fields; falls back to bilinear within one cell of the boundary. Nodes
// outside the grid hull raise OutOfDomain.
double resample_value(const Field& f, double u, double v);
std::vector<double> resample(const Field& f,
                             std::span<const std::pair<double, double>> nodes);

// Text file formats. Fields: "FIELD v1" / header / nv rows of nu values.
// Masks: same with "MASK v1" and 0/1 entries. Values printed with %.17g.
void write_field(const Field& f, const std::string& path);
Field read_field(const std::string& path);
void write_mask(const Mask& m, const std::string& path);
Mask read_mask(const std::string& path);

struct Rect {
  int i0 = 0, j0 = 0, nu = 0, nv = 0;
  bool empty() const { return nu == 0 || nv == 0; }
};

// Largest axis-aligned all-unmasked rectangle (maximal node count).
Rect largest_unmasked_rect(const Mask& m);

// Extract the subgrid covered by rect; the origin shifts to the rect's
// lower-left node. Empty or out-of-range rects raise InvalidArgument.
Field crop_field(const Field& f, const Rect& r);
Mask crop_mask(const Mask& m, const Rect& r);

// Helpers shared across modules.
Field map_field(const Field& f, const std::function<double(double)>& op);
Field zip_fields(const Field& f, const Field& g,
                 const std::function<double(double, double)>& op);
double max_abs(const Field& f);
double max_abs_masked(const Field& f, const Mask& m);

// Thread budget: THREADS environment variable when set (>=1), else the
// hardware concurrency. Results never depend on the value.
int thread_cap();

}  // namespace wg
