#include "core/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

namespace wg {

namespace {

void require_axis_nodes(const Grid& g, Axis axis, int needed,
                        const char* what) {
  int n = (axis == Axis::U) ? g.nu : g.nv;
  if (n < needed) raise(Status::GridTooSmall, what);
}

}  // namespace

Field partial_derivative(const Field& f, Axis axis) {
  const Grid& g = f.grid;
  require_axis_nodes(g, axis, 3, "partial_derivative needs 3 nodes on axis");
  Field out(g);
  const double h = (axis == Axis::U) ? g.du : g.dv;
  const int n = (axis == Axis::U) ? g.nu : g.nv;
  const int m = (axis == Axis::U) ? g.nv : g.nu;
  auto val = [&](int k, int l) {
    return (axis == Axis::U) ? f.at(k, l) : f.at(l, k);
  };
  auto set = [&](int k, int l, double x) {
    if (axis == Axis::U)
      out.at(k, l) = x;
    else
      out.at(l, k) = x;
  };
  for (int l = 0; l < m; ++l) {
    set(0, l, (-3 * val(0, l) + 4 * val(1, l) - val(2, l)) / (2 * h));
    for (int k = 1; k < n - 1; ++k)
      set(k, l, (val(k + 1, l) - val(k - 1, l)) / (2 * h));
    set(n - 1, l,
        (3 * val(n - 1, l) - 4 * val(n - 2, l) + val(n - 3, l)) / (2 * h));
  }
  return out;
}

namespace {

// One-dimensional second derivative along an axis; 4-point one-sided at the
// ends (3-point fallback when only 3 nodes exist).
void second_derivative_axis(const Field& f, Axis axis, Field& out,
                            double sign) {
  const Grid& g = f.grid;
  const double h = (axis == Axis::U) ? g.du : g.dv;
  const double h2 = h * h;
  const int n = (axis == Axis::U) ? g.nu : g.nv;
  const int m = (axis == Axis::U) ? g.nv : g.nu;
  auto val = [&](int k, int l) {
    return (axis == Axis::U) ? f.at(k, l) : f.at(l, k);
  };
  auto add = [&](int k, int l, double x) {
    if (axis == Axis::U)
      out.at(k, l) += sign * x;
    else
      out.at(l, k) += sign * x;
  };
  for (int l = 0; l < m; ++l) {
    if (n >= 4) {
      add(0, l,
          (2 * val(0, l) - 5 * val(1, l) + 4 * val(2, l) - val(3, l)) / h2);
      add(n - 1, l,
          (2 * val(n - 1, l) - 5 * val(n - 2, l) + 4 * val(n - 3, l) -
           val(n - 4, l)) /
              h2);
    } else {
      add(0, l, (val(0, l) - 2 * val(1, l) + val(2, l)) / h2);
      add(n - 1, l, (val(n - 1, l) - 2 * val(n - 2, l) + val(n - 3, l)) / h2);
    }
    for (int k = 1; k < n - 1; ++k)
      add(k, l, (val(k + 1, l) - 2 * val(k, l) + val(k - 1, l)) / h2);
  }
}

}  // namespace

Field second_derivative(const Field& f, Axis axis) {
  require_axis_nodes(f.grid, axis, 3, "second_derivative needs 3 nodes");
  Field out(f.grid, 0.0);
  second_derivative_axis(f, axis, out, 1.0);
  return out;
}

Field laplacian(const Field& f, LapKind kind) {
  const Grid& g = f.grid;
  if (g.nu < 3 || g.nv < 3)
    raise(Status::GridTooSmall, "laplacian needs a 3x3 grid");
  Field out(g, 0.0);
  second_derivative_axis(f, Axis::U, out, 1.0);
  second_derivative_axis(f, Axis::V, out,
                         kind == LapKind::Elliptic ? 1.0 : -1.0);
  return out;
}

namespace {

Mask propagate_axis(const Mask& m, Axis axis, int boundary_width) {
  const Grid& g = m.grid;
  Mask out(g, true);
  const int n = (axis == Axis::U) ? g.nu : g.nv;
  const int mm = (axis == Axis::U) ? g.nv : g.nu;
  auto ok = [&](int k, int l) {
    return (axis == Axis::U) ? m.at(k, l) : m.at(l, k);
  };
  auto set = [&](int k, int l, bool x) {
    if (axis == Axis::U)
      out.set(k, l, x);
    else
      out.set(l, k, x);
  };
  for (int l = 0; l < mm; ++l) {
    for (int k = 0; k < n; ++k) {
      int lo, hi;
      if (k == 0) {
        lo = 0;
        hi = std::min(boundary_width - 1, n - 1);
      } else if (k == n - 1) {
        hi = n - 1;
        lo = std::max(0, n - boundary_width);
      } else {
        lo = k - 1;
        hi = k + 1;
      }
      bool all = true;
      for (int q = lo; q <= hi && all; ++q) all = ok(q, l);
      set(k, l, all);
    }
  }
  return out;
}

}  // namespace

Mask propagate_derivative_mask(const Mask& m, Axis axis) {
  return propagate_axis(m, axis, 3);
}

Mask propagate_second_derivative_mask(const Mask& m, Axis axis) {
  return propagate_axis(m, axis, 4);
}

Mask propagate_laplacian_mask(const Mask& m) {
  Mask mu = propagate_axis(m, Axis::U, 4);
  Mask mv = propagate_axis(m, Axis::V, 4);
  Mask out(m.grid, true);
  for (std::size_t k = 0; k < out.on.size(); ++k)
    out.on[k] = (mu.on[k] && mv.on[k]) ? 1 : 0;
  return out;
}

std::vector<double> cumulative_integral(std::span<const double> f, double h,
                                        Rule rule) {
  const std::size_t n = f.size();
  if (n < 2) raise(Status::TooFewSamples, "cumulative_integral needs 2 samples");
  std::vector<double> F(n, 0.0);
  if (rule == Rule::Trapezoid) {
    for (std::size_t k = 1; k < n; ++k)
      F[k] = F[k - 1] + h * 0.5 * (f[k - 1] + f[k]);
    return F;
  }
  // Simpson. First node by a cubic (or 3-point) panel so both parity chains
  // carry full order; the final panel falls back to trapezoid when the panel
  // count is odd.
  if (n == 2) {
    F[1] = h * 0.5 * (f[0] + f[1]);
    return F;
  }
  if (n >= 4)
    F[1] = h / 24.0 * (9 * f[0] + 19 * f[1] - 5 * f[2] + f[3]);
  else
    F[1] = h / 12.0 * (5 * f[0] + 8 * f[1] - f[2]);
  for (std::size_t k = 2; k < n; ++k)
    F[k] = F[k - 2] + h / 3.0 * (f[k - 2] + 4 * f[k - 1] + f[k]);
  if ((n - 1) % 2 == 1 && n > 2)
    F[n - 1] = F[n - 2] + h * 0.5 * (f[n - 2] + f[n - 1]);
  return F;
}

namespace {

double cubic_lagrange(double t, double fm1, double f0, double f1, double f2) {
  // Nodes at t = -1, 0, 1, 2.
  const double a = -t * (t - 1) * (t - 2) / 6.0;
  const double b = (t + 1) * (t - 1) * (t - 2) / 2.0;
  const double c = -(t + 1) * t * (t - 2) / 2.0;
  const double d = (t + 1) * t * (t - 1) / 6.0;
  return a * fm1 + b * f0 + c * f1 + d * f2;
}

}  // namespace

double resample_value(const Field& f, double u, double v) {
  const Grid& g = f.grid;
  const double eps_u = 1e-9 * g.du, eps_v = 1e-9 * g.dv;
  if (u < g.u0 - eps_u || u > g.umax() + eps_u || v < g.v0 - eps_v ||
      v > g.vmax() + eps_v)
    raise(Status::OutOfDomain, "resample node outside grid hull");
  u = std::clamp(u, g.u0, g.umax());
  v = std::clamp(v, g.v0, g.vmax());
  const double su = (u - g.u0) / g.du;
  const double sv = (v - g.v0) / g.dv;
  int i = std::min(static_cast<int>(std::floor(su)), g.nu - 2);
  int j = std::min(static_cast<int>(std::floor(sv)), g.nv - 2);
  const double tu = su - i, tv = sv - j;
  const bool cubic_u = (i >= 1 && i <= g.nu - 3);
  const bool cubic_v = (j >= 1 && j <= g.nv - 3);
  if (cubic_u && cubic_v) {
    double rows[4];
    for (int q = 0; q < 4; ++q) {
      const int jj = j - 1 + q;
      rows[q] = cubic_lagrange(tu, f.at(i - 1, jj), f.at(i, jj),
                               f.at(i + 1, jj), f.at(i + 2, jj));
    }
    return cubic_lagrange(tv, rows[0], rows[1], rows[2], rows[3]);
  }
  const double f00 = f.at(i, j), f10 = f.at(i + 1, j);
  const double f01 = f.at(i, j + 1), f11 = f.at(i + 1, j + 1);
  return (1 - tu) * (1 - tv) * f00 + tu * (1 - tv) * f10 +
         (1 - tu) * tv * f01 + tu * tv * f11;
}

std::vector<double> resample(
    const Field& f, std::span<const std::pair<double, double>> nodes) {
  std::vector<double> out;
  out.reserve(nodes.size());
  for (const auto& [u, v] : nodes) out.push_back(resample_value(f, u, v));
  return out;
}

namespace {

void write_grid_header(std::FILE* fp, const Grid& g) {
  std::fprintf(fp, "%d %d %.17g %.17g %.17g %.17g\n", g.nu, g.nv, g.u0, g.v0,
               g.du, g.dv);
}

Grid read_grid_header(std::istream& in, const std::string& path) {
  int nu, nv;
  double u0, v0, du, dv;
  if (!(in >> nu >> nv >> u0 >> v0 >> du >> dv))
    raise(Status::Io, "bad grid header in " + path);
  return Grid(nu, nv, u0, v0, du, dv);
}

}  // namespace

void write_field(const Field& f, const std::string& path) {
  std::FILE* fp = std::fopen(path.c_str(), "w");
  if (!fp) raise(Status::Io, "cannot open " + path + " for writing");
  std::fprintf(fp, "FIELD v1\n");
  write_grid_header(fp, f.grid);
  for (int j = 0; j < f.grid.nv; ++j) {
    for (int i = 0; i < f.grid.nu; ++i)
      std::fprintf(fp, i ? " %.17g" : "%.17g", f.at(i, j));
    std::fprintf(fp, "\n");
  }
  std::fclose(fp);
}

Field read_field(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(Status::Io, "cannot open " + path);
  std::string magic, version;
  in >> magic >> version;
  if (magic != "FIELD" || version != "v1")
    raise(Status::Io, "not a FIELD v1 file: " + path);
  Field f(read_grid_header(in, path));
  for (std::size_t k = 0; k < f.grid.n(); ++k)
    if (!(in >> f.a[k])) raise(Status::Io, "truncated field data in " + path);
  return f;
}

void write_mask(const Mask& m, const std::string& path) {
  std::FILE* fp = std::fopen(path.c_str(), "w");
  if (!fp) raise(Status::Io, "cannot open " + path + " for writing");
  std::fprintf(fp, "MASK v1\n");
  write_grid_header(fp, m.grid);
  for (int j = 0; j < m.grid.nv; ++j) {
    for (int i = 0; i < m.grid.nu; ++i)
      std::fprintf(fp, i ? " %d" : "%d", m.at(i, j) ? 1 : 0);
    std::fprintf(fp, "\n");
  }
  std::fclose(fp);
}

Mask read_mask(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(Status::Io, "cannot open " + path);
  std::string magic, version;
  in >> magic >> version;
  if (magic != "MASK" || version != "v1")
    raise(Status::Io, "not a MASK v1 file: " + path);
  Mask m(read_grid_header(in, path));
  for (std::size_t k = 0; k < m.grid.n(); ++k) {
    int b;
    if (!(in >> b)) raise(Status::Io, "truncated mask data in " + path);
    m.on[k] = b ? 1 : 0;
  }
  return m;
}

Rect largest_unmasked_rect(const Mask& m) {
  // Histogram-stack maximal rectangle, maximizing node count.
  const Grid& g = m.grid;
  std::vector<int> height(g.nu, 0);
  Rect best;
  long best_area = 0;
  for (int j = 0; j < g.nv; ++j) {
    for (int i = 0; i < g.nu; ++i)
      height[i] = m.at(i, j) ? height[i] + 1 : 0;
    std::vector<std::pair<int, int>> stack;  // (start index, bar height)
    for (int i = 0; i <= g.nu; ++i) {
      const int h = (i < g.nu) ? height[i] : 0;
      int start = i;
      while (!stack.empty() && stack.back().second >= h) {
        const auto [s, hh] = stack.back();
        stack.pop_back();
        const long area = static_cast<long>(hh) * (i - s);
        if (area > best_area) {
          best_area = area;
          best = Rect{s, j - hh + 1, i - s, hh};
        }
        start = s;
      }
      if (h > 0) stack.emplace_back(start, h);
    }
  }
  return best;
}

namespace {

Grid crop_grid(const Grid& g, const Rect& r) {
  if (r.empty() || r.i0 < 0 || r.j0 < 0 || r.i0 + r.nu > g.nu ||
      r.j0 + r.nv > g.nv)
    raise(Status::InvalidArgument, "crop rect outside grid");
  return Grid(r.nu, r.nv, g.u(r.i0), g.v(r.j0), g.du, g.dv);
}

}  // namespace

Field crop_field(const Field& f, const Rect& r) {
  Field out(crop_grid(f.grid, r));
  for (int j = 0; j < r.nv; ++j)
    for (int i = 0; i < r.nu; ++i)
      out.at(i, j) = f.at(r.i0 + i, r.j0 + j);
  return out;
}

Mask crop_mask(const Mask& m, const Rect& r) {
  Mask out(crop_grid(m.grid, r));
  for (int j = 0; j < r.nv; ++j)
    for (int i = 0; i < r.nu; ++i)
      out.set(i, j, m.at(r.i0 + i, r.j0 + j));
  return out;
}

Field map_field(const Field& f, const std::function<double(double)>& op) {
  Field out(f.grid);
  for (std::size_t k = 0; k < f.a.size(); ++k) out.a[k] = op(f.a[k]);
  return out;
}

Field zip_fields(const Field& f, const Field& g,
                 const std::function<double(double, double)>& op) {
  require_same_grid(f.grid, g.grid, "zip_fields");
  Field out(f.grid);
  for (std::size_t k = 0; k < f.a.size(); ++k) out.a[k] = op(f.a[k], g.a[k]);
  return out;
}

double max_abs(const Field& f) {
  double m = 0;
  for (double x : f.a) m = std::max(m, std::abs(x));
  return m;
}

double max_abs_masked(const Field& f, const Mask& m) {
  require_same_grid(f.grid, m.grid, "max_abs_masked");
  double r = 0;
  for (std::size_t k = 0; k < f.a.size(); ++k)
    if (m.on[k]) r = std::max(r, std::abs(f.a[k]));
  return r;
}

int thread_cap() {
  if (const char* env = std::getenv("THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

}  // namespace wg
