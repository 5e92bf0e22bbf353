#include "core/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "core/errors.hpp"
#include "core/frame.hpp"
#include "core/gamma.hpp"
#include "core/grid.hpp"
#include "core/pde.hpp"
#include "core/reparam.hpp"
#include "core/report.hpp"

namespace wg {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// OBJ export / import
// ---------------------------------------------------------------------------

void export_obj(const SurfaceSamples& s, const std::string& path) {
  const Grid& g = s.grid;
  if (s.x.size() != g.n())
    raise(Status::InvalidArgument, "position count does not match the grid");
  const bool with_normals = !s.normal.empty();
  if (with_normals && s.normal.size() != g.n())
    raise(Status::InvalidArgument, "normal count does not match the grid");

  std::vector<int> vid(g.n(), 0);
  int count = 0;
  for (std::size_t k = 0; k < g.n(); ++k)
    if (s.mask.on[k]) vid[k] = ++count;
  if (count == 0) raise(Status::EmptyMesh, "every node is masked");

  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) raise(Status::Io, "cannot open OBJ file for writing: " + path);
  std::fprintf(f, "# grid %d %d %.17g %.17g %.17g %.17g\n", g.nu, g.nv, g.u0,
               g.v0, g.du, g.dv);
  for (int j = 0; j < g.nv; ++j) {
    for (int i = 0; i < g.nu; ++i) {
      const std::size_t k = g.idx(i, j);
      if (!s.mask.on[k]) continue;
      std::fprintf(f, "v %.17g %.17g %.17g\n", s.x[k][0], s.x[k][1],
                   s.x[k][2]);
      if (with_normals)
        std::fprintf(f, "vn %.17g %.17g %.17g\n", s.normal[k][0],
                     s.normal[k][1], s.normal[k][2]);
    }
  }
  for (int j = 0; j + 1 < g.nv; ++j) {
    for (int i = 0; i + 1 < g.nu; ++i) {
      const int a = vid[g.idx(i, j)], b = vid[g.idx(i + 1, j)];
      const int c = vid[g.idx(i + 1, j + 1)], d = vid[g.idx(i, j + 1)];
      if (!a || !b || !c || !d) continue;
      if (with_normals) {
        std::fprintf(f, "f %d//%d %d//%d %d//%d\n", a, a, b, b, c, c);
        std::fprintf(f, "f %d//%d %d//%d %d//%d\n", a, a, c, c, d, d);
      } else {
        std::fprintf(f, "f %d %d %d\n", a, b, c);
        std::fprintf(f, "f %d %d %d\n", a, c, d);
      }
    }
  }
  if (std::fclose(f) != 0) raise(Status::Io, "failed writing OBJ: " + path);
}

SurfaceSamples import_obj(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(Status::Io, "cannot open OBJ file: " + path);

  bool have_grid = false;
  int nu = 0, nv = 0;
  double u0 = 0, v0 = 0, du = 0, dv = 0;
  std::vector<Vec3> x, n;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;
    if (tag == "#") {
      std::string word;
      if (ls >> word && word == "grid") {
        if (!(ls >> nu >> nv >> u0 >> v0 >> du >> dv))
          raise(Status::Io, "malformed grid comment in " + path);
        have_grid = true;
      }
    } else if (tag == "v") {
      Vec3 p;
      if (!(ls >> p[0] >> p[1] >> p[2]))
        raise(Status::Io, "malformed vertex line in " + path);
      x.push_back(p);
    } else if (tag == "vn") {
      Vec3 p;
      if (!(ls >> p[0] >> p[1] >> p[2]))
        raise(Status::Io, "malformed normal line in " + path);
      n.push_back(p);
    }
    // faces and other records are implied by the grid
  }
  if (!have_grid)
    raise(Status::InvalidArgument,
          "OBJ has no `# grid` comment; only grid exports are importable: " +
              path);
  const Grid g(nu, nv, u0, v0, du, dv);
  if (x.size() != g.n())
    raise(Status::InvalidArgument,
          "OBJ does not cover the full grid (" + std::to_string(x.size()) +
              " vertices for " + std::to_string(g.n()) +
              " nodes); partial meshes are not importable: " + path);
  if (!n.empty() && n.size() != g.n())
    raise(Status::InvalidArgument, "OBJ normal count does not match: " + path);
  return SurfaceSamples{g, std::move(x), std::move(n), Mask(g)};
}

// ---------------------------------------------------------------------------
// Quadruple files
// ---------------------------------------------------------------------------

void write_quadruple(const Quadruple& q, const std::string& base_path) {
  q.validate();
  write_field(q.nu1, base_path + ".nu1");
  write_field(q.nu2, base_path + ".nu2");
  write_field(q.g1, base_path + ".g1");
  write_field(q.g2, base_path + ".g2");
  write_mask(q.mask, base_path + ".mask");
}

Quadruple read_quadruple(const std::string& base_path) {
  Quadruple q{read_field(base_path + ".nu1"),
              read_field(base_path + ".nu2"),
              read_field(base_path + ".g1"),
              read_field(base_path + ".g2"),
              read_mask(base_path + ".mask"),
              {},
              {},
              {},
              {}};
  q.validate();
  return q;
}

// ---------------------------------------------------------------------------
// Path resolution
// ---------------------------------------------------------------------------

namespace {

std::string resolve_with_probe(const std::string& cfg_dir,
                               const std::string& out_dir,
                               const std::string& path,
                               const std::string& probe_suffix) {
  const fs::path p(path);
  if (p.is_absolute()) return path;
  const fs::path candidates[] = {fs::path(out_dir) / p, fs::path(cfg_dir) / p,
                                 p};
  for (const auto& c : candidates) {
    std::error_code ec;
    if (fs::exists(fs::path(c.string() + probe_suffix), ec))
      return c.string();
  }
  return path;
}

}  // namespace

std::string resolve_input(const std::string& cfg_dir,
                          const std::string& out_dir,
                          const std::string& path) {
  return resolve_with_probe(cfg_dir, out_dir, path, "");
}

// ---------------------------------------------------------------------------
// Shared helpers
// ---------------------------------------------------------------------------

namespace {

std::string join_out(const std::string& out_dir, const std::string& name) {
  return (fs::path(out_dir) / name).string();
}

void echo_grid(Report& rep, const Grid& g) {
  rep.value_int("grid.nu", g.nu);
  rep.value_int("grid.nv", g.nv);
  rep.value("grid.u0", g.u0);
  rep.value("grid.v0", g.v0);
  rep.value("grid.du", g.du);
  rep.value("grid.dv", g.dv);
}

// Build the Weingarten pair named by [pair] keys; nu0 defaults to the value
// of nu at the base node. With both pair.a and pair.b given the scale
// constants are free (any branch); otherwise the canonical scaling applies.
WeingartenPair pair_from_config(const Config& cfg, double nu0_default) {
  const std::string type = cfg.get_string("pair.type");
  const double nu0 = cfg.get_double("pair.nu0", nu0_default);
  const bool has_a = cfg.has("pair.a"), has_b = cfg.has("pair.b");
  if (has_a != has_b)
    raise(Status::InvalidArgument,
          "give both pair.a and pair.b or neither (canonical scaling)");
  if (type == "cmc") {
    const double H = cfg.get_double("pair.H");
    return has_a ? make_cmc_pair_scaled(H, nu0, cfg.get_double("pair.a"),
                                        cfg.get_double("pair.b"))
                 : make_cmc_pair(H, nu0);
  }
  if (type == "constK") {
    const double K = cfg.get_double("pair.K");
    return has_a ? make_constK_pair_scaled(K, nu0, cfg.get_double("pair.a"),
                                           cfg.get_double("pair.b"))
                 : make_constK_pair(K, nu0);
  }
  raise(Status::InvalidArgument,
        "pair.type must be cmc or constK, got '" + type + "'");
}

void report_criterion(Report& rep, const std::string& prefix,
                      const CriterionReport& cr) {
  rep.value(prefix + ".constant", cr.constant);
  rep.value(prefix + ".max", cr.max);
  rep.value(prefix + ".min", cr.min);
  rep.value(prefix + ".spread", cr.max - cr.min);
  rep.value_bool(prefix + ".is_constant", cr.is_constant);
}

// ---------------------------------------------------------------------------
// fixture
// ---------------------------------------------------------------------------

constexpr std::string_view kFixtureKeys[] = {
    "command",  "fixture.name", "grid.nu", "grid.nv",
    "grid.u0",  "grid.u1",      "grid.v0", "grid.v1",
};

void cmd_fixture(const Config& cfg, const std::string&,
                 const std::string& out_dir, Report& rep) {
  cfg.require_known(kFixtureKeys);
  const std::string name = cfg.get_string("fixture.name");
  rep.value_text("fixture", name);

  if (name == "liouville_star") {
    const int nu = cfg.get_int("grid.nu", 81);
    const int nv = cfg.get_int("grid.nv", 81);
    const double u0 = cfg.get_double("grid.u0", 0.5);
    const double u1 = cfg.get_double("grid.u1", 1.5);
    const double v0 = cfg.get_double("grid.v0", 0.5);
    const double v1 = cfg.get_double("grid.v1", 1.5);
    const Grid g(nu, nv, u0, v0, (u1 - u0) / (nu - 1), (v1 - v0) / (nv - 1));
    echo_grid(rep, g);
    Field f = sample_scalar(
        [](double u, double v) { return liouville_star(u, v); }, g);
    const std::string file = "liouville_star.field";
    write_field(f, join_out(out_dir, file));
    rep.file(file);
    return;
  }

  if (name == "kuen_sine_strip") {
    // Two-row strip for the hyperbolic march: row 0 carries lambda on the
    // line v = v0, row 1 its v-derivative, with lambda = 2 arctan(nu1) on
    // the canonical chart.
    const AnalyticSurface& s = analytic_surface("kuen_canonical");
    const int nu = cfg.get_int("grid.nu", 161);
    const double u0 = cfg.get_double("grid.u0", 2.6);
    const double u1 = cfg.get_double("grid.u1", 3.4);
    const double v0 = cfg.get_double("grid.v0", 0.7);
    const double du = (u1 - u0) / (nu - 1);
    const Grid g(nu, 2, u0, v0, du, du);
    echo_grid(rep, g);
    Field strip(g);
    for (int i = 0; i < nu; ++i) {
      const double u = g.u(i);
      const double n1 = s.nu1(u, v0);
      strip.a[g.idx(i, 0)] = 2 * std::atan(n1);
      strip.a[g.idx(i, 1)] = 2 * s.nu1_v(u, v0) / (1 + n1 * n1);
    }
    const std::string file = "kuen_sine_strip.field";
    write_field(strip, join_out(out_dir, file));
    rep.file(file);
    return;
  }

  const AnalyticSurface& s = analytic_surface(name);
  const int nu = cfg.get_int("grid.nu", 101);
  const int nv = cfg.get_int("grid.nv", 101);
  const double u0 = cfg.get_double("grid.u0", s.u0);
  const double u1 = cfg.get_double("grid.u1", s.u1);
  const double v0 = cfg.get_double("grid.v0", s.v0);
  const double v1 = cfg.get_double("grid.v1", s.v1);
  const Grid g(nu, nv, u0, v0, (u1 - u0) / (nu - 1), (v1 - v0) / (nv - 1));
  echo_grid(rep, g);

  const SurfaceSamples samples = sample_positions(s, g);
  export_obj(samples, join_out(out_dir, name + ".obj"));
  rep.file(name + ".obj");
  rep.value_int("masked_nodes",
                static_cast<std::int64_t>(g.n() - samples.mask.count_on()));

  const Quadruple q = sample_quadruple(s, g);
  write_quadruple(q, join_out(out_dir, name));
  for (const char* suffix : {".nu1", ".nu2", ".g1", ".g2", ".mask"})
    rep.file(name + suffix);

  const std::pair<const char*, const ScalarFn*> coeffs[] = {
      {".E", &s.E}, {".G", &s.G}, {".L", &s.L}, {".N", &s.N}};
  for (const auto& [suffix, fn] : coeffs) {
    if (!*fn) continue;
    write_field(sample_scalar(*fn, g), join_out(out_dir, name + suffix));
    rep.file(name + suffix);
  }
}

// ---------------------------------------------------------------------------
// analyze
// ---------------------------------------------------------------------------

constexpr std::string_view kAnalyzeKeys[] = {
    "command",      "input.obj",        "input.quad",
    "mesh.tol",     "probe.tol",        "probe.diagnose_tol",
    "expect.relation", "expect.value",  "expect.value_tol",
    "expect.rejected",
};

void cmd_analyze(const Config& cfg, const std::string& cfg_dir,
                 const std::string& out_dir, Report& rep) {
  cfg.require_known(kAnalyzeKeys);
  const bool from_obj = cfg.has("input.obj");
  const bool from_quad = cfg.has("input.quad");
  if (from_obj == from_quad)
    raise(Status::InvalidArgument,
          "analyze needs exactly one of input.obj and input.quad");

  Quadruple q;
  // Analytic quadruples satisfy identities exactly; mesh-derived ones only
  // to discretization error, so the default diagnosis tolerance differs.
  double diagnose_tol = from_quad ? 1e-12 : 1e-3;
  if (from_obj) {
    const std::string path =
        resolve_input(cfg_dir, out_dir, cfg.get_string("input.obj"));
    const SurfaceSamples s = import_obj(path);
    echo_grid(rep, s.grid);
    const MeshFormsResult mf = mesh_forms(s, cfg.get_double("mesh.tol", 1e-12));
    rep.value("max_F", mf.max_F);
    rep.value("max_M", mf.max_M);
    rep.value("min_cross", mf.min_cross);
    rep.value_bool("normal_flipped", mf.normal_flipped);
    q = mf.quad;
  } else {
    const std::string base = resolve_with_probe(
        cfg_dir, out_dir, cfg.get_string("input.quad"), ".nu1");
    q = read_quadruple(base);
    echo_grid(rep, q.grid());
  }
  diagnose_tol = cfg.get_double("probe.diagnose_tol", diagnose_tol);

  bool rejected = false;
  ProbeReport pr;
  try {
    pr = weingarten_relation_probe(q, cfg.get_double("probe.tol", 1e-6));
  } catch (const Error& e) {
    if (e.code() != Status::TooFewSamples) throw;
    rejected = true;
    rep.value_text("reject_reason", e.what());
  }
  rep.value_bool("rejected", rejected);

  if (!rejected) {
    rep.value_text("relation", pr.relation);
    rep.value("value", pr.value);
    rep.value("scatter", pr.scatter);
    rep.value_int("samples", static_cast<std::int64_t>(pr.samples));
    rep.value("scatter_K", pr.scatter_K);
    rep.value("scatter_H", pr.scatter_H);
    rep.value("scatter_spline", pr.scatter_spline);
  }

  const std::vector<std::string> violations =
      diagnose_violations(q, diagnose_tol);
  std::string joined;
  for (const auto& v : violations) {
    if (!joined.empty()) joined += ",";
    joined += v;
  }
  rep.value_text("violations", joined);

  if (cfg.has("expect.rejected")) {
    const bool want = cfg.get_bool("expect.rejected");
    rep.verdict("rejected-as-expected", rejected == want, rejected ? 1 : 0, 0);
  }
  if (cfg.has("expect.relation")) {
    const std::string want = cfg.get_string("expect.relation");
    const bool match = !rejected && pr.relation == want;
    rep.verdict("relation-matches", match, match ? 1 : 0, 0);
  }
  if (cfg.has("expect.value")) {
    const double want = cfg.get_double("expect.value");
    const double tol = cfg.get_double("expect.value_tol", 1e-6);
    const double err = rejected ? std::numeric_limits<double>::infinity()
                                : std::abs(pr.value - want);
    rep.verdict("value-matches", err <= tol, err, tol);
  }
}

// ---------------------------------------------------------------------------
// solve-pde
// ---------------------------------------------------------------------------

constexpr std::string_view kSolvePdeKeys[] = {
    "command",         "case",          "boundary.file", "pde.H",
    "newton.tol",      "newton.max_iter", "convergence.table",
    "march.span",      "march.cfl",
};

// Restriction of a field to every `step`-th node per axis.
Field restrict_field(const Field& f, int step) {
  const Grid& g = f.grid;
  const int nu = (g.nu - 1) / step + 1, nv = (g.nv - 1) / step + 1;
  Field out(Grid(nu, nv, g.u0, g.v0, g.du * step, g.dv * step));
  for (int j = 0; j < nv; ++j)
    for (int i = 0; i < nu; ++i)
      out.a[out.grid.idx(i, j)] = f.a[g.idx(i * step, j * step)];
  return out;
}

// Max difference on the common interior nodes of the coarser grid.
double common_interior_diff(const Field& coarse, const Field& fine) {
  const int step = (fine.grid.nu - 1) / (coarse.grid.nu - 1);
  double m = 0;
  for (int j = 1; j + 1 < coarse.grid.nv; ++j)
    for (int i = 1; i + 1 < coarse.grid.nu; ++i)
      m = std::max(m, std::abs(coarse.a[coarse.grid.idx(i, j)] -
                               fine.a[fine.grid.idx(i * step, j * step)]));
  return m;
}

void cmd_solve_pde(const Config& cfg, const std::string& cfg_dir,
                   const std::string& out_dir, Report& rep) {
  cfg.require_known(kSolvePdeKeys);
  const std::string what = cfg.get_string("case");
  rep.value_text("case", what);
  const std::string boundary_path =
      resolve_input(cfg_dir, out_dir, cfg.get_string("boundary.file"));

  if (what == "sine-gordon") {
    const Field strip = read_field(boundary_path);
    const Grid& sg = strip.grid;
    if (sg.nv < 2)
      raise(Status::InvalidArgument,
            "sine-gordon boundary file needs two rows (lambda, lambda_v)");
    const double span = cfg.get_double("march.span");
    const double cfl = cfg.get_double("march.cfl", 1.0);
    if (!(span > 0) || !(cfl > 0))
      raise(Status::InvalidArgument, "march.span and march.cfl must be > 0");
    const double dv = cfl * sg.du;
    const int nv = std::max(2, static_cast<int>(std::lround(span / dv)) + 1);
    const Grid g(sg.nu, nv, sg.u0, sg.v0, sg.du, dv);
    echo_grid(rep, g);

    HyperbolicInitial init;
    init.lambda.assign(sg.nu, 0.0);
    init.lambda_v.assign(sg.nu, 0.0);
    for (int i = 0; i < sg.nu; ++i) {
      init.lambda[i] = strip.a[sg.idx(i, 0)];
      init.lambda_v[i] = strip.a[sg.idx(i, 1)];
    }
    const HyperbolicSolution sol = solve_hyperbolic_sine_gordon(g, init);
    write_field(sol.lambda, join_out(out_dir, "lambda.field"));
    write_mask(sol.cone, join_out(out_dir, "cone.mask"));
    write_mask(sol.branch, join_out(out_dir, "branch.mask"));
    rep.file("lambda.field");
    rep.file("cone.mask");
    rep.file("branch.mask");
    rep.value("max_abs", sol.max_abs);
    rep.value_int("cone_nodes", static_cast<std::int64_t>(sol.cone.count_on()));
    rep.value_int("branch_nodes",
                  static_cast<std::int64_t>(sol.branch.count_on()));
    return;
  }

  EllipticKind kind;
  if (what == "liouville")
    kind = EllipticKind::Liouville;
  else if (what == "sinh-gordon")
    kind = EllipticKind::SinhGordon;
  else if (what == "sinh-gordon-k1")
    kind = EllipticKind::SinhGordonK1;
  else
    raise(Status::InvalidArgument,
          "case must be liouville, sinh-gordon, sinh-gordon-k1 or "
          "sine-gordon, got '" +
              what + "'");

  EllipticOptions opt;
  opt.H = cfg.get_double("pde.H", 0.5);
  opt.residual_tol = cfg.get_double("newton.tol", 1e-10);
  opt.update_tol = std::min(1e-11, opt.residual_tol / 10);
  opt.max_iter = cfg.get_int("newton.max_iter", 500);

  const Field boundary = read_field(boundary_path);
  const Grid& g = boundary.grid;
  echo_grid(rep, g);

  const EllipticSolution sol = solve_elliptic(kind, boundary, opt);
  write_field(sol.lambda, join_out(out_dir, "lambda.field"));
  rep.file("lambda.field");
  rep.value("residual", sol.residual);
  rep.value_int("iterations", sol.iterations);
  if (kind == EllipticKind::SinhGordonK1) {
    write_mask(sol.branch, join_out(out_dir, "branch.mask"));
    rep.file("branch.mask");
  }

  // Self-convergence: re-solve on 4x and 2x coarsenings of the boundary
  // data and difference consecutive levels on shared interior nodes.
  const bool divisible = (g.nu - 1) % 4 == 0 && (g.nv - 1) % 4 == 0 &&
                         g.nu >= 9 && g.nv >= 9;
  if (cfg.get_bool("convergence.table", divisible)) {
    if (!divisible)
      raise(Status::InvalidArgument,
            "convergence.table needs node counts 4k+1 with at least 9 nodes "
            "per axis");
    const EllipticSolution s0 =
        solve_elliptic(kind, restrict_field(boundary, 4), opt);
    const EllipticSolution s1 =
        solve_elliptic(kind, restrict_field(boundary, 2), opt);
    const double e01 = common_interior_diff(s0.lambda, s1.lambda);
    const double e12 = common_interior_diff(s1.lambda, sol.lambda);
    std::vector<double> hs = {4 * g.du, 2 * g.du};
    std::vector<double> errs = {e01, e12};
    std::vector<double> orders;
    if (e01 > 0 && e12 > 0) orders.push_back(std::log2(e01 / e12));
    rep.table("self-convergence", hs, errs, orders);
    if (e01 > 1e-13 && e12 > 1e-13 && !orders.empty()) {
      const double order = orders[0];
      rep.verdict("self-convergence-order", order >= 1.8 && order <= 2.2,
                  order, 2.0);
    } else {
      rep.value_text("self-convergence-note",
                     "level differences at rounding floor; order not "
                     "measurable");
    }
  }
}

// ---------------------------------------------------------------------------
// reparam
// ---------------------------------------------------------------------------

constexpr std::string_view kReparamKeys[] = {
    "command",   "input.E",   "input.G",    "input.nu", "input.quad",
    "pair.type", "pair.K",    "pair.H",     "pair.nu0", "pair.a",
    "pair.b",    "base.i",    "base.j",     "criterion.tol",
    "offset.ubar0", "offset.vbar0",
};

void cmd_reparam(const Config& cfg, const std::string& cfg_dir,
                 const std::string& out_dir, Report& rep) {
  cfg.require_known(kReparamKeys);
  const Field E =
      read_field(resolve_input(cfg_dir, out_dir, cfg.get_string("input.E")));
  const Field G =
      read_field(resolve_input(cfg_dir, out_dir, cfg.get_string("input.G")));
  const Field nu =
      read_field(resolve_input(cfg_dir, out_dir, cfg.get_string("input.nu")));
  const Grid& g = nu.grid;
  require_same_grid(g, E.grid, "reparam inputs");
  require_same_grid(g, G.grid, "reparam inputs");
  echo_grid(rep, g);

  const int base_i = cfg.get_int("base.i", g.nu / 2);
  const int base_j = cfg.get_int("base.j", g.nv / 2);
  if (base_i < 0 || base_i >= g.nu || base_j < 0 || base_j >= g.nv)
    raise(Status::InvalidArgument, "base node outside the grid");
  const WeingartenPair pair =
      pair_from_config(cfg, nu.a[g.idx(base_i, base_j)]);
  rep.value("pair.nu0", pair.nu0);
  rep.value("pair.a", pair.a);
  rep.value("pair.b", pair.b);

  Forms forms{E, Field(g), G, Field(g), Field(g), Field(g)};
  for (std::size_t k = 0; k < g.n(); ++k) {
    forms.L.a[k] = pair.f(nu.a[k]) * E.a[k];
    forms.N.a[k] = pair.g(nu.a[k]) * G.a[k];
  }

  Quadruple q;
  if (cfg.has("input.quad")) {
    q = read_quadruple(resolve_with_probe(cfg_dir, out_dir,
                                          cfg.get_string("input.quad"),
                                          ".nu1"));
    require_same_grid(g, q.grid(), "reparam inputs");
  } else {
    q = invariants_from_nu(nu, pair);
  }

  const double ctol = cfg.get_double("criterion.tol", 1e-8);
  const LambdaMu sep = lambda_mu_functions(forms, pair, nu);
  rep.value("separability.lambda_dev", sep.lambda_dev);
  rep.value("separability.mu_dev", sep.mu_dev);
  report_criterion(rep, "criterion_before", geometric_criterion(forms, q, ctol));

  const ReparamResult res = geometric_reparam(
      forms, pair, nu, pair.a, pair.b, base_i, base_j,
      cfg.has("input.quad") ? &q : nullptr,
      cfg.get_double("offset.ubar0", 0.0), cfg.get_double("offset.vbar0", 0.0));

  write_reparam_map(res.map, join_out(out_dir, "map"));
  rep.file("map");
  rep.file("map.ubar");
  rep.file("map.vbar");
  write_field(res.nu, join_out(out_dir, "nu_bar.field"));
  rep.file("nu_bar.field");
  const std::pair<const char*, const Field*> outs[] = {
      {"E_bar.field", &res.forms.E},
      {"G_bar.field", &res.forms.G},
      {"L_bar.field", &res.forms.L},
      {"N_bar.field", &res.forms.N}};
  for (const auto& [fname, fld] : outs) {
    write_field(*fld, join_out(out_dir, fname));
    rep.file(fname);
  }
  write_quadruple(res.quad, join_out(out_dir, "quad_bar"));
  for (const char* suffix : {".nu1", ".nu2", ".g1", ".g2", ".mask"})
    rep.file(std::string("quad_bar") + suffix);

  rep.value_bool("u_monotone", res.map.u_monotone);
  rep.value_bool("v_monotone", res.map.v_monotone);
  const CriterionReport after = geometric_criterion(res.forms, res.quad, ctol);
  report_criterion(rep, "criterion_after", after);
  rep.verdict("criterion-constant-after", after.is_constant,
              after.max - after.min, ctol * std::abs(after.mean));
}

// ---------------------------------------------------------------------------
// reconstruct
// ---------------------------------------------------------------------------

constexpr std::string_view kReconstructKeys[] = {
    "command",       "input.quad",
    "frame.matrix",  "origin.x",
    "origin.y",      "origin.z",
    "options.admissibility_tol", "options.strong_reg_tol",
    "options.sweep", "verify.obj",
    "verify.rms_rel_tol",
};

void cmd_reconstruct(const Config& cfg, const std::string& cfg_dir,
                     const std::string& out_dir, Report& rep) {
  cfg.require_known(kReconstructKeys);
  const Quadruple q = read_quadruple(resolve_with_probe(
      cfg_dir, out_dir, cfg.get_string("input.quad"), ".nu1"));
  echo_grid(rep, q.grid());

  Mat3 frame0 = Mat3::Identity();
  if (cfg.has("frame.matrix")) {
    const std::vector<double> m = cfg.get_doubles("frame.matrix");
    if (m.size() != 9)
      raise(Status::InvalidArgument, "frame.matrix needs 9 numbers");
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) frame0(r, c) = m[3 * r + c];
  }
  const Vec3 x0(cfg.get_double("origin.x", 0.0), cfg.get_double("origin.y", 0.0),
                cfg.get_double("origin.z", 0.0));

  ReconstructOptions opt;
  opt.admissibility_tol = cfg.get_double("options.admissibility_tol", -1.0);
  opt.strong_reg_tol = cfg.get_double("options.strong_reg_tol", 1e-9);
  opt.sweep_diagnostic = cfg.get_bool("options.sweep", true);

  const ReconstructedSurface res = reconstruct(q, frame0, x0, opt);
  rep.value_int("rect.i0", res.rect.i0);
  rep.value_int("rect.j0", res.rect.j0);
  rep.value_int("rect.nu", res.rect.nu);
  rep.value_int("rect.nv", res.rect.nv);
  rep.value("integrability_max", res.diag.integrability_max);
  rep.value("loop_defect", res.diag.loop_defect);
  rep.value("ortho_drift", res.diag.ortho_drift);
  rep.value("det_drift", res.diag.det_drift);
  if (opt.sweep_diagnostic)
    rep.value("sweep_difference", res.diag.sweep_difference);
  rep.value_bool("admissibility.pass", res.diag.admissibility.pass);
  rep.value("admissibility.res21_u", res.diag.admissibility.res21_u);
  rep.value("admissibility.res21_v", res.diag.admissibility.res21_v);
  rep.value("admissibility.res22", res.diag.admissibility.res22);
  rep.value("admissibility.tol", res.diag.admissibility.tol);

  SurfaceSamples out{res.grid, res.x, {}, Mask(res.grid)};
  out.normal.resize(res.x.size());
  for (std::size_t k = 0; k < res.x.size(); ++k)
    out.normal[k] = res.frames[k].row(2).transpose();
  export_obj(out, join_out(out_dir, "reconstructed.obj"));
  rep.file("reconstructed.obj");

  if (cfg.has("verify.obj")) {
    const SurfaceSamples ref = import_obj(
        resolve_input(cfg_dir, out_dir, cfg.get_string("verify.obj")));
    require_same_grid(ref.grid, q.grid(), "verify mesh vs quadruple");
    std::vector<Vec3> target;
    target.reserve(res.x.size());
    for (int j = 0; j < res.rect.nv; ++j)
      for (int i = 0; i < res.rect.nu; ++i)
        target.push_back(
            ref.x[ref.grid.idx(res.rect.i0 + i, res.rect.j0 + j)]);
    const RigidMotion rm = rigid_align(res.x, target);
    Vec3 lo = target.front(), hi = target.front();
    for (const Vec3& p : target) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
    const double diameter = (hi - lo).norm();
    const double rel_tol = cfg.get_double("verify.rms_rel_tol", 1e-3);
    rep.value("verify.rms", rm.rms);
    rep.value("verify.diameter", diameter);
    rep.verdict("round-trip-rms", rm.rms <= rel_tol * diameter, rm.rms,
                rel_tol * diameter);
  }
}

// ---------------------------------------------------------------------------
// gamma
// ---------------------------------------------------------------------------

constexpr std::string_view kGammaKeys[] = {
    "command",  "input.file", "test.tol",  "canal.R",
    "canal.k",  "canal.phase", "canal.tol",
};

void cmd_gamma(const Config& cfg, const std::string& cfg_dir,
               const std::string& out_dir, Report& rep) {
  cfg.require_known(kGammaKeys);
  const GammaFile gf = read_gamma_file(
      resolve_input(cfg_dir, out_dir, cfg.get_string("input.file")));

  const double du = gf.profile_u.size() > 1
                        ? gf.profile_u[1] - gf.profile_u[0]
                        : 0.0;
  const PlaneProfile profile =
      profile_from_curvature(gf.profile_kappa1, du, gf.profile_u.front());
  rep.value("profile.unit_speed_defect", profile.unit_speed_defect);
  rep.value_bool("profile.kappa1_vanishes", profile.kappa1_vanishes);

  const GammaSurface gs = gamma_surface(gf.curve, profile);
  echo_grid(rep, gs.samples.grid);
  rep.value("frame.ortho_drift", gs.frame.ortho_drift);
  rep.value_int("masked_nodes",
                static_cast<std::int64_t>(gs.samples.grid.n() -
                                          gs.samples.mask.count_on()));

  export_obj(gs.samples, join_out(out_dir, "gamma.obj"));
  rep.file("gamma.obj");
  write_quadruple(gs.quad, join_out(out_dir, "gamma"));
  for (const char* suffix : {".nu1", ".nu2", ".g1", ".g2", ".mask"})
    rep.file(std::string("gamma") + suffix);

  const double tol = cfg.get_double("test.tol", 1e-10);
  const RotationalReport rot = rotational_test(gf.curve, gs.quad, tol);
  rep.value("rotational.gamma1_max", rot.gamma1_max);
  rep.value("rotational.kappa_variation", rot.kappa_variation);
  rep.value("rotational.tau_max", rot.tau_max);
  rep.verdict("rotational", rot.rotational,
              std::max({rot.gamma1_max, rot.kappa_variation, rot.tau_max}),
              tol);

  const Frenet fr = principal_line_frenet(gs.quad, gs.forms);
  const CircleFamilyReport cfr = circle_family_test(fr, tol);
  rep.value("circle.tau1_max", cfr.tau1_max);
  rep.value("circle.kappa1_line_variation", cfr.kappa1_line_variation);
  rep.value("circle.tau2_max", cfr.tau2_max);
  rep.value("circle.kappa2_line_variation", cfr.kappa2_line_variation);
  rep.verdict("circle-family-1", cfr.family1,
              std::max(cfr.tau1_max, cfr.kappa1_line_variation), tol);
  rep.verdict("circle-family-2", cfr.family2,
              std::max(cfr.tau2_max, cfr.kappa2_line_variation), tol);

  if (cfg.has("canal.R")) {
    // Cross-check nu2 along the profile parameter against the canal-circle
    // formula at the corresponding circle parameter u + phase.
    CanalSpec spec;
    const double R = cfg.get_double("canal.R");
    const double k = cfg.get_double("canal.k");
    spec.R = [R](double) { return R; };
    spec.Rp = [](double) { return 0.0; };
    spec.Rpp = [](double) { return 0.0; };
    spec.k = [k](double) { return k; };
    const double phase = cfg.get_double("canal.phase", -std::numbers::pi / 2);
    const double ctol = cfg.get_double("canal.tol", 1e-3);
    const Grid& g = gs.samples.grid;
    double worst = 0;
    bool any = false;
    for (int i = 0; i < g.nu; ++i) {
      for (int j = 0; j < g.nv; ++j) {
        if (!gs.quad.mask.at(i, j)) continue;
        const auto [cn1, cn2] = canal_curvatures(spec, g.u(i) + phase);
        worst = std::max(worst,
                         std::abs(gs.quad.nu2.at(i, j) - cn2));
        worst = std::max(worst, std::abs(gs.quad.nu1.at(i, j) - cn1));
        any = true;
        break;  // invariants are constant along v; one sample per u-line
      }
    }
    if (!any) raise(Status::EmptyMesh, "no unmasked node for the canal check");
    rep.verdict("canal-consistency", worst <= ctol, worst, ctol);
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Dispatcher
// ---------------------------------------------------------------------------

int run_config(const std::string& command, const Config& cfg,
               const std::string& cfg_dir, const std::string& out_dir) {
  const std::string out = out_dir.empty() ? std::string(".") : out_dir;
  std::error_code ec;
  fs::create_directories(out, ec);

  Report rep(command);
  rep.echo_config(cfg);
  const auto t0 = std::chrono::steady_clock::now();
  const auto seconds = [&t0] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         t0)
        .count();
  };

  int code = 0;
  try {
    if (cfg.has("command") && cfg.get_string("command") != command)
      raise(Status::InvalidArgument,
            "config is for command '" + cfg.get_string("command") +
                "' but '" + command + "' was invoked");
    if (command == "fixture")
      cmd_fixture(cfg, cfg_dir, out, rep);
    else if (command == "analyze")
      cmd_analyze(cfg, cfg_dir, out, rep);
    else if (command == "solve-pde")
      cmd_solve_pde(cfg, cfg_dir, out, rep);
    else if (command == "reparam")
      cmd_reparam(cfg, cfg_dir, out, rep);
    else if (command == "reconstruct")
      cmd_reconstruct(cfg, cfg_dir, out, rep);
    else if (command == "gamma")
      cmd_gamma(cfg, cfg_dir, out, rep);
    else
      raise(Status::InvalidArgument, "unknown subcommand '" + command + "'");
    code = rep.all_pass() ? 0 : 2;
  } catch (const Error& e) {
    std::string msg = e.what();
    const std::string prefix = std::string(status_name(e.code())) + ": ";
    if (msg.rfind(prefix, 0) == 0) msg = msg.substr(prefix.size());
    rep.set_error(status_name(e.code()), msg);
    code = 1;
  } catch (const std::exception& e) {
    rep.set_error("Internal", e.what());
    code = 1;
  }

  rep.write((fs::path(out) / (command + "_report.json")).string(), seconds());
  return code;
}

}  // namespace wg
