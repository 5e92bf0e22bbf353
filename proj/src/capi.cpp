#include "weingarten/weingarten.h"

#include <cstring>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "core/config.hpp"
#include "core/errors.hpp"
#include "core/frame.hpp"
#include "core/grid.hpp"
#include "core/invariants.hpp"
#include "core/pipeline.hpp"

// The C enum mirrors wg::Status value for value.
#define WG_X(name, value)                                                    \
  static_assert(static_cast<int>(wg::Status::name) == (value),               \
                "status table out of sync");
WG_STATUS_LIST(WG_X)
#undef WG_X
static_assert(WG_OK == static_cast<int>(wg::Status::Ok));
static_assert(WG_GRID_TOO_SMALL == static_cast<int>(wg::Status::GridTooSmall));
static_assert(WG_TOO_FEW_SAMPLES ==
              static_cast<int>(wg::Status::TooFewSamples));
static_assert(WG_ADMISSIBILITY_FAILURE ==
              static_cast<int>(wg::Status::AdmissibilityFailure));
static_assert(WG_EMPTY_MESH == static_cast<int>(wg::Status::EmptyMesh));
static_assert(WG_INTERNAL == static_cast<int>(wg::Status::Internal));

struct wg_field {
  wg::Field f;
};
struct wg_mask {
  wg::Mask m;
};
struct wg_quadruple {
  wg::Quadruple q;
};
struct wg_surface {
  wg::ReconstructedSurface s;
};

namespace {

thread_local std::string t_last_error;

wg_status fail(wg_status code, const std::string& message) {
  t_last_error = message;
  return code;
}

wg_status fail_invalid(const char* message) {
  return fail(WG_INVALID_ARGUMENT, message);
}

// Runs `body` converting wg::Error / std::exception into status codes.
template <typename Fn>
wg_status guarded(Fn&& body) {
  try {
    body();
    return WG_OK;
  } catch (const wg::Error& e) {
    return fail(static_cast<wg_status>(e.code()), e.what());
  } catch (const std::exception& e) {
    return fail(WG_INTERNAL, e.what());
  }
}

}  // namespace

extern "C" {

const char* wg_status_name(wg_status s) {
  return wg::status_name(static_cast<wg::Status>(s));
}

const char* wg_last_error_message(void) { return t_last_error.c_str(); }

void wg_string_free(char* s) { delete[] s; }

/* --- fields -------------------------------------------------------------- */

wg_status wg_field_create(int nu, int nv, double u0, double v0, double du,
                          double dv, const double* values, wg_field** out) {
  if (!out) return fail_invalid("out must not be NULL");
  *out = nullptr;
  return guarded([&] {
    wg::Field f(wg::Grid(nu, nv, u0, v0, du, dv));
    if (values) std::copy(values, values + f.a.size(), f.a.begin());
    *out = new wg_field{std::move(f)};
  });
}

wg_status wg_field_read(const char* path, wg_field** out) {
  if (!path || !out) return fail_invalid("path/out must not be NULL");
  *out = nullptr;
  return guarded([&] { *out = new wg_field{wg::read_field(path)}; });
}

wg_status wg_field_write(const wg_field* f, const char* path) {
  if (!f || !path) return fail_invalid("field/path must not be NULL");
  return guarded([&] { wg::write_field(f->f, path); });
}

wg_status wg_field_dims(const wg_field* f, int* nu, int* nv, double* u0,
                        double* v0, double* du, double* dv) {
  if (!f) return fail_invalid("field must not be NULL");
  if (nu) *nu = f->f.grid.nu;
  if (nv) *nv = f->f.grid.nv;
  if (u0) *u0 = f->f.grid.u0;
  if (v0) *v0 = f->f.grid.v0;
  if (du) *du = f->f.grid.du;
  if (dv) *dv = f->f.grid.dv;
  return WG_OK;
}

wg_status wg_field_values(const wg_field* f, double* buffer,
                          size_t buffer_len) {
  if (!f || !buffer) return fail_invalid("field/buffer must not be NULL");
  if (buffer_len < f->f.a.size())
    return fail_invalid("buffer too small for the field");
  std::copy(f->f.a.begin(), f->f.a.end(), buffer);
  return WG_OK;
}

void wg_field_destroy(wg_field* f) { delete f; }

/* --- masks --------------------------------------------------------------- */

wg_status wg_mask_create(int nu, int nv, double u0, double v0, double du,
                         double dv, const unsigned char* on, wg_mask** out) {
  if (!out) return fail_invalid("out must not be NULL");
  *out = nullptr;
  return guarded([&] {
    wg::Mask m(wg::Grid(nu, nv, u0, v0, du, dv), true);
    if (on)
      for (size_t k = 0; k < m.on.size(); ++k) m.on[k] = on[k] ? 1 : 0;
    *out = new wg_mask{std::move(m)};
  });
}

wg_status wg_mask_read(const char* path, wg_mask** out) {
  if (!path || !out) return fail_invalid("path/out must not be NULL");
  *out = nullptr;
  return guarded([&] { *out = new wg_mask{wg::read_mask(path)}; });
}

wg_status wg_mask_write(const wg_mask* m, const char* path) {
  if (!m || !path) return fail_invalid("mask/path must not be NULL");
  return guarded([&] { wg::write_mask(m->m, path); });
}

wg_status wg_mask_count(const wg_mask* m, size_t* nodes_on) {
  if (!m || !nodes_on) return fail_invalid("mask/out must not be NULL");
  *nodes_on = m->m.count_on();
  return WG_OK;
}

void wg_mask_destroy(wg_mask* m) { delete m; }

/* --- quadruples ----------------------------------------------------------- */

wg_status wg_quadruple_create(const wg_field* nu1, const wg_field* nu2,
                              const wg_field* g1, const wg_field* g2,
                              const wg_mask* mask, wg_quadruple** out) {
  if (!nu1 || !nu2 || !g1 || !g2 || !out)
    return fail_invalid("fields/out must not be NULL");
  *out = nullptr;
  return guarded([&] {
    wg::Quadruple q{nu1->f, nu2->f,
                    g1->f,  g2->f,
                    mask ? mask->m : wg::Mask(nu1->f.grid, true),
                    {},     {},
                    {},     {}};
    q.validate();
    *out = new wg_quadruple{std::move(q)};
  });
}

wg_status wg_quadruple_read(const char* base_path, wg_quadruple** out) {
  if (!base_path || !out) return fail_invalid("path/out must not be NULL");
  *out = nullptr;
  return guarded(
      [&] { *out = new wg_quadruple{wg::read_quadruple(base_path)}; });
}

wg_status wg_quadruple_write(const wg_quadruple* q, const char* base_path) {
  if (!q || !base_path) return fail_invalid("quadruple/path must not be NULL");
  return guarded([&] { wg::write_quadruple(q->q, base_path); });
}

void wg_quadruple_destroy(wg_quadruple* q) { delete q; }

wg_status wg_strong_regularity_mask(const wg_quadruple* q, double tol,
                                    wg_mask** out) {
  if (!q || !out) return fail_invalid("quadruple/out must not be NULL");
  *out = nullptr;
  return guarded(
      [&] { *out = new wg_mask{wg::strong_regularity_mask(q->q, tol)}; });
}

wg_status wg_quadruple_admissible(const wg_quadruple* q, double tol, int* pass,
                                  char** failed_condition) {
  if (!q || !pass) return fail_invalid("quadruple/pass must not be NULL");
  if (failed_condition) *failed_condition = nullptr;
  return guarded([&] {
    const wg::Grid& g = q->q.grid();
    if (tol <= 0) tol = 10 * std::max(g.du, g.dv) * std::max(g.du, g.dv);
    const wg::AdmissibilityReport rep = wg::bonnet_admissibility(q->q, tol);
    *pass = rep.pass ? 1 : 0;
    if (!rep.pass && failed_condition) {
      char* s = new char[rep.failed_condition.size() + 1];
      std::memcpy(s, rep.failed_condition.c_str(),
                  rep.failed_condition.size() + 1);
      *failed_condition = s;
    }
  });
}

/* --- reconstruction -------------------------------------------------------- */

wg_status wg_reconstruct(const wg_quadruple* q, const double* frame9,
                         const double* x0, wg_surface** out) {
  if (!q || !out) return fail_invalid("quadruple/out must not be NULL");
  *out = nullptr;
  return guarded([&] {
    wg::Mat3 F0 = wg::Mat3::Identity();
    if (frame9)
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) F0(r, c) = frame9[3 * r + c];
    wg::Vec3 p0 = wg::Vec3::Zero();
    if (x0) p0 = wg::Vec3(x0[0], x0[1], x0[2]);
    *out = new wg_surface{wg::reconstruct(q->q, F0, p0)};
  });
}

wg_status wg_surface_dims(const wg_surface* s, int* nu, int* nv) {
  if (!s) return fail_invalid("surface must not be NULL");
  if (nu) *nu = s->s.grid.nu;
  if (nv) *nv = s->s.grid.nv;
  return WG_OK;
}

wg_status wg_surface_positions(const wg_surface* s, double* xyz, size_t len) {
  if (!s || !xyz) return fail_invalid("surface/buffer must not be NULL");
  if (len < 3 * s->s.x.size())
    return fail_invalid("buffer too small for the surface positions");
  for (size_t k = 0; k < s->s.x.size(); ++k) {
    xyz[3 * k] = s->s.x[k][0];
    xyz[3 * k + 1] = s->s.x[k][1];
    xyz[3 * k + 2] = s->s.x[k][2];
  }
  return WG_OK;
}

wg_status wg_surface_write_obj(const wg_surface* s, const char* path) {
  if (!s || !path) return fail_invalid("surface/path must not be NULL");
  return guarded([&] {
    wg::SurfaceSamples samples{s->s.grid, s->s.x, {}, wg::Mask(s->s.grid)};
    samples.normal.resize(s->s.x.size());
    for (size_t k = 0; k < s->s.x.size(); ++k)
      samples.normal[k] = s->s.frames[k].row(2).transpose();
    wg::export_obj(samples, path);
  });
}

wg_status wg_surface_diagnostics(const wg_surface* s,
                                 double* integrability_max,
                                 double* loop_defect, double* ortho_drift,
                                 double* det_drift, double* sweep_difference) {
  if (!s) return fail_invalid("surface must not be NULL");
  if (integrability_max) *integrability_max = s->s.diag.integrability_max;
  if (loop_defect) *loop_defect = s->s.diag.loop_defect;
  if (ortho_drift) *ortho_drift = s->s.diag.ortho_drift;
  if (det_drift) *det_drift = s->s.diag.det_drift;
  if (sweep_difference) *sweep_difference = s->s.diag.sweep_difference;
  return WG_OK;
}

void wg_surface_destroy(wg_surface* s) { delete s; }

/* --- rigid alignment -------------------------------------------------------- */

wg_status wg_rigid_align(const double* p_xyz, const double* q_xyz,
                         size_t n_points, double* rotation9,
                         double* translation3, double* rms) {
  if (!p_xyz || !q_xyz) return fail_invalid("point arrays must not be NULL");
  return guarded([&] {
    std::vector<wg::Vec3> P(n_points), Q(n_points);
    for (size_t k = 0; k < n_points; ++k) {
      P[k] = wg::Vec3(p_xyz[3 * k], p_xyz[3 * k + 1], p_xyz[3 * k + 2]);
      Q[k] = wg::Vec3(q_xyz[3 * k], q_xyz[3 * k + 1], q_xyz[3 * k + 2]);
    }
    const wg::RigidMotion m = wg::rigid_align(P, Q);
    if (rotation9)
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) rotation9[3 * r + c] = m.R(r, c);
    if (translation3)
      for (int c = 0; c < 3; ++c) translation3[c] = m.t[c];
    if (rms) *rms = m.rms;
  });
}

/* --- config runs -------------------------------------------------------------- */

int wg_run_config(const char* command, const char* config_path,
                  const char* out_dir) {
  if (!command || !config_path) {
    fail_invalid("command/config_path must not be NULL");
    return 1;
  }
  try {
    const wg::Config cfg = wg::Config::load(config_path);
    const std::string cfg_dir =
        std::filesystem::path(config_path).parent_path().string();
    const std::string out = out_dir ? out_dir : "";
    const int code = wg::run_config(command, cfg, cfg_dir, out);
    if (code == 1) {
      // run_config embedded the error in the report; surface it here too.
      t_last_error = "run failed; see " + std::string(command) +
                     "_report.json in the output directory";
    }
    return code;
  } catch (const wg::Error& e) {
    fail(static_cast<wg_status>(e.code()), e.what());
    return 1;
  } catch (const std::exception& e) {
    fail(WG_INTERNAL, e.what());
    return 1;
  }
}

}  // extern "C"
