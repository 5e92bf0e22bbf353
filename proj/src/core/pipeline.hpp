#pragma once

#include <string>

#include "core/config.hpp"
#include "core/fixtures.hpp"
#include "core/invariants.hpp"

namespace wg {

// OBJ text export: one `v x y z` line per unmasked node in row-major node
// order (and a matching `vn` line when normals are present), each cell split
// into two triangles, faces dropped when any corner is masked. A leading
// `# grid nu nv u0 v0 du dv` comment preserves the parameter grid so the
// file can be reimported. EmptyMesh when every node is masked.
void export_obj(const SurfaceSamples& s, const std::string& path);

// Inverse of export_obj for full meshes: requires the grid comment and a
// vertex per node; partial meshes are not importable.
SurfaceSamples import_obj(const std::string& path);

// Quadruple serialization as five sibling files:
// <base>.nu1 .nu2 .g1 .g2 .mask.
void write_quadruple(const Quadruple& q, const std::string& base_path);
Quadruple read_quadruple(const std::string& base_path);

// Input-path resolution for config-referenced files: absolute paths are
// kept; relative ones are tried under out_dir, then under the config file's
// directory, then as given.
std::string resolve_input(const std::string& cfg_dir,
                          const std::string& out_dir, const std::string& path);

// Runs one subcommand (fixture | analyze | solve-pde | reparam |
// reconstruct | gamma) from its parsed config, writing every artifact and a
// `<command>_report.json` into out_dir (the report is written even when the
// run fails). Returns the process exit code: 0 when complete and every
// verdict passed, 2 when a verdict failed, 1 on error.
int run_config(const std::string& command, const Config& cfg,
               const std::string& cfg_dir, const std::string& out_dir);

}  // namespace wg
