// wgsurf — command-line front end for the weingarten shared library.
//
//   wgsurf <subcommand> --config <path> [--out <dir>]
//
// Subcommands: fixture, analyze, solve-pde, reparam, reconstruct, gamma.
// Exit codes: 0 run complete and all verdicts passed; 2 a verdict failed;
// 1 error. The THREADS environment variable caps internal parallelism.

#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "weingarten/weingarten.h"

int main(int argc, char** argv) {
  CLI::App app{
      "Surface reconstruction from prescribed principal curvatures and "
      "principal geodesic curvatures"};
  app.require_subcommand(1);

  const char* names[] = {"fixture","analyze", "solve-pde",
                         "reparam", "reconstruct", "gamma"};
  const char* blurbs[] = {
      "emit a closed-form fixture as OBJ plus field files",
      "recover invariants from a mesh or quadruple and probe the "
      "curvature relation",
      "solve a natural PDE (liouville, sinh-gordon, sinh-gordon-k1, "
      "sine-gordon)",
      "change to geometric principal parameters",
      "rebuild a surface from an invariant quadruple",
      "sweep a class-gamma surface from generating data and test it"};

  std::string config_path, out_dir = ".";
  for (int k = 0; k < 6; ++k) {
    CLI::App* sub = app.add_subcommand(names[k], blurbs[k]);
    sub->add_option("--config", config_path, "config file (key = value)")
        ->required();
    sub->add_option("--out", out_dir, "output directory (default .)");
  }

  CLI11_PARSE(app, argc, argv);

  const std::string command = app.get_subcommands().front()->get_name();
  const int code =
      wg_run_config(command.c_str(), config_path.c_str(), out_dir.c_str());
  if (code == 0) {
    std::printf("%s: ok (report: %s/%s_report.json)\n", command.c_str(),
                out_dir.c_str(), command.c_str());
  } else if (code == 2) {
    std::fprintf(stderr, "%s: verdict FAILED (report: %s/%s_report.json)\n",
                 command.c_str(), out_dir.c_str(), command.c_str());
  } else {
    std::fprintf(stderr, "%s: error: %s\n", command.c_str(),
                 wg_last_error_message());
  }
  return code;
}
