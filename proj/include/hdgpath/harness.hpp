#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hdgpath/cases.hpp"
#include "hdgpath/errors.hpp"

namespace hdgpath {

// One refinement sweep (or single solve) of a catalog case.  Unset strategy,
// fit and levels fall back to the case defaults.
struct RunConfig {
  std::string case_label = "ex1";
  int k = 1;
  std::vector<int> levels;
  std::optional<PathStrategy> strategy;
  std::optional<FitMode> fit;
  double tol = 1e-10;
  std::string out_dir = ".";
  std::string mesh_file;  // solve on a stored mesh instead of a generator
  Ex5Frame ex5_frame = Ex5Frame::preimage;
};

// Applies one key=value pair (config-file line or CLI flag target).
// Keys: case, k, levels (comma-separated), paths, fit, tol, out, mesh-file,
// ex5-frame.  Throws std::invalid_argument on unknown keys or bad values.
void apply_config_entry(RunConfig& cfg, const std::string& key,
                        const std::string& value);

// Flat key=value file, '#' comments and blank lines ignored.
void load_config_file(RunConfig& cfg, const std::string& path);

// Throws std::invalid_argument when k is outside [0,3], the level list is
// empty after defaulting, or the fit mode is incompatible with the case.
void validate_config(const RunConfig& cfg);

struct LevelDiagnostics {
  int level_param = 0;
  int triangles = 0;
  int edges = 0;
  int fallback_warnings = 0;
  int length_warnings = 0;
  std::vector<std::string> path_notes;
  double residual = 0.0;
  double conserv_standard = 0.0;
  double conserv_modified = 0.0;
};

struct ConvergenceRun {
  std::vector<ErrorRow> rows;
  std::vector<LevelDiagnostics> diag;
};

// Solves every level sequentially.  Exceptions from meshing, path building
// or the solver propagate to the caller.
ConvergenceRun run_convergence(const RunConfig& cfg);

// Writes report.csv and run.log into cfg.out_dir (created if needed).
void write_convergence_outputs(const ConvergenceRun& run,
                               const RunConfig& cfg);

// Solves the first configured level (or cfg.mesh_file) and writes a VTK
// dump; returns the file path.
std::string run_solve(const RunConfig& cfg);

// Mesh generators of the mesh subcommand: "square" (unit grid, 2n^2
// triangles) or "annulus" (structured polar mesh, `nodes` angular
// segments).  Unknown names throw std::invalid_argument.
Mesh make_named_mesh(const std::string& geometry, int n, int nodes);

}  // namespace hdgpath
