#include "hdgpath/harness.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "hdgpath/mesh_io.hpp"
#include "hdgpath/paths.hpp"
#include "hdgpath/postprocess.hpp"
#include "hdgpath/vtk.hpp"

namespace hdgpath {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

int parse_int(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(value, &used);
  } catch (const std::exception&) {
    used = std::string::npos;
  }
  if (used != value.size())
    throw std::invalid_argument("config: bad integer for '" + key +
                                "': " + value);
  return v;
}

double parse_double(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    used = std::string::npos;
  }
  if (used != value.size())
    throw std::invalid_argument("config: bad number for '" + key +
                                "': " + value);
  return v;
}

std::string fmt(const char* spec, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string order_or_na(const std::optional<double>& o) {
  return o ? fmt("%.2f", *o) : std::string("n/a");
}

const char* strategy_name(PathStrategy s) {
  return s == PathStrategy::p1 ? "p1" : "p2";
}

const char* fit_name(FitMode f) {
  return f == FitMode::immersed ? "immersed" : "interpolated";
}

struct ResolvedRun {
  ManufacturedCase mc;
  PathStrategy strategy;
  FitMode fit;
  std::vector<int> levels;
};

ResolvedRun resolve(const RunConfig& cfg) {
  ResolvedRun r{make_case(cfg.case_label, cfg.ex5_frame), PathStrategy::p2,
                FitMode::immersed, {}};
  r.strategy = cfg.strategy.value_or(r.mc.strategy);
  r.fit = cfg.fit.value_or(r.mc.fit);
  r.levels = cfg.levels.empty() ? r.mc.levels : cfg.levels;
  return r;
}

struct SolvedLevel {
  Mesh mesh;
  PathFamily paths;
  HdgBlocks blocks;
  FieldSolution sol;
  PostprocessedField star;
};

void solve_level(const ResolvedRun& r, const RunConfig& cfg, int param,
                 SolvedLevel& out) {
  out.mesh = cfg.mesh_file.empty() ? r.mc.make_mesh(param, r.fit)
                                   : read_mesh(cfg.mesh_file);
  classify_edges(out.mesh, r.mc.spec, r.strategy);
  out.paths = build_paths(out.mesh, r.mc.spec, r.strategy,
                          quadrature_plan(cfg.k).edge.nodes);
  out.blocks =
      build_blocks(out.mesh, r.mc.spec, out.paths, cfg.k, r.mc.data,
                   Stabilization::standard(out.mesh, r.mc.spec));
  out.sol = solve_condensed(out.blocks, cfg.tol);
  out.star = postprocess(out.sol, out.blocks);
}

}  // namespace

void apply_config_entry(RunConfig& cfg, const std::string& key,
                        const std::string& value) {
  if (key == "case") {
    cfg.case_label = value;
  } else if (key == "k") {
    cfg.k = parse_int(key, value);
  } else if (key == "levels") {
    std::vector<int> levels;
    std::istringstream ls(value);
    std::string item;
    while (std::getline(ls, item, ','))
      levels.push_back(parse_int(key, trim(item)));
    if (levels.empty())
      throw std::invalid_argument("config: empty level list");
    cfg.levels = levels;
  } else if (key == "paths") {
    if (value == "p1")
      cfg.strategy = PathStrategy::p1;
    else if (value == "p2")
      cfg.strategy = PathStrategy::p2;
    else
      throw std::invalid_argument("config: paths must be p1 or p2, got " +
                                  value);
  } else if (key == "fit") {
    if (value == "immersed")
      cfg.fit = FitMode::immersed;
    else if (value == "interpolated")
      cfg.fit = FitMode::interpolated;
    else
      throw std::invalid_argument(
          "config: fit must be immersed or interpolated, got " + value);
  } else if (key == "tol") {
    cfg.tol = parse_double(key, value);
  } else if (key == "out") {
    cfg.out_dir = value;
  } else if (key == "mesh-file") {
    cfg.mesh_file = value;
  } else if (key == "ex5-frame") {
    if (value == "preimage")
      cfg.ex5_frame = Ex5Frame::preimage;
    else if (value == "airfoil")
      cfg.ex5_frame = Ex5Frame::airfoil;
    else
      throw std::invalid_argument(
          "config: ex5-frame must be preimage or airfoil, got " + value);
  } else {
    throw std::invalid_argument("config: unknown key '" + key + "'");
  }
}

void load_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw std::invalid_argument("config file not readable: " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto eq = t.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config " + path + ":" +
                                  std::to_string(lineno) +
                                  ": expected key=value");
    apply_config_entry(cfg, trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
}

void validate_config(const RunConfig& cfg) {
  if (cfg.k < 0 || cfg.k > 3)
    throw std::invalid_argument("config: k must be in [0,3], got " +
                                std::to_string(cfg.k));
  if (cfg.tol <= 0) throw std::invalid_argument("config: tol must be > 0");
  ResolvedRun r = resolve(cfg);
  if (r.levels.empty())
    throw std::invalid_argument("config: no refinement levels");
  if (r.mc.has_interface && r.fit != FitMode::interpolated)
    throw std::invalid_argument(cfg.case_label +
                                ": interface runs need the interpolated fit");
}

ConvergenceRun run_convergence(const RunConfig& cfg) {
  validate_config(cfg);
  ResolvedRun r = resolve(cfg);
  if (!cfg.mesh_file.empty()) r.levels.resize(1);

  ConvergenceRun out;
  SolvedLevel lvl;
  for (int param : r.levels) {
    solve_level(r, cfg, param, lvl);
    out.rows.push_back(
        compute_error_norms(r.mc, lvl.blocks, lvl.sol, lvl.star));
    ConservationReport cons = local_conservation(lvl.sol, lvl.blocks);
    LevelDiagnostics d;
    d.level_param = param;
    d.triangles = lvl.mesh.num_triangles();
    d.edges = lvl.mesh.num_edges();
    d.fallback_warnings = lvl.paths.fallback_warnings;
    d.length_warnings = lvl.paths.length_warnings;
    d.path_notes = lvl.paths.notes;
    d.residual = lvl.sol.residual;
    d.conserv_standard = cons.max_standard;
    d.conserv_modified = cons.max_modified;
    out.diag.push_back(std::move(d));
  }
  return out;
}

void write_convergence_outputs(const ConvergenceRun& run,
                               const RunConfig& cfg) {
  std::filesystem::create_directories(cfg.out_dir);
  ResolvedRun r = resolve(cfg);

  std::ofstream csv(cfg.out_dir + "/report.csv");
  if (!csv)
    throw std::runtime_error("cannot write " + cfg.out_dir + "/report.csv");
  write_report_csv(csv, run.rows);

  std::ofstream log(cfg.out_dir + "/run.log");
  if (!log)
    throw std::runtime_error("cannot write " + cfg.out_dir + "/run.log");
  log << "case=" << cfg.case_label << " k=" << cfg.k
      << " paths=" << strategy_name(r.strategy) << " fit=" << fit_name(r.fit)
      << " tol=" << fmt("%.2E", cfg.tol) << '\n';
  for (std::size_t i = 0; i < run.diag.size(); ++i) {
    const LevelDiagnostics& d = run.diag[i];
    const ErrorRow& row = run.rows[i];
    log << "level n=" << d.level_param << ": triangles=" << d.triangles
        << " edges=" << d.edges << " h=" << fmt("%.6E", row.h) << '\n';
    log << "  paths: fallback=" << d.fallback_warnings
        << " length_warnings=" << d.length_warnings << '\n';
    for (const std::string& note : d.path_notes) log << "  note: " << note << '\n';
    log << "  solver residual=" << fmt("%.2E", d.residual) << '\n';
    log << "  conservation: standard=" << fmt("%.2E", d.conserv_standard)
        << " modified=" << fmt("%.2E", d.conserv_modified) << '\n';
    log << "  errors: e_u=" << fmt("%.6E", row.e_u)
        << " e_q=" << fmt("%.6E", row.e_q)
        << " e_uhat=" << fmt("%.6E", row.e_uhat)
        << " e_ustar=" << fmt("%.6E", row.e_ustar) << '\n';
  }
  if (run.rows.size() >= 2) {
    const ErrorRow& a = run.rows[run.rows.size() - 2];
    const ErrorRow& b = run.rows.back();
    log << "final orders: e_u=" << order_or_na(eoc(a.e_u, b.e_u, a.h, b.h))
        << " e_q=" << order_or_na(eoc(a.e_q, b.e_q, a.h, b.h))
        << " e_uhat=" << order_or_na(eoc(a.e_uhat, b.e_uhat, a.h, b.h))
        << " e_ustar=" << order_or_na(eoc(a.e_ustar, b.e_ustar, a.h, b.h))
        << '\n';
  }
}

std::string run_solve(const RunConfig& cfg) {
  validate_config(cfg);
  ResolvedRun r = resolve(cfg);
  const int param = r.levels.front();

  SolvedLevel lvl;
  solve_level(r, cfg, param, lvl);

  std::filesystem::create_directories(cfg.out_dir);
  std::string stem = cfg.case_label + "_k" + std::to_string(cfg.k) +
                     (cfg.mesh_file.empty()
                          ? "_n" + std::to_string(param)
                          : std::string("_mesh"));
  std::string path = cfg.out_dir + "/" + stem + ".vtk";
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_vtk(out, lvl.sol, lvl.blocks, lvl.star,
            stem + " h=" + fmt("%.6E", lvl.mesh.h_max()));
  return path;
}

Mesh make_named_mesh(const std::string& geometry, int n, int nodes) {
  if (geometry == "square")
    return generate_square_grid(Vec2(0, 0), Vec2(1, 1), n, n);
  if (geometry == "annulus")
    return generate_annulus(Vec2(0.5, 0.5), 1.0, 2.0, nodes);
  throw std::invalid_argument("unknown geometry: " + geometry);
}

}  // namespace hdgpath
