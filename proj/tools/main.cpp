#include <filesystem>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "hdgpath/harness.hpp"
#include "hdgpath/mesh_io.hpp"

using namespace hdgpath;

int main(int argc, char** argv) {
  CLI::App app{"Hybridizable DG solver for elliptic problems on curved domains"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::pair<std::string, std::string>> entries;

  auto add_shared = [&](CLI::App* sub) {
    sub->add_option("--config", config_path,
                    "key=value config file; explicit flags win");
    auto capture = [&entries](std::string key) {
      return [&entries, key = std::move(key)](const std::string& v) {
        entries.emplace_back(key, v);
      };
    };
    sub->add_option_function<std::string>("--case", capture("case"),
                                          "case label (ex1..ex4, ex5a, ex5b, ex6..ex8)");
    sub->add_option_function<std::string>("--k", capture("k"),
                                          "polynomial degree, 0..3");
    sub->add_option_function<std::string>(
        "--levels", capture("levels"),
        "comma separated refinement parameters, e.g. 4,8,16");
    sub->add_option_function<std::string>("--paths", capture("paths"),
                                          "transfer path family: p1 or p2");
    sub->add_option_function<std::string>(
        "--fit", capture("fit"), "mesh family: immersed or interpolated");
    sub->add_option_function<std::string>("--tol", capture("tol"),
                                          "linear solver tolerance");
    sub->add_option_function<std::string>("--out", capture("out"),
                                          "output directory");
    sub->add_option_function<std::string>(
        "--mesh-file", capture("mesh-file"),
        "solve on a stored mesh instead of a generated family");
    sub->add_option_function<std::string>(
        "--ex5-frame", capture("ex5-frame"),
        "ex5b reference frame: preimage or airfoil");
  };

  CLI::App* conv = app.add_subcommand(
      "convergence", "run a refinement study, write report.csv and run.log");
  add_shared(conv);
  CLI::App* solve =
      app.add_subcommand("solve", "solve one level and write a VTK file");
  add_shared(solve);

  CLI::App* mesh = app.add_subcommand("mesh", "generate a mesh file");
  std::string geometry;
  int n = 4;
  int nodes = 16;
  std::string mesh_out = ".";
  mesh->add_option("--geometry", geometry, "square or annulus")->required();
  mesh->add_option("--n", n, "grid cells per side (square)");
  mesh->add_option("--nodes", nodes, "angular segments (annulus)");
  mesh->add_option("--out", mesh_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (mesh->parsed()) {
      Mesh m = make_named_mesh(geometry, n, nodes);
      std::filesystem::create_directories(mesh_out);
      std::string tag =
          geometry == "annulus" ? std::to_string(nodes) : std::to_string(n);
      std::string path = mesh_out + "/" + geometry + "_" + tag + ".mesh";
      write_mesh(path, m);
      std::cout << path << " triangles=" << m.num_triangles() << '\n';
      return 0;
    }

    RunConfig cfg;
    if (!config_path.empty()) load_config_file(cfg, config_path);
    for (const auto& [key, value] : entries)
      apply_config_entry(cfg, key, value);
    validate_config(cfg);

    if (conv->parsed()) {
      write_convergence_outputs(run_convergence(cfg), cfg);
      std::cout << cfg.out_dir << "/report.csv\n"
                << cfg.out_dir << "/run.log\n";
      return 0;
    }
    std::cout << run_solve(cfg) << '\n';
    return 0;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
