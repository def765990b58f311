// vrjp-lab: run | validate | oracle
#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "vrjp/errors.hpp"
#include "vrjp/experiments.hpp"
#include "vrjp/graph.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Vertex-reinforced jump process laboratory"};
  app.require_subcommand(1);

  int workers = 0;
  if (const char* env = std::getenv("VRJP_LAB_WORKERS")) workers = std::atoi(env);
  app.add_option("--workers", workers, "worker threads for independent chains (default: hardware, env VRJP_LAB_WORKERS)")
      ->check(CLI::NonNegativeNumber);

  std::string run_path;
  auto* run = app.add_subcommand("run", "run an experiment config, writing <output>.csv and <output>.json");
  run->add_option("config", run_path, "JSON config")->required()->check(CLI::ExistingFile);

  std::vector<std::string> validate_paths;
  auto* validate = app.add_subcommand("validate", "schema-check configs without running them");
  validate->add_option("configs", validate_paths, "JSON configs")->required();

  std::string graph_path;
  auto* oracle = app.add_subcommand("oracle", "matrix-tree and quadrature checks for a graph file");
  oracle->add_option("graph", graph_path, "graph file")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  if (*run) return vrjp::run_config_file(run_path, workers, std::cerr);

  if (*validate) {
    int status = 0;
    for (const auto& p : validate_paths) {
      std::ifstream in(p);
      if (!in) {
        std::cerr << p << ": cannot read\n";
        status = 1;
        continue;
      }
      const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
      const auto v = vrjp::validate_config(text);
      if (v.ok) {
        std::cout << p << ": ok\n";
      } else {
        status = 1;
        for (const auto& e : v.errors) std::cerr << p << ": " << e << '\n';
      }
    }
    return status;
  }

  try {
    std::ifstream in(graph_path);
    const auto g = vrjp::read_graph(in);
    std::cout << vrjp::oracle_report(g);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
