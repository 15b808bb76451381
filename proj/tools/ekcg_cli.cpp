// ekcg: run enlarged Krylov CG experiments from the command line.
//
//   ekcg solve --matrix poisson2d:40,40 --method sre-cg2 --t 8 --out results
//   ekcg batch spec.json
//   ekcg gen --matrix aniso3d:10,10,10,1e3 --output a.mtx
//   ekcg partition --n 1600 --t 8 --output p.txt

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>

#include "ekcg/harness/experiment.hpp"
#include "ekcg/harness/matrix_market.hpp"
#include "ekcg/partition.hpp"

namespace {

void print_summary(const std::vector<ekcg::harness::RunRow>& rows, const std::string& out) {
  for (const auto& r : rows) {
    std::cout << r.run_id << "  " << r.method;
    if (r.t) std::cout << " t=" << *r.t;
    std::cout << " " << r.policy;
    if (r.switch_tol) std::cout << " switch=" << *r.switch_tol;
    std::cout << "  it=" << r.iterations << " peak=" << r.peak_block_vectors << " " << r.status << '\n';
  }
  std::cout << "wrote " << out << "/results.csv\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Enlarged Krylov CG experiments"};
  app.require_subcommand(1);

  ekcg::harness::ExperimentSpec spec;
  std::string matrix, method = "sre-cg2", retention = "full";
  int t = 2;
  std::optional<double> switch_tol;
  auto* solve = app.add_subcommand("solve", "Run one configuration");
  solve->add_option("--matrix", matrix, "poisson2d:NX,NY | poisson3d:NX,NY,NZ | aniso3d:NX,NY,NZ,C | "
                                        "skyscraper:NX,NY[,NZ],C | mm:PATH")
      ->required();
  solve->add_option("--partition", spec.partition, "contiguous | file:PATH")->capture_default_str();
  solve->add_option("--t", t, "Number of subdomains")->capture_default_str();
  solve->add_option("--method", method, "cg | sre-cg2 | sre-cg | msdo-cg | modified-msdo-cg")
      ->capture_default_str();
  solve->add_option("--retention", retention, "full | trunc:K | restart:J | restart-tol:TOL")
      ->capture_default_str();
  solve->add_option("--switch-tol", switch_tol, "Flexible t -> t/2 switch threshold");
  solve->add_option("--tol", spec.tol, "Relative residual tolerance")->capture_default_str();
  solve->add_option("--kmax", spec.kmax, "Iteration cap; 0 means twice the CG count")->capture_default_str();
  solve->add_option("--precond", spec.precond, "none | bj-chol:NBLOCKS | bj-ichol0:NBLOCKS")->capture_default_str();
  solve->add_option("--precond-mode", spec.precond_mode, "modified | explicit-hat")->capture_default_str();
  solve->add_option("--seed", spec.seed, "Seed of the right-hand side")->capture_default_str();
  solve->add_option("--out", spec.out, "Output directory")->capture_default_str();

  std::string spec_path, out_override;
  auto* batch = app.add_subcommand("batch", "Run a JSON experiment spec");
  batch->add_option("spec", spec_path, "Spec file")->required()->check(CLI::ExistingFile);
  batch->add_option("--out", out_override, "Override the spec's output directory");

  std::string gen_matrix, gen_output;
  auto* gen = app.add_subcommand("gen", "Write a generated matrix as Matrix Market");
  gen->add_option("--matrix", gen_matrix, "Matrix source")->required();
  gen->add_option("--output", gen_output, "Output file")->required();

  long part_n = 0;
  int part_t = 0;
  std::string part_output;
  auto* part = app.add_subcommand("partition", "Write a contiguous partition file");
  part->add_option("--n", part_n, "Number of unknowns")->required();
  part->add_option("--t", part_t, "Number of subdomains")->required();
  part->add_option("--output", part_output, "Output file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve) {
      spec.matrices = {matrix};
      spec.methods = {method};
      spec.t = {t};
      spec.retention = {retention};
      spec.switch_tol = {switch_tol};
      const auto rows = ekcg::harness::run_experiment(spec);
      print_summary(rows, spec.out);
      return rows.front().status.rfind("error", 0) == 0 ? 1 : 0;
    }
    if (*batch) {
      std::ifstream in(spec_path);
      auto s = ekcg::harness::spec_from_json(nlohmann::json::parse(in));
      if (!out_override.empty()) s.out = out_override;
      print_summary(ekcg::harness::run_experiment(s), s.out);
      return 0;
    }
    if (*gen) {
      ekcg::harness::write_matrix_market_file(gen_output, ekcg::harness::build_matrix(gen_matrix));
      return 0;
    }
    if (*part) {
      std::ofstream out(part_output);
      ekcg::write_partition(ekcg::contiguous_partition(part_n, part_t), out);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "ekcg: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
