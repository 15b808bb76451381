#pragma once

// Batch experiment driver. A spec names the matrix sources and the grid of
// (method × t × retention × switch) cells; each cell becomes one CSV row and
// one residual-history TSV.
//
// CSV columns, in order (wall_time_s is always last):
//   run_id, matrix, n, method, t, policy, trunc, restart_j, restart_tol,
//   switch_tol, precond, precond_mode, partition, tol, kmax, seed,
//   iterations, status, switch_iteration, restart_count, peak_block_vectors,
//   final_relative_residual, true_relative_residual, relative_error, wall_time_s
// Empty fields mean "not applicable". Floats use %.17g.
//
// History TSV (history/<run_id>.tsv): iteration, rho, tol1 where
// tol1 = |rho_k - rho_{k-1}| / rho_0 (empty at iteration 0).

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ekcg/core.hpp"
#include "ekcg/solver.hpp"

namespace ekcg::harness {

/// x* with entries uniform in [0, 4) and b = A x*.
///
/// The stream is std::mt19937_64 seeded with `seed`; each entry is
/// 4 · (draw >> 11) · 2⁻⁵³, so the range is exactly [0, 4).
struct Rhs {
  Vector<double> b;
  Vector<double> x_star;
};
Rhs make_rhs(const SparseSpdMatrix<double>& a, std::uint64_t seed);

/// One draw of the entry map used by make_rhs.
double rhs_entry(std::uint64_t draw);

/// Builds a matrix from "poisson2d:NX,NY", "poisson3d:NX,NY,NZ",
/// "aniso3d:NX,NY,NZ,C", "skyscraper:NX,NY,C", "skyscraper:NX,NY,NZ,C" or
/// "mm:PATH".
SparseSpdMatrix<double> build_matrix(const std::string& source);

Method parse_method(const std::string& s);
Retention parse_retention(const std::string& s);

struct PrecondSpec {
  std::optional<FactorKind> kind;  // empty: none
  int blocks = 0;
};
PrecondSpec parse_precond(const std::string& s);
PrecondMode parse_precond_mode(const std::string& s);

struct ExperimentSpec {
  std::vector<std::string> matrices;
  std::string partition = "contiguous";
  std::vector<std::string> methods{"sre-cg2"};
  std::vector<int> t{2};
  std::vector<std::string> retention{"full"};
  /// nullopt entries mean "no switch".
  std::vector<std::optional<double>> switch_tol{std::nullopt};
  double tol = 1e-8;
  /// 0 selects twice the unpreconditioned CG iteration count (at least 10).
  int kmax = 0;
  std::string precond = "none";
  std::string precond_mode = "modified";
  std::uint64_t seed = 5489;
  std::string out = "results";

  /// Throws InvalidArgument on a malformed spec.
  void validate() const;
};

ExperimentSpec spec_from_json(const nlohmann::json& j);
nlohmann::json spec_to_json(const ExperimentSpec& s);

struct RunRow {
  std::string run_id, matrix, method, policy, precond, precond_mode, partition, status;
  Index n = 0;
  std::optional<int> t, trunc, restart_j, switch_iteration;
  std::optional<double> restart_tol, switch_tol, relative_error;
  double tol = 0, final_relative_residual = 0, true_relative_residual = 0, wall_time_s = 0;
  int kmax = 0, iterations = 0, restart_count = 0;
  std::uint64_t seed = 0;
  Index peak_block_vectors = 0;
  std::vector<double> residual_history;
};

const std::vector<std::string>& csv_columns();
void write_csv_header(std::ostream& out);
void write_csv_row(std::ostream& out, const RunRow& row);
void write_history(std::ostream& out, const RunRow& row);

/// Runs every cell, in a fixed order: matrix, method, t, retention,
/// switch_tol. CG contributes one row per matrix. Failed cells become rows
/// whose status starts with "error:".
std::vector<RunRow> run_rows(const ExperimentSpec& spec);

/// run_rows plus <out>/results.csv and <out>/history/<run_id>.tsv.
std::vector<RunRow> run_experiment(const ExperimentSpec& spec);

}  // namespace ekcg::harness
