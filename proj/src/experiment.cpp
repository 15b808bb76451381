#include "ekcg/harness/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <ostream>
#include <random>
#include <sstream>
#include <type_traits>

#include "ekcg/harness/generators.hpp"
#include "ekcg/harness/matrix_market.hpp"
#include "ekcg/partition.hpp"
#include "ekcg/preconditioner.hpp"

namespace ekcg::harness {

namespace {

double parse_double(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw InvalidArgument(what + ": '" + s + "' is not a number");
  }
  if (used != s.size()) throw InvalidArgument(what + ": '" + s + "' is not a number");
  return v;
}

long parse_long(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(s, &used);
  } catch (const std::exception&) {
    throw InvalidArgument(what + ": '" + s + "' is not an integer");
  }
  if (used != s.size()) throw InvalidArgument(what + ": '" + s + "' is not an integer");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) parts.push_back(cur);
  if (!s.empty() && s.back() == sep) parts.emplace_back();
  return parts;
}

// "kind:args" -> (kind, args); args empty when there is no colon.
std::pair<std::string, std::string> head_tail(const std::string& s) {
  const auto colon = s.find(':');
  if (colon == std::string::npos) return {s, ""};
  return {s.substr(0, colon), s.substr(colon + 1)};
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <typename T>
std::string opt(const std::optional<T>& v) {
  if (!v) return "";
  if constexpr (std::is_floating_point_v<T>)
    return fmt(*v);
  else
    return std::to_string(*v);
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

}  // namespace

double rhs_entry(std::uint64_t draw) { return 4.0 * std::ldexp(static_cast<double>(draw >> 11), -53); }

Rhs make_rhs(const SparseSpdMatrix<double>& a, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  Rhs out;
  out.x_star.resize(a.rows());
  for (Index i = 0; i < a.rows(); ++i) out.x_star[i] = rhs_entry(eng());
  out.b = spmv(a, out.x_star);
  return out;
}

SparseSpdMatrix<double> build_matrix(const std::string& source) {
  const auto [kind, args] = head_tail(source);
  if (kind == "mm") {
    if (args.empty()) throw InvalidArgument("matrix: mm needs a path");
    return read_matrix_market_file(args);
  }
  const auto parts = split(args, ',');
  auto dim = [&](std::size_t i) { return static_cast<Index>(parse_long(parts[i], "matrix " + kind)); };
  if (kind == "poisson2d" && parts.size() == 2) return gen_poisson2d(dim(0), dim(1));
  if (kind == "poisson3d" && parts.size() == 3) return gen_poisson3d(dim(0), dim(1), dim(2));
  if (kind == "aniso3d" && parts.size() == 4)
    return gen_aniso3d(dim(0), dim(1), dim(2), parse_double(parts[3], "aniso3d contrast"));
  if (kind == "skyscraper" && parts.size() == 3)
    return gen_skyscraper(dim(0), dim(1), 1, parse_double(parts[2], "skyscraper contrast"));
  if (kind == "skyscraper" && parts.size() == 4)
    return gen_skyscraper(dim(0), dim(1), dim(2), parse_double(parts[3], "skyscraper contrast"));
  throw InvalidArgument("matrix: cannot parse '" + source + "'");
}

Method parse_method(const std::string& s) {
  if (s == "cg") return Method::Cg;
  if (s == "sre-cg2") return Method::SreCg2;
  if (s == "sre-cg") return Method::SreCg;
  if (s == "msdo-cg") return Method::MsdoCg;
  if (s == "modified-msdo-cg") return Method::ModifiedMsdoCg;
  throw InvalidArgument("unknown method '" + s + "'");
}

Retention parse_retention(const std::string& s) {
  const auto [kind, arg] = head_tail(s);
  if (kind == "full" && arg.empty()) return Retention::full();
  if (kind == "trunc") return Retention::truncated(static_cast<int>(parse_long(arg, "trunc")));
  if (kind == "restart") return Retention::restarted(static_cast<int>(parse_long(arg, "restart")));
  if (kind == "restart-tol") return Retention::restarted_tol(parse_double(arg, "restart-tol"));
  throw InvalidArgument("unknown retention '" + s + "'");
}

PrecondSpec parse_precond(const std::string& s) {
  const auto [kind, arg] = head_tail(s);
  if (kind == "none" && arg.empty()) return {};
  PrecondSpec p;
  if (kind == "bj-chol")
    p.kind = FactorKind::ExactCholesky;
  else if (kind == "bj-ichol0")
    p.kind = FactorKind::IncompleteCholesky0;
  else
    throw InvalidArgument("unknown preconditioner '" + s + "'");
  p.blocks = static_cast<int>(parse_long(arg, kind));
  if (p.blocks < 1) throw InvalidArgument(kind + ": block count must be >= 1");
  return p;
}

PrecondMode parse_precond_mode(const std::string& s) {
  if (s == "modified") return PrecondMode::ModifiedRecurrence;
  if (s == "explicit-hat") return PrecondMode::ExplicitHat;
  throw InvalidArgument("unknown preconditioning mode '" + s + "'");
}

void ExperimentSpec::validate() const {
  if (matrices.empty()) throw InvalidArgument("spec: no matrices");
  if (methods.empty()) throw InvalidArgument("spec: no methods");
  for (const auto& m : methods) parse_method(m);
  for (const auto& r : retention) parse_retention(r);
  for (int v : t)
    if (v < 1) throw InvalidArgument("spec: t must be >= 1");
  for (const auto& s : switch_tol)
    if (s && !(*s > 0 && *s < 1)) throw InvalidArgument("spec: switch_tol must lie in (0, 1)");
  if (!(tol > 0 && tol < 1)) throw InvalidArgument("spec: tol must lie in (0, 1)");
  if (kmax < 0) throw InvalidArgument("spec: kmax must be >= 0");
  parse_precond(precond);
  parse_precond_mode(precond_mode);
  const auto [pk, parg] = head_tail(partition);
  if (!(pk == "contiguous" && parg.empty()) && !(pk == "file" && !parg.empty()))
    throw InvalidArgument("spec: partition must be 'contiguous' or 'file:PATH'");
  bool enlarged = false;
  for (const auto& m : methods) enlarged = enlarged || parse_method(m) != Method::Cg;
  if (enlarged && (t.empty() || retention.empty() || switch_tol.empty()))
    throw InvalidArgument("spec: enlarged methods need t, retention and switch_tol lists");
}

namespace {

template <typename T>
std::vector<T> as_list(const nlohmann::json& j) {
  if (j.is_array()) return j.get<std::vector<T>>();
  return {j.get<T>()};
}

}  // namespace

ExperimentSpec spec_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InvalidArgument("spec: expected a JSON object");
  static const std::vector<std::string> known{"matrix", "matrices", "partition", "method", "methods", "t",
                                               "retention", "switch_tol", "tol", "kmax", "precond",
                                               "precond_mode", "seed", "out"};
  for (const auto& item : j.items())
    if (std::find(known.begin(), known.end(), item.key()) == known.end())
      throw InvalidArgument("spec: unknown key '" + item.key() + "'");
  ExperimentSpec s;
  try {
    if (j.contains("matrix")) s.matrices = as_list<std::string>(j.at("matrix"));
    if (j.contains("matrices")) s.matrices = as_list<std::string>(j.at("matrices"));
    if (j.contains("partition")) s.partition = j.at("partition").get<std::string>();
    if (j.contains("method")) s.methods = as_list<std::string>(j.at("method"));
    if (j.contains("methods")) s.methods = as_list<std::string>(j.at("methods"));
    if (j.contains("t")) s.t = as_list<int>(j.at("t"));
    if (j.contains("retention")) s.retention = as_list<std::string>(j.at("retention"));
    if (j.contains("switch_tol")) {
      s.switch_tol.clear();
      const auto& st = j.at("switch_tol");
      const auto items = st.is_array() ? st : nlohmann::json::array({st});
      for (const auto& v : items) s.switch_tol.push_back(v.is_null() ? std::nullopt : std::optional(v.get<double>()));
    }
    if (j.contains("tol")) s.tol = j.at("tol").get<double>();
    if (j.contains("kmax")) s.kmax = j.at("kmax").get<int>();
    if (j.contains("precond")) s.precond = j.at("precond").get<std::string>();
    if (j.contains("precond_mode")) s.precond_mode = j.at("precond_mode").get<std::string>();
    if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("out")) s.out = j.at("out").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("spec: ") + e.what());
  }
  s.validate();
  return s;
}

nlohmann::json spec_to_json(const ExperimentSpec& s) {
  nlohmann::json st = nlohmann::json::array();
  for (const auto& v : s.switch_tol) st.push_back(v ? nlohmann::json(*v) : nlohmann::json(nullptr));
  return {{"matrices", s.matrices}, {"partition", s.partition}, {"methods", s.methods},
          {"t", s.t},               {"retention", s.retention}, {"switch_tol", st},
          {"tol", s.tol},           {"kmax", s.kmax},           {"precond", s.precond},
          {"precond_mode", s.precond_mode}, {"seed", s.seed},  {"out", s.out}};
}

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols{
      "run_id",          "matrix",           "n",
      "method",          "t",                "policy",
      "trunc",           "restart_j",        "restart_tol",
      "switch_tol",      "precond",          "precond_mode",
      "partition",       "tol",              "kmax",
      "seed",            "iterations",       "status",
      "switch_iteration", "restart_count",   "peak_block_vectors",
      "final_relative_residual", "true_relative_residual", "relative_error",
      "wall_time_s"};
  return cols;
}

void write_csv_header(std::ostream& out) {
  const auto& cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
}

void write_csv_row(std::ostream& out, const RunRow& r) {
  out << r.run_id << ',' << csv_escape(r.matrix) << ',' << r.n << ',' << r.method << ',' << opt(r.t) << ','
      << csv_escape(r.policy) << ',' << opt(r.trunc) << ',' << opt(r.restart_j) << ',' << opt(r.restart_tol) << ','
      << opt(r.switch_tol) << ',' << r.precond << ',' << r.precond_mode << ',' << csv_escape(r.partition) << ','
      << fmt(r.tol) << ',' << r.kmax << ',' << r.seed << ',' << r.iterations << ',' << csv_escape(r.status) << ','
      << opt(r.switch_iteration) << ',' << r.restart_count << ',' << r.peak_block_vectors << ','
      << fmt(r.final_relative_residual) << ',' << fmt(r.true_relative_residual) << ',' << opt(r.relative_error)
      << ',' << fmt(r.wall_time_s) << '\n';
}

void write_history(std::ostream& out, const RunRow& r) {
  out << "iteration\trho\ttol1\n";
  const auto& h = r.residual_history;
  for (std::size_t k = 0; k < h.size(); ++k) {
    out << k << '\t' << fmt(h[k]) << '\t';
    if (k > 0 && h.front() > 0) out << fmt(std::abs(h[k] - h[k - 1]) / h.front());
    out << '\n';
  }
}

std::vector<RunRow> run_rows(const ExperimentSpec& spec) {
  spec.validate();
  const PrecondSpec pspec = parse_precond(spec.precond);
  const PrecondMode pmode = parse_precond_mode(spec.precond_mode);
  std::vector<RunRow> rows;
  int next_id = 0;

  for (const auto& source : spec.matrices) {
    // Everything that can fail per matrix is captured and turned into error rows.
    std::unique_ptr<SparseSpdMatrix<double>> a;
    std::unique_ptr<BlockJacobiFactor<double>> factor;
    std::unique_ptr<Partition> file_partition;
    std::optional<std::string> setup_error;
    Rhs rhs;
    int kmax = spec.kmax;
    try {
      a = std::make_unique<SparseSpdMatrix<double>>(build_matrix(source));
      rhs = make_rhs(*a, spec.seed);
      if (pspec.kind) factor = std::make_unique<BlockJacobiFactor<double>>(build_bj(*a, pspec.blocks, *pspec.kind));
      const auto [pk, parg] = head_tail(spec.partition);
      if (pk == "file") {
        std::ifstream in(parg);
        if (!in) throw ParseError("cannot open partition file " + parg);
        file_partition = std::make_unique<Partition>(read_partition(in));
        if (file_partition->size() != a->rows()) throw DimensionMismatch("partition file does not match the matrix");
      }
      if (kmax == 0) {
        SolverConfig<double> probe;
        probe.tol = spec.tol;
        probe.kmax = static_cast<int>(std::max<Index>(10 * a->rows(), 1000));
        const auto res = cg(*a, rhs.b, Vector<double>(Vector<double>::Zero(a->rows())), probe);
        kmax = std::max(10, 2 * res.report.iterations);
      }
    } catch (const std::exception& e) {
      setup_error = e.what();
    }

    auto emit = [&](const std::string& method_name, std::optional<int> t, const std::string& policy,
                    std::optional<double> switch_tol) {
      RunRow row;
      char id[32];
      std::snprintf(id, sizeof id, "run_%04d", next_id++);
      row.run_id = id;
      row.matrix = source;
      row.n = a ? a->rows() : 0;
      row.method = method_name;
      row.t = t;
      row.policy = policy;
      row.switch_tol = switch_tol;
      row.precond = spec.precond;
      row.precond_mode = pspec.kind ? spec.precond_mode : "";
      row.partition = t ? spec.partition : "";
      row.tol = spec.tol;
      row.kmax = kmax;
      row.seed = spec.seed;
      const auto start = std::chrono::steady_clock::now();
      try {
        if (setup_error) throw std::runtime_error(*setup_error);
        const Retention ret = parse_retention(policy);
        if (ret.kind == RetentionKind::Truncated) row.trunc = ret.trunc;
        if (ret.kind == RetentionKind::RestartFixed) row.restart_j = ret.restart_every;
        if (ret.kind == RetentionKind::RestartTol) row.restart_tol = ret.restart_tol;
        SolverConfig<double> cfg;
        cfg.method = parse_method(method_name);
        cfg.t = t.value_or(1);
        cfg.tol = spec.tol;
        cfg.kmax = kmax;
        cfg.retention = ret;
        cfg.switch_tol = switch_tol;
        cfg.preconditioner = factor.get();
        cfg.precond_mode = pmode;
        cfg.exact_solution = &rhs.x_star;
        const Vector<double> x0 = Vector<double>::Zero(a->rows());
        const Partition p = file_partition ? *file_partition : contiguous_partition(a->rows(), cfg.t);
        const auto res = cfg.method == Method::Cg ? cg(*a, rhs.b, x0, cfg) : enlarged_solve(*a, rhs.b, x0, p, cfg);
        const auto& rep = res.report;
        row.iterations = rep.iterations;
        row.status = to_string(rep.status);
        row.switch_iteration = rep.switch_iteration;
        row.restart_count = static_cast<int>(rep.restart_iterations.size());
        row.peak_block_vectors = rep.peak_block_vectors;
        row.final_relative_residual = rep.final_relative_residual();
        row.true_relative_residual = rep.true_relative_residual;
        row.relative_error = rep.relative_error;
        row.residual_history = rep.residual_history;
      } catch (const std::exception& e) {
        row.status = std::string("error: ") + e.what();
      }
      row.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      rows.push_back(std::move(row));
    };

    for (const auto& method : spec.methods) {
      if (method == "cg") {
        emit(method, std::nullopt, "full", std::nullopt);
        continue;
      }
      for (int t : spec.t)
        for (const auto& policy : spec.retention)
          for (const auto& st : spec.switch_tol) emit(method, t, policy, st);
    }
  }
  return rows;
}

std::vector<RunRow> run_experiment(const ExperimentSpec& spec) {
  auto rows = run_rows(spec);
  namespace fs = std::filesystem;
  const fs::path out(spec.out);
  fs::create_directories(out / "history");
  std::ofstream csv(out / "results.csv");
  if (!csv) throw ParseError("cannot write " + (out / "results.csv").string());
  write_csv_header(csv);
  for (const auto& row : rows) {
    write_csv_row(csv, row);
    std::ofstream hist(out / "history" / (row.run_id + ".tsv"));
    write_history(hist, row);
  }
  return rows;
}

}  // namespace ekcg::harness
