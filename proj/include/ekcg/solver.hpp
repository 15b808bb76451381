#pragma once

// Classical CG and the enlarged Krylov CG family.
//
// A single engine drives every enlarged method. Per iteration it
//   1. picks a new block: a fresh split of the residual (first iteration,
//      after a restart, at the flexible switch) or the method's direction rule;
//   2. A-orthonormalizes it against the retained basis (two-pass block CGS)
//      and against itself (Pre-CholQR);
//   3. applies the Petrov-Galerkin update
//        alpha = Wᵀ r,  x += W alpha,  r -= (A W) alpha;
//   4. appends (W, A W) to the basis store and applies the retention policy.
//
// Split block-Jacobi preconditioning changes only step 1 (how blocks are
// built) in the default mode; the explicit mode runs the same engine on
// L⁻¹ A L⁻ᵀ instead.

#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ekcg/aortho.hpp"
#include "ekcg/core.hpp"
#include "ekcg/partition.hpp"
#include "ekcg/preconditioner.hpp"

namespace ekcg {

enum class Method { Cg, SreCg2, SreCg, MsdoCg, ModifiedMsdoCg };

enum class RetentionKind { Full, Truncated, RestartFixed, RestartTol };

struct Retention {
  RetentionKind kind = RetentionKind::Full;
  int trunc = 0;            // Truncated: number of previous blocks kept
  int restart_every = 0;    // RestartFixed: cycle length j
  double restart_tol = 0;   // RestartTol: threshold on |rho_k - rho_{k-1}| / rho_0

  static Retention full() { return {}; }
  static Retention truncated(int trunc) { return {RetentionKind::Truncated, trunc, 0, 0.0}; }
  static Retention restarted(int j) { return {RetentionKind::RestartFixed, 0, j, 0.0}; }
  static Retention restarted_tol(double tol) { return {RetentionKind::RestartTol, 0, 0, tol}; }
};

enum class PrecondMode { ModifiedRecurrence, ExplicitHat };

enum class Status { Converged, MaxIter, Breakdown, Stagnated };

inline const char* to_string(Method m) {
  switch (m) {
    case Method::Cg: return "cg";
    case Method::SreCg2: return "sre-cg2";
    case Method::SreCg: return "sre-cg";
    case Method::MsdoCg: return "msdo-cg";
    case Method::ModifiedMsdoCg: return "modified-msdo-cg";
  }
  return "?";
}

inline const char* to_string(Status s) {
  switch (s) {
    case Status::Converged: return "converged";
    case Status::MaxIter: return "maxiter";
    case Status::Breakdown: return "breakdown";
    case Status::Stagnated: return "stagnated";
  }
  return "?";
}

inline const char* to_string(PrecondMode m) {
  return m == PrecondMode::ModifiedRecurrence ? "modified" : "explicit-hat";
}

inline std::string to_string(const Retention& r) {
  switch (r.kind) {
    case RetentionKind::Full: return "full";
    case RetentionKind::Truncated: return "trunc:" + std::to_string(r.trunc);
    case RetentionKind::RestartFixed: return "restart:" + std::to_string(r.restart_every);
    case RetentionKind::RestartTol: {
      char buf[64];
      std::snprintf(buf, sizeof buf, "restart-tol:%g", r.restart_tol);
      return buf;
    }
  }
  return "?";
}

/// State handed to an observer after every iteration.
///
/// In explicit-hat mode all quantities live in the transformed space.
template <typename Scalar>
struct IterationView {
  int k;
  const Block<Scalar>& block;      // W_k after orthonormalization
  const Block<Scalar>& op_block;   // A W_k
  const Block<Scalar>& basis;      // retained basis including W_k
  const Block<Scalar>& op_basis;   // A times the retained basis
  const Vector<Scalar>& x;
  const Vector<Scalar>& r;
  Scalar rho;
  bool fresh_block;                // block was a residual split (start, restart or switch)
};

template <typename Scalar>
struct SolverConfig {
  Method method = Method::SreCg2;
  int t = 1;
  double tol = 1e-8;
  int kmax = 1000;
  Retention retention{};
  std::optional<double> switch_tol{};
  const BlockJacobiFactor<Scalar>* preconditioner = nullptr;
  PrecondMode precond_mode = PrecondMode::ModifiedRecurrence;
  double breakdown_tol = 1e-14;
  /// Project with the cached A·Q instead of re-applying A in each CGS pass.
  bool cache_aq = true;
  int true_residual_every = 50;
  /// Under fixed-cycle restarts, stop when the best residual has not
  /// improved for max(1, kmax/10) iterations.
  bool stagnation_guard = true;
  /// Known exact solution, used only for the reported relative error.
  const Vector<Scalar>* exact_solution = nullptr;
  std::function<void(const IterationView<Scalar>&)> observer{};

  void validate() const {
    if (t < 1) throw InvalidArgument("t must be >= 1");
    if (kmax < 1) throw InvalidArgument("kmax must be >= 1");
    if (!(tol > 0 && tol < 1)) throw InvalidArgument("tol must lie in (0, 1)");
    if (switch_tol) {
      if (!(*switch_tol > 0 && *switch_tol < 1)) throw InvalidArgument("switchTol must lie in (0, 1)");
      if (t < 2 || t % 2 != 0) throw InvalidArgument("the flexible switch needs an even t");
    }
    switch (retention.kind) {
      case RetentionKind::Full: break;
      case RetentionKind::Truncated:
        if (retention.trunc < 2) throw InvalidArgument("trunc must be >= 2");
        break;
      case RetentionKind::RestartFixed:
        if (retention.restart_every < 1) throw InvalidArgument("restart cycle must be >= 1");
        break;
      case RetentionKind::RestartTol:
        if (!(retention.restart_tol > 0 && retention.restart_tol < 1))
          throw InvalidArgument("restartTol must lie in (0, 1)");
        break;
    }
    if (method == Method::SreCg && retention.kind != RetentionKind::Full &&
        !(retention.kind == RetentionKind::Truncated && retention.trunc == 2))
      throw InvalidArgument("sre-cg is truncated(2) retention by definition");
  }
};

struct ConvergenceReport {
  Status status = Status::MaxIter;
  int iterations = 0;
  /// rho_0, rho_1, ... of the recurrence residual.
  std::vector<double> residual_history;
  std::optional<int> switch_iteration;
  std::vector<int> restart_iterations;
  /// Basis vectors (length-n columns) held at the peak, new block included.
  Index peak_block_vectors = 0;
  /// Blocks held at the peak, new block included.
  int peak_blocks = 0;
  /// Width of the block added at each iteration.
  std::vector<int> block_widths;
  /// (iteration, ||b - A x||) recomputed explicitly.
  std::vector<std::pair<int, double>> true_residuals;
  double true_relative_residual = std::numeric_limits<double>::quiet_NaN();
  std::optional<double> relative_error;
  std::vector<std::string> notes;

  double final_relative_residual() const {
    return residual_history.empty() || residual_history.front() == 0
               ? 0.0
               : residual_history.back() / residual_history.front();
  }
};

template <typename Scalar>
struct SolveResult {
  Vector<Scalar> x;
  ConvergenceReport report;
};

namespace detail {

// How blocks and residual measurements are formed; the identity choice gives
// the unpreconditioned methods.
template <typename Scalar>
struct Hooks {
  // Fresh block from the residual on a partition.
  std::function<Block<Scalar>(const Vector<Scalar>&, const Partition&)> split;
  // Next power block from A W_{k-1}.
  std::function<Block<Scalar>(const Block<Scalar>&)> power;
  // M⁻¹ r.
  std::function<Vector<Scalar>(const Vector<Scalar>&)> precondition;
  // Norm of the residual of the original system.
  std::function<Scalar(const Vector<Scalar>&)> residual_norm;
  // ||b - A x|| of the original system from the engine's iterate.
  std::function<Scalar(const Vector<Scalar>&)> true_residual;
};

template <typename Scalar>
Hooks<Scalar> plain_hooks(const SparseSpdMatrix<Scalar>& a, const Vector<Scalar>& b) {
  Hooks<Scalar> h;
  h.split = [](const Vector<Scalar>& r, const Partition& p) { return project_t(r, p); };
  h.power = [](const Block<Scalar>& aw) { return aw; };
  h.precondition = [](const Vector<Scalar>& r) { return r; };
  h.residual_norm = [](const Vector<Scalar>& r) { return r.norm(); };
  h.true_residual = [&a, &b](const Vector<Scalar>& x) { return (b - spmv(a, x)).norm(); };
  return h;
}

// Retained A-orthonormal basis together with its image under the operator.
template <typename Scalar>
class BasisStore {
 public:
  explicit BasisStore(Index n) : q_(n, 0), aq_(n, 0) {}

  const Block<Scalar>& q() const { return q_; }
  const Block<Scalar>& aq() const { return aq_; }
  int blocks() const { return static_cast<int>(widths_.size()); }
  Index vectors() const { return q_.cols(); }

  void clear() {
    q_.resize(q_.rows(), 0);
    aq_.resize(aq_.rows(), 0);
    widths_.clear();
  }

  void append(const Block<Scalar>& w, const Block<Scalar>& aw) {
    const Index c = q_.cols();
    q_.conservativeResize(Eigen::NoChange, c + w.cols());
    aq_.conservativeResize(Eigen::NoChange, c + w.cols());
    q_.rightCols(w.cols()) = w;
    aq_.rightCols(w.cols()) = aw;
    widths_.push_back(static_cast<int>(w.cols()));
  }

  /// Keeps only the last `keep` blocks.
  void keep_last(int keep) {
    if (blocks() <= keep) return;
    Index drop = 0;
    while (blocks() > keep) {
      drop += widths_.front();
      widths_.erase(widths_.begin());
    }
    q_ = q_.rightCols(q_.cols() - drop).eval();
    aq_ = aq_.rightCols(aq_.cols() - drop).eval();
  }

 private:
  Block<Scalar> q_;
  Block<Scalar> aq_;
  std::vector<int> widths_;
};

template <typename Scalar>
void finish_report(ConvergenceReport& rep, const Vector<Scalar>& x_orig, Scalar true_res, Scalar rho0,
                   const SolverConfig<Scalar>& cfg) {
  rep.true_residuals.emplace_back(rep.iterations, static_cast<double>(true_res));
  rep.true_relative_residual = rho0 > Scalar(0) ? static_cast<double>(true_res / rho0) : 0.0;
  if (cfg.exact_solution) {
    const Scalar nx = cfg.exact_solution->norm();
    const Scalar err = (x_orig - *cfg.exact_solution).norm();
    rep.relative_error = static_cast<double>(nx > Scalar(0) ? err / nx : err);
  }
}

template <SpdOperator Op>
Vector<typename Op::Scalar> run_cg(const Op& op, const Vector<typename Op::Scalar>& b,
                                   Vector<typename Op::Scalar> x,
                                   const SolverConfig<typename Op::Scalar>& cfg,
                                   const Hooks<typename Op::Scalar>& hooks, ConvergenceReport& rep) {
  using Scalar = typename Op::Scalar;
  Vector<Scalar> r = b - op.apply(Block<Scalar>(x)).col(0);
  const Scalar rho0 = hooks.residual_norm(r);
  rep.residual_history.push_back(static_cast<double>(rho0));
  rep.peak_block_vectors = 1;
  rep.peak_blocks = 1;
  if (rho0 == Scalar(0)) {
    rep.status = Status::Converged;
    return x;
  }
  Vector<Scalar> z = hooks.precondition(r);
  Vector<Scalar> p = z;
  Scalar rz = r.dot(z);
  Scalar rho = rho0;
  rep.status = Status::MaxIter;
  for (int k = 1; k <= cfg.kmax && rho > Scalar(cfg.tol) * rho0; ++k) {
    const Vector<Scalar> ap = op.apply(Block<Scalar>(p)).col(0);
    const Scalar pap = p.dot(ap);
    if (!(pap > Scalar(0))) {
      rep.status = Status::Breakdown;
      rep.notes.push_back("cg: nonpositive curvature pᵀAp at iteration " + std::to_string(k));
      break;
    }
    const Scalar alpha = rz / pap;
    x += alpha * p;
    r -= alpha * ap;
    rho = hooks.residual_norm(r);
    rep.iterations = k;
    rep.residual_history.push_back(static_cast<double>(rho));
    rep.block_widths.push_back(1);
    if (cfg.true_residual_every > 0 && k % cfg.true_residual_every == 0)
      rep.true_residuals.emplace_back(k, static_cast<double>(hooks.true_residual(x)));
    z = hooks.precondition(r);
    const Scalar rz_next = r.dot(z);
    p = z + (rz_next / rz) * p;
    rz = rz_next;
  }
  if (rho <= Scalar(cfg.tol) * rho0) rep.status = Status::Converged;
  return x;
}

template <SpdOperator Op>
Vector<typename Op::Scalar> run_enlarged(const Op& op, const Vector<typename Op::Scalar>& b,
                                         Vector<typename Op::Scalar> x, const Partition& partition,
                                         const SolverConfig<typename Op::Scalar>& cfg,
                                         const Hooks<typename Op::Scalar>& hooks, ConvergenceReport& rep) {
  using Scalar = typename Op::Scalar;
  const Index n = op.rows();
  Retention retention = cfg.retention;
  if (cfg.method == Method::SreCg) retention = Retention::truncated(2);

  Vector<Scalar> r = b - op.apply(Block<Scalar>(x)).col(0);
  const Scalar rho0 = hooks.residual_norm(r);
  rep.residual_history.push_back(static_cast<double>(rho0));
  if (rho0 == Scalar(0)) {
    rep.status = Status::Converged;
    return x;
  }

  BasisStore<Scalar> store(n);
  Partition current = partition;
  Block<Scalar> prev_w;
  Block<Scalar> prev_aw;
  Scalar rho_prev = rho0;
  Scalar rho = rho0;
  // |rho_{k-1} - rho_{k-2}| / rho_0; starts above any tolerance.
  Scalar tol1 = Scalar(1);
  bool switched = false;
  int last_restart = -2;
  Scalar best_rho = rho0;
  int best_at = 0;
  const int stagnation_window = std::max(1, cfg.kmax / 10);
  rep.status = Status::MaxIter;

  for (int k = 1; k <= cfg.kmax && rho > Scalar(cfg.tol) * rho0; ++k) {
    bool fresh = (k == 1);
    if (k > 1) {
      bool restart = false;
      if (retention.kind == RetentionKind::RestartFixed)
        restart = (k % retention.restart_every == 1) || retention.restart_every == 1;
      else if (retention.kind == RetentionKind::RestartTol)
        restart = tol1 < Scalar(retention.restart_tol) && last_restart != k - 1;
      if (restart) {
        store.clear();
        rep.restart_iterations.push_back(k);
        last_restart = k;
        fresh = true;
      }
      if (cfg.switch_tol && !switched && tol1 < Scalar(*cfg.switch_tol)) {
        current = halve(current);
        switched = true;
        rep.switch_iteration = k;
        fresh = true;
      }
    }

    Block<Scalar> w;
    if (fresh) {
      w = hooks.split(r, current);
    } else {
      switch (cfg.method) {
        case Method::SreCg2:
        case Method::SreCg: w = hooks.power(prev_aw); break;
        case Method::ModifiedMsdoCg: w = hooks.split(r, current); break;
        case Method::MsdoCg: {
          const Vector<Scalar> beta = -(prev_aw.transpose() * hooks.precondition(r));
          w = hooks.split(r, current);
          w.noalias() += prev_w * beta.asDiagonal();
          break;
        }
        case Method::Cg: throw InvalidArgument("run_enlarged: cg is not an enlarged method");
      }
    }

    Block<Scalar> aw;
    try {
      if (store.vectors() > 0)
        w = cfg.cache_aq ? a_orthogonalize_against_cached(std::move(w), store.q(), store.aq())
                         : a_orthogonalize_against(op, std::move(w), store.q());
      w = pre_cholqr(op, w, cfg.breakdown_tol);
      aw = op.apply(w);
    } catch (const Breakdown& e) {
      rep.status = Status::Breakdown;
      rep.notes.push_back("iteration " + std::to_string(k) + ": " + e.what());
      break;
    }

    const Vector<Scalar> alpha = w.transpose() * r;
    x.noalias() += w * alpha;
    r.noalias() -= aw * alpha;
    rho_prev = rho;
    rho = hooks.residual_norm(r);
    tol1 = std::abs(rho - rho_prev) / rho0;
    rep.iterations = k;
    rep.residual_history.push_back(static_cast<double>(rho));
    rep.block_widths.push_back(static_cast<int>(w.cols()));

    store.append(w, aw);
    rep.peak_blocks = std::max(rep.peak_blocks, store.blocks());
    rep.peak_block_vectors = std::max(rep.peak_block_vectors, store.vectors());
    if (cfg.observer) cfg.observer(IterationView<Scalar>{k, w, aw, store.q(), store.aq(), x, r, rho, fresh});
    if (retention.kind == RetentionKind::Truncated) store.keep_last(retention.trunc);

    prev_w = std::move(w);
    prev_aw = std::move(aw);

    if (!std::isfinite(static_cast<double>(rho))) {
      rep.status = Status::Breakdown;
      rep.notes.push_back("iteration " + std::to_string(k) + ": non-finite residual");
      break;
    }
    if (cfg.true_residual_every > 0 && k % cfg.true_residual_every == 0)
      rep.true_residuals.emplace_back(k, static_cast<double>(hooks.true_residual(x)));
    if (rho < best_rho) {
      best_rho = rho;
      best_at = k;
    } else if (cfg.stagnation_guard && retention.kind == RetentionKind::RestartFixed &&
               k - best_at >= stagnation_window) {
      rep.status = Status::Stagnated;
      break;
    }
  }
  if (rep.status != Status::Breakdown && rep.status != Status::Stagnated && rho <= Scalar(cfg.tol) * rho0)
    rep.status = Status::Converged;
  return x;
}

}  // namespace detail

/// Hestenes-Stiefel CG; with a preconditioner in the config this is the
/// split-preconditioned variant.
template <typename Scalar>
SolveResult<Scalar> cg(const SparseSpdMatrix<Scalar>& a, const Vector<Scalar>& b, const Vector<Scalar>& x0,
                       SolverConfig<Scalar> cfg);

template <typename Scalar>
SolveResult<Scalar> enlarged_solve_preconditioned(const SparseSpdMatrix<Scalar>& a, const Vector<Scalar>& b,
                                                  const Vector<Scalar>& x0, const Partition& partition,
                                                  const SolverConfig<Scalar>& cfg);

/// Runs the configured method. CG ignores the partition.
template <typename Scalar>
SolveResult<Scalar> enlarged_solve(const SparseSpdMatrix<Scalar>& a, const Vector<Scalar>& b,
                                   const Vector<Scalar>& x0, const Partition& partition,
                                   const SolverConfig<Scalar>& cfg) {
  cfg.validate();
  if (b.size() != a.rows() || x0.size() != a.rows())
    throw DimensionMismatch("enlarged_solve: b or x0 does not match the matrix");
  if (!b.allFinite()) throw InvalidArgument("enlarged_solve: right-hand side is not finite");
  if (cfg.preconditioner) return enlarged_solve_preconditioned(a, b, x0, partition, cfg);
  if (cfg.method == Method::Cg) return cg(a, b, x0, cfg);
  if (partition.size() != a.rows()) throw DimensionMismatch("enlarged_solve: partition does not match the matrix");
  if (partition.count() != cfg.t)
    throw InvalidArgument("enlarged_solve: partition has " + std::to_string(partition.count()) +
                          " subdomains but t = " + std::to_string(cfg.t));

  SolveResult<Scalar> out;
  const auto hooks = detail::plain_hooks(a, b);
  out.x = detail::run_enlarged(a, b, x0, partition, cfg, hooks, out.report);
  detail::finish_report(out.report, out.x, hooks.true_residual(out.x),
                        static_cast<Scalar>(out.report.residual_history.front()), cfg);
  return out;
}

namespace detail {

template <typename Scalar>
Hooks<Scalar> modified_hooks(const SparseSpdMatrix<Scalar>& a, const Vector<Scalar>& b,
                             const BlockJacobiFactor<Scalar>& f, ConvergenceReport& rep) {
  Hooks<Scalar> h;
  auto fine = std::make_shared<Partition>(f.as_partition());
  h.split = [&f, fine, &rep, noted = false](const Vector<Scalar>& r, const Partition& p) mutable {
    // With every preconditioner block inside one subdomain, T(L⁻¹r) = L⁻¹T(r).
    if (refines(*fine, p)) return apply_minv(f, project_t(r, p));
    if (!noted) {
      rep.notes.push_back("preconditioner blocks do not align with the " + std::to_string(p.count()) +
                          "-way partition; using explicit split application");
      noted = true;
    }
    return backward_solve(f, Block<Scalar>(project_t(forward_solve(f, r), p)));
  };
  h.power = [&f](const Block<Scalar>& aw) { return apply_minv(f, aw); };
  h.precondition = [&f](const Vector<Scalar>& r) { return apply_minv(f, r); };
  h.residual_norm = [](const Vector<Scalar>& r) { return r.norm(); };
  h.true_residual = [&a, &b](const Vector<Scalar>& x) { return (b - spmv(a, x)).norm(); };
  return h;
}

}  // namespace detail

/// Split block-Jacobi preconditioned solve.
///
/// ModifiedRecurrence keeps the unpreconditioned recurrences and builds
/// preconditioned blocks Z_k. ExplicitHat runs on L⁻¹AL⁻ᵀ and maps the
/// iterate back with L⁻ᵀ; its residual history is reported in terms of the
/// original residual L r̂ so the two modes are directly comparable.
template <typename Scalar>
SolveResult<Scalar> enlarged_solve_preconditioned(const SparseSpdMatrix<Scalar>& a, const Vector<Scalar>& b,
                                                  const Vector<Scalar>& x0, const Partition& partition,
                                                  const SolverConfig<Scalar>& cfg) {
  cfg.validate();
  if (!cfg.preconditioner) throw InvalidArgument("enlarged_solve_preconditioned: no preconditioner configured");
  const BlockJacobiFactor<Scalar>& f = *cfg.preconditioner;
  if (f.rows() != a.rows()) throw DimensionMismatch("preconditioner does not match the matrix");
  if (b.size() != a.rows() || x0.size() != a.rows())
    throw DimensionMismatch("enlarged_solve_preconditioned: b or x0 does not match the matrix");
  const bool enlarged = cfg.method != Method::Cg;
  if (enlarged && (partition.size() != a.rows() || partition.count() != cfg.t))
    throw InvalidArgument("enlarged_solve_preconditioned: partition does not match n or t");

  SolveResult<Scalar> out;
  auto& rep = out.report;
  if (cfg.precond_mode == PrecondMode::ModifiedRecurrence) {
    const auto hooks = detail::modified_hooks(a, b, f, rep);
    out.x = enlarged ? detail::run_enlarged(a, b, x0, partition, cfg, hooks, rep)
                     : detail::run_cg(a, b, x0, cfg, hooks, rep);
    detail::finish_report(rep, out.x, hooks.true_residual(out.x), static_cast<Scalar>(rep.residual_history.front()),
                          cfg);
    return out;
  }

  const SplitPreconditionedOperator<Scalar> op(a, f);
  const Vector<Scalar> b_hat = forward_solve(f, b);
  const Vector<Scalar> x0_hat = multiply_l_transpose(f, Block<Scalar>(x0)).col(0);
  detail::Hooks<Scalar> hooks;
  hooks.split = [](const Vector<Scalar>& r, const Partition& p) { return project_t(r, p); };
  hooks.power = [](const Block<Scalar>& aw) { return aw; };
  hooks.precondition = [](const Vector<Scalar>& r) { return r; };
  hooks.residual_norm = [&f](const Vector<Scalar>& r_hat) {
    return multiply_l(f, Block<Scalar>(r_hat)).norm();
  };
  hooks.true_residual = [&a, &b, &f](const Vector<Scalar>& x_hat) {
    return (b - spmv(a, backward_solve(f, x_hat))).norm();
  };
  const Vector<Scalar> x_hat = enlarged ? detail::run_enlarged(op, b_hat, x0_hat, partition, cfg, hooks, rep)
                                        : detail::run_cg(op, b_hat, x0_hat, cfg, hooks, rep);
  out.x = backward_solve(f, x_hat);
  detail::finish_report(rep, out.x, hooks.true_residual(x_hat), static_cast<Scalar>(rep.residual_history.front()),
                        cfg);
  return out;
}

template <typename Scalar>
SolveResult<Scalar> cg(const SparseSpdMatrix<Scalar>& a, const Vector<Scalar>& b, const Vector<Scalar>& x0,
                       SolverConfig<Scalar> cfg) {
  cfg.method = Method::Cg;
  cfg.switch_tol.reset();
  cfg.retention = Retention::full();
  cfg.validate();
  if (b.size() != a.rows() || x0.size() != a.rows()) throw DimensionMismatch("cg: b or x0 does not match the matrix");
  if (cfg.preconditioner) return enlarged_solve_preconditioned(a, b, x0, contiguous_partition(a.rows(), 1), cfg);
  SolveResult<Scalar> out;
  const auto hooks = detail::plain_hooks(a, b);
  out.x = detail::run_cg(a, b, x0, cfg, hooks, out.report);
  detail::finish_report(out.report, out.x, hooks.true_residual(out.x),
                        static_cast<Scalar>(out.report.residual_history.front()), cfg);
  return out;
}

/// Overload with the contiguous t-way partition.
template <typename Scalar>
SolveResult<Scalar> enlarged_solve(const SparseSpdMatrix<Scalar>& a, const Vector<Scalar>& b,
                                   const Vector<Scalar>& x0, const SolverConfig<Scalar>& cfg) {
  return enlarged_solve(a, b, x0, contiguous_partition(a.rows(), cfg.method == Method::Cg ? 1 : cfg.t), cfg);
}

}  // namespace ekcg
