#pragma once

// Time stepping for the three method variants. One step on interval
// (t_n, t_{n+1}] solves the coupled stage system
//
//   U_{n,i} = e^{-c_i h A} U_n + h sum_j a_ij(-hA) G_{n,j},
//   G_{n,j} = g(t_{n,j}, U_{n,j}, X(t_{n,j} - tau(t_{n,j}))),
//
// by fixed-point iteration started from the predictor e^{-c_i h A} U_n,
// followed by the node update U_{n+1} = e^{-hA} U_n + h sum_i b_i(-hA) G_{n,i}.
// X is the method's continuous extension (interpolant, dense output, or
// mesh-node interpolant). Delayed arguments never reach into the current
// interval when h <= tau0, so the delayed values are evaluated once per step
// and held fixed across the iteration.
//
// After convergence the stages are recomputed once from the final G values;
// the stored stages therefore satisfy the stage formulas with the stored G
// exactly, which makes the dense output reproduce them at theta = c_i, 1
// without any iteration slack.
//
// All operator actions run in the eigenbasis; the scalar coefficient tables
// e^{-theta h lambda}, b_j(c_i; -h lambda), b_i(1; -h lambda) are cached per
// distinct step size.

#include <chrono>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "erkc/delay.hpp"
#include "erkc/history.hpp"
#include "erkc/operators.hpp"
#include "erkc/phi.hpp"
#include "erkc/problems.hpp"

namespace erkc {

enum class Method { erkc_i, erkc_c, merkc_i };

inline std::string method_name(Method m) {
  switch (m) {
    case Method::erkc_i: return "erkc-i";
    case Method::erkc_c: return "erkc-c";
    case Method::merkc_i: return "merkc-i";
  }
  return "?";
}

struct MethodConfig {
  Method method;
  CollocationScheme scheme;
  double fp_tol = 1e-12;
  int fp_max_iter = 100;
  bool keep_nodes = true;           // keep all node values in the result
  bool keep_stage_records = false;  // keep per-step stage / G snapshots
  bool prune_history = false;       // drop unreachable history records
};

struct StepRecord {
  int interval = 0;
  int iterations = 0;
  std::vector<StateVector> stages;
  std::vector<StateVector> stage_g;
};

struct RunReport {
  std::vector<int> iterations;  // fixed-point iterations per interval
  double wall_seconds = 0.0;
  RatioStats ratio;
  double max_step = 0.0;
  std::vector<std::string> warnings;
};

struct RunResult {
  std::shared_ptr<const Mesh> mesh;
  std::shared_ptr<const CollocationScheme> scheme;
  std::shared_ptr<const DiagonalizableOperator> op;
  std::vector<double> times;
  std::vector<StateVector> node_values;  // filled when keep_nodes
  StateVector final_value;
  RunReport report;
  std::vector<StepRecord> steps;  // iteration counts; stages when requested
  std::shared_ptr<InterpolantStore> interpolant;  // erkc-i
  std::shared_ptr<DenseOutputStore> dense;        // erkc-c
  std::shared_ptr<MeshNodeStore> node_store;      // merkc-i
};

// True iff every delayed stage argument stays at or before the interval's
// left node, i.e. t_{n,i} - tau(t_{n,i}) <= t_n for all n, i.
inline bool verify_no_future_reference(const ProblemSpec& problem, const Mesh& mesh,
                                       const CollocationScheme& scheme) {
  for (int n = 0; n < mesh.intervals(); ++n) {
    const double tn = mesh.node(n);
    const double h = mesh.step(n);
    for (int i = 0; i < scheme.size(); ++i) {
      const double ti = tn + scheme.node(i) * h;
      if (problem.delay.deviated(ti) > tn + 1e-12 * std::max(1.0, std::abs(tn)))
        return false;
    }
  }
  return true;
}

namespace detail {

// Scalar coefficient tables for one step size, indexed by eigenvalue bin.
struct StepTables {
  std::vector<std::vector<double>> exps;  // (s+1) x modes; last row theta = 1
  std::vector<std::vector<std::vector<double>>> a;  // s x s x modes
  std::vector<std::vector<double>> b;               // s x modes
};

inline StepTables build_tables(const DiagonalizableOperator& op,
                               const CollocationScheme& scheme, double h) {
  const int s = scheme.size();
  const int modes = op.modes();
  StepTables t;
  t.exps.assign(s + 1, std::vector<double>(modes));
  t.a.assign(s, std::vector<std::vector<double>>(s, std::vector<double>(modes)));
  t.b.assign(s, std::vector<double>(modes));
  std::vector<double> ph(s + 1);
  const auto& lambda = op.eigenvalues();
  for (int m = 0; m < modes; ++m) {
    const double z = -h * lambda[m];
    for (int ti = 0; ti <= s; ++ti) {
      const double theta = ti < s ? scheme.node(ti) : 1.0;
      phi_series(s, theta * z, ph.data());
      t.exps[ti][m] = ph[0];
      for (int j = 0; j < s; ++j) {
        double acc = 0.0, th_pow = theta, fact = 1.0;
        for (int q = 0; q < s; ++q) {
          acc += scheme.monomial(j, q) * fact * th_pow * ph[q + 1];
          th_pow *= theta;
          fact *= (q + 1);
        }
        if (ti < s)
          t.a[ti][j][m] = acc;
        else
          t.b[j][m] = acc;
      }
    }
  }
  return t;
}

}  // namespace detail

inline RunResult integrate(const ProblemSpec& problem, const Mesh& mesh_in,
                           const MethodConfig& config) {
  const auto t_start = std::chrono::steady_clock::now();
  const auto& op = *problem.op;
  const int s = config.scheme.size();

  RunResult res;
  res.mesh = std::make_shared<Mesh>(mesh_in);
  res.scheme = std::make_shared<CollocationScheme>(config.scheme);
  res.op = problem.op;
  const Mesh& mesh = *res.mesh;
  const CollocationScheme& scheme = *res.scheme;

  if (mesh.T() > problem.T + 1e-12 * std::max(1.0, problem.T))
    throw OutOfDomain("mesh extends beyond the problem horizon");
  if (mesh.max_step() > problem.delay.tau0 * (1.0 + 1e-12))
    throw StepExceedsTauZero("mesh max step " + std::to_string(mesh.max_step()) +
                             " exceeds tau0 = " + std::to_string(problem.delay.tau0));
  if (config.method == Method::merkc_i && scheme.quadrature_order() < s + 2)
    res.report.warnings.push_back(
        "merkc-i expects quadrature order >= s + 2; scheme has order " +
        std::to_string(scheme.quadrature_order()));

  HistoryFn history = problem.history;
  switch (config.method) {
    case Method::erkc_i:
      res.interpolant = std::make_shared<InterpolantStore>(mesh, history);
      break;
    case Method::erkc_c:
      res.dense = std::make_shared<DenseOutputStore>(mesh, op, scheme, history);
      break;
    case Method::merkc_i:
      res.node_store = std::make_shared<MeshNodeStore>(mesh, history, s + 2);
      break;
  }

  const int N = mesh.intervals();
  res.report.ratio = mesh.ratio_stats();
  res.report.max_step = mesh.max_step();
  res.report.iterations.reserve(N);
  res.steps.reserve(N);
  res.times = mesh.nodes();

  StateVector u = problem.history_at(0.0);
  op.check_state(u);
  SpectralVector u_spec = op.forward(u);
  if (config.keep_nodes) res.node_values.push_back(u);
  if (config.method == Method::merkc_i) res.node_store->append_node(u);

  std::map<double, detail::StepTables> table_cache;
  std::vector<StateVector> stage(s), gval(s), delayed(s);
  std::vector<SpectralVector> stage_spec(s), ghat(s);
  StateVector u_next, scratch;
  SpectralVector acc;

  auto delayed_eval = [&](double t, StateVector& out) {
    switch (config.method) {
      case Method::erkc_i: res.interpolant->eval(t, out); break;
      case Method::erkc_c: res.dense->eval(t, out); break;
      case Method::merkc_i: res.node_store->eval(t, out); break;
    }
  };

  for (int n = 0; n < N; ++n) {
    const double tn = mesh.node(n);
    const double h = mesh.step(n);
    auto it = table_cache.find(h);
    if (it == table_cache.end())
      it = table_cache.emplace(h, detail::build_tables(op, scheme, h)).first;
    const detail::StepTables& tab = it->second;

    // Delayed values are behind t_n (h <= tau0) and stay fixed per step.
    for (int i = 0; i < s; ++i) {
      const double ti = tn + scheme.node(i) * h;
      delayed_eval(problem.delay.deviated(ti), delayed[i]);
    }

    // predictor: U_i^0 = e^{-c_i h A} U_n
    for (int i = 0; i < s; ++i) {
      op.diag_mul(tab.exps[i], u_spec, stage_spec[i]);
      op.inverse(stage_spec[i], stage[i]);
    }

    int iters = 0;
    for (int iter = 1; iter <= config.fp_max_iter; ++iter) {
      for (int i = 0; i < s; ++i) {
        gval[i].resize(u.size());
        problem.g(tn + scheme.node(i) * h, stage[i], delayed[i], gval[i]);
        op.forward(gval[i], ghat[i]);
      }
      double worst = 0.0;
      for (int i = 0; i < s; ++i) {
        op.diag_mul(tab.exps[i], u_spec, acc);
        for (int j = 0; j < s; ++j) op.diag_axpy(tab.a[i][j], h, ghat[j], acc);
        op.inverse(acc, scratch);
        double diff = 0.0, scale = 0.0;
        for (std::size_t q = 0; q < scratch.size(); ++q) {
          diff = std::max(diff, std::abs(scratch[q] - stage[i][q]));
          scale = std::max(scale, std::abs(scratch[q]));
        }
        worst = std::max(worst, diff / std::max(scale, 1e-300));
        stage[i].swap(scratch);
        stage_spec[i].swap(acc);
      }
      iters = iter;
      if (worst <= config.fp_tol) break;
      if (iter == config.fp_max_iter)
        throw FixedPointDivergence("stage iteration did not converge on interval " +
                                   std::to_string(n) + " (residual " +
                                   std::to_string(worst) + ")");
    }

    // Final nonlinearity values, then one consistency sweep so the stored
    // stages satisfy the stage formulas with the stored G exactly.
    for (int i = 0; i < s; ++i) {
      gval[i].resize(u.size());
      problem.g(tn + scheme.node(i) * h, stage[i], delayed[i], gval[i]);
      op.forward(gval[i], ghat[i]);
    }
    for (int i = 0; i < s; ++i) {
      op.diag_mul(tab.exps[i], u_spec, stage_spec[i]);
      for (int j = 0; j < s; ++j) op.diag_axpy(tab.a[i][j], h, ghat[j], stage_spec[i]);
      op.inverse(stage_spec[i], stage[i]);
    }

    // node update
    op.diag_mul(tab.exps[s], u_spec, acc);
    for (int i = 0; i < s; ++i) op.diag_axpy(tab.b[i], h, ghat[i], acc);
    op.inverse(acc, u_next);

    switch (config.method) {
      case Method::erkc_i: {
        std::vector<double> times{tn};
        std::vector<StateVector> values{u};
        for (int i = 0; i < s; ++i) {
          times.push_back(tn + scheme.node(i) * h);
          values.push_back(stage[i]);
        }
        times.push_back(tn + h);
        values.push_back(u_next);
        res.interpolant->append(times, values);
        break;
      }
      case Method::erkc_c:
        res.dense->append(u_spec, ghat);
        break;
      case Method::merkc_i:
        res.node_store->append_node(u_next);
        break;
    }

    StepRecord rec;
    rec.interval = n;
    rec.iterations = iters;
    if (config.keep_stage_records) {
      rec.stages = stage;
      rec.stage_g = gval;
    }
    res.report.iterations.push_back(iters);
    res.steps.push_back(std::move(rec));

    u.swap(u_next);
    u_spec.swap(acc);
    if (config.keep_nodes) res.node_values.push_back(u);

    if (config.prune_history) {
      const double horizon = problem.delay.deviated(mesh.node(n + 1));
      if (res.interpolant) res.interpolant->prune_before(horizon);
      if (res.dense) res.dense->prune_before(horizon);
    }
  }

  res.final_value = u;
  res.report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return res;
}

}  // namespace erkc
