#pragma once

// Convergence-study driver: method x step-size sweeps, error norms against
// exact or computed references, pairwise orders and least-squares slopes
// over an automatically selected asymptotic window, CSV emission.
//
// Window selection: points with error below 100x the reference accuracy
// floor are dropped; then pairwise orders are compared against their median
// and outlying pairs (deviation > 1) are clipped from the fine end first,
// then the coarse end, recomputing the median after each drop. At least
// three points always remain.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <future>
#include <sstream>
#include <string>
#include <vector>

#include "erkc/integrator.hpp"

namespace erkc {

enum class NormKind { linf, l2, v_alpha };

inline std::string norm_name(NormKind n, double alpha) {
  switch (n) {
    case NormKind::linf: return "linf";
    case NormKind::l2: return "l2";
    case NormKind::v_alpha: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "valpha:%g", alpha);
      return buf;
    }
  }
  return "?";
}

// Discrete error norm between two grid functions. l2 is the grid-weighted
// root sum of squares (cell weight h_x per dimension); v_alpha measures
// ||A^alpha (a - b)|| in the same weighted-l2 sense.
inline double error_norm(const StateVector& a, const StateVector& b, NormKind norm,
                         double alpha, const DiagonalizableOperator& op) {
  op.check_state(a);
  op.check_state(b);
  StateVector d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  switch (norm) {
    case NormKind::linf: {
      double m = 0.0;
      for (double x : d) m = std::max(m, std::abs(x));
      return m;
    }
    case NormKind::v_alpha:
      d = op.apply_fractional_power(alpha, d);
      [[fallthrough]];
    case NormKind::l2: {
      double acc = 0.0;
      for (double x : d) acc += x * x;
      return std::sqrt(op.grid_weight() * acc);
    }
  }
  return 0.0;
}

struct FitPoint {
  double h = 0.0;
  double error = 0.0;
};

struct OrderFit {
  std::vector<FitPoint> points;   // input points, h strictly decreasing
  std::vector<double> pairwise;   // log2(e_k / e_{k+1}) per adjacent pair
  double slope = 0.0;             // least-squares order over the window
  int used_first = 0;             // inclusive window bounds into points
  int used_last = 0;
  std::vector<std::string> selection_log;
};

namespace detail {
inline double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size();
  return m % 2 ? v[m / 2] : 0.5 * (v[m / 2 - 1] + v[m / 2]);
}
inline std::string fmt_g(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}
}  // namespace detail

inline OrderFit fit_order(const std::vector<FitPoint>& points, double floor = 0.0) {
  if (points.size() < 3) throw InsufficientData("order fit needs at least 3 points");
  for (std::size_t k = 0; k < points.size(); ++k) {
    if (!(points[k].error > 0.0)) throw InsufficientData("order fit needs positive errors");
    if (k > 0 && !(points[k].h < points[k - 1].h))
      throw Error("step sizes must be strictly decreasing");
  }
  OrderFit fit;
  fit.points = points;
  for (std::size_t k = 0; k + 1 < points.size(); ++k)
    fit.pairwise.push_back(std::log(points[k].error / points[k + 1].error) /
                           std::log(points[k].h / points[k + 1].h));

  int lo = 0, hi = static_cast<int>(points.size()) - 1;
  // reference-floor guard
  while (hi - lo + 1 > 3 && points[hi].error < 100.0 * floor) {
    fit.selection_log.push_back("drop h=" + detail::fmt_g(points[hi].h) +
                                ": error below 100x reference floor");
    --hi;
  }
  // median filter on pairwise orders, clipping tail then head
  while (hi - lo + 1 > 3) {
    std::vector<double> orders;
    for (int k = lo; k < hi; ++k)
      orders.push_back(std::log(points[k].error / points[k + 1].error) /
                       std::log(points[k].h / points[k + 1].h));
    const double med = detail::median_of(orders);
    if (std::abs(orders.back() - med) > 1.0) {
      fit.selection_log.push_back("drop h=" + detail::fmt_g(points[hi].h) +
                                  ": pairwise order " + detail::fmt_g(orders.back()) +
                                  " deviates from median " + detail::fmt_g(med));
      --hi;
      continue;
    }
    if (std::abs(orders.front() - med) > 1.0) {
      fit.selection_log.push_back("drop h=" + detail::fmt_g(points[lo].h) +
                                  ": pairwise order " + detail::fmt_g(orders.front()) +
                                  " deviates from median " + detail::fmt_g(med));
      ++lo;
      continue;
    }
    break;
  }
  fit.used_first = lo;
  fit.used_last = hi;
  // least squares of log2 error against log2 h over the window
  const int m = hi - lo + 1;
  double sx = 0.0, sy = 0.0;
  std::vector<double> xs(m), ys(m);
  for (int k = 0; k < m; ++k) {
    xs[k] = std::log2(points[lo + k].h);
    ys[k] = std::log2(points[lo + k].error);
    sx += xs[k];
    sy += ys[k];
  }
  const double mx = sx / m, my = sy / m;
  double num = 0.0, den = 0.0;
  for (int k = 0; k < m; ++k) {
    num += (xs[k] - mx) * (ys[k] - my);
    den += (xs[k] - mx) * (xs[k] - mx);
  }
  fit.slope = num / den;
  return fit;
}

// Step-size grammar: "2^-3..2^-8" expands the octave sweep; otherwise a
// comma list of values, each either "2^-k" or a plain decimal. The result
// must be strictly decreasing.
inline std::vector<double> parse_step_sizes(const std::string& text) {
  auto parse_one = [](const std::string& tok) -> double {
    if (tok.rfind("2^", 0) == 0) return std::pow(2.0, std::atof(tok.c_str() + 2));
    return std::atof(tok.c_str());
  };
  std::vector<double> out;
  const auto dots = text.find("..");
  if (dots != std::string::npos) {
    const std::string a = text.substr(0, dots), b = text.substr(dots + 2);
    if (a.rfind("2^", 0) != 0 || b.rfind("2^", 0) != 0)
      throw Error("range step grammar needs 2^-a..2^-b");
    const int ka = -std::atoi(a.c_str() + 2), kb = -std::atoi(b.c_str() + 2);
    if (kb < ka) throw Error("range step grammar needs increasing exponents");
    for (int k = ka; k <= kb; ++k) out.push_back(std::pow(2.0, -k));
  } else {
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (!tok.empty()) out.push_back(parse_one(tok));
    }
  }
  if (out.size() < 1) throw Error("no step sizes parsed from '" + text + "'");
  for (std::size_t k = 1; k < out.size(); ++k)
    if (!(out[k] < out[k - 1])) throw Error("step sizes must be strictly decreasing");
  return out;
}

struct ConvergenceStudy {
  int n = 0;  // grid size per dimension
  Method method = Method::erkc_c;
  CollocationScheme scheme{std::vector<double>{1.0}};
  MeshPolicy policy = MeshPolicy::constrained_uniform;
  std::vector<double> steps;  // strictly decreasing
  NormKind norm = NormKind::linf;
  double alpha = 0.0;
  bool use_exact = true;    // compare against the exact solution if present
  double ref_h = 0.0;       // computed-reference step (required if !use_exact)
  bool global_error = false;  // additionally record max error over all nodes
  double floor = 0.0;         // reference accuracy floor for the window guard
  double fp_tol = 1e-12;
  int fp_max_iter = 100;
};

struct StudyCell {
  double h = 0.0;
  double error = 0.0;         // final-time error
  double global_error = 0.0;  // max node error (exact reference only)
};

struct StudyResult {
  std::vector<StudyCell> cells;
  OrderFit fit;
  std::string csv;
};

inline int study_thread_cap() {
  const char* env = std::getenv("ERKC_THREADS");
  if (!env) return 1;
  const int v = std::atoi(env);
  return v > 0 ? v : 1;
}

// Runs the sweep; independent (h) cells may execute concurrently under the
// ERKC_THREADS cap, with results assembled in deterministic order.
inline StudyResult run_study(const ProblemSpec& problem, const ConvergenceStudy& study) {
  if (study.steps.empty()) throw InsufficientData("study needs step sizes");
  const bool exact_ref = study.use_exact && problem.has_exact;
  if (study.global_error && !exact_ref)
    throw Error("global error reporting needs an exact reference");

  const auto disc = compute_discontinuities(problem.delay, problem.T);

  StateVector ref_final;
  if (exact_ref) {
    ref_final = problem.exact_at(problem.T);
  } else {
    const double hmin = study.steps.back();
    if (!(study.ref_h > 0.0) || study.ref_h >= hmin / 4.0)
      throw Error("computed reference needs ref_h < min step / 4");
    MethodConfig ref_cfg{Method::erkc_c, CollocationScheme::gauss(3)};
    ref_cfg.keep_nodes = false;
    ref_cfg.prune_history = true;
    ref_cfg.fp_tol = study.fp_tol;
    ref_cfg.fp_max_iter = study.fp_max_iter;
    const auto ref_mesh = build_mesh(disc, problem.delay, study.ref_h, study.policy);
    ref_final = integrate(problem, ref_mesh, ref_cfg).final_value;
  }

  StudyResult result;
  result.cells.resize(study.steps.size());
  auto run_cell = [&](std::size_t idx) {
    const double h = study.steps[idx];
    MethodConfig cfg{study.method, study.scheme};
    cfg.fp_tol = study.fp_tol;
    cfg.fp_max_iter = study.fp_max_iter;
    cfg.keep_nodes = study.global_error;
    cfg.prune_history = !study.global_error;
    const auto mesh = build_mesh(disc, problem.delay, h, study.policy);
    const auto run = integrate(problem, mesh, cfg);
    StudyCell cell;
    cell.h = h;
    cell.error = error_norm(run.final_value, ref_final, study.norm, study.alpha,
                            *problem.op);
    if (study.global_error) {
      for (int k = 1; k <= mesh.intervals(); ++k)
        cell.global_error = std::max(
            cell.global_error, error_norm(run.node_values[k],
                                          problem.exact_at(mesh.node(k)),
                                          study.norm, study.alpha, *problem.op));
    }
    result.cells[idx] = cell;
  };

  const int threads = std::min<int>(study_thread_cap(), study.steps.size());
  if (threads <= 1) {
    for (std::size_t idx = 0; idx < study.steps.size(); ++idx) run_cell(idx);
  } else {
    std::vector<std::future<void>> futs;
    for (int t = 0; t < threads; ++t)
      futs.push_back(std::async(std::launch::async, [&, t] {
        for (std::size_t idx = t; idx < study.steps.size(); idx += threads)
          run_cell(idx);
      }));
    for (auto& f : futs) f.get();
  }

  std::vector<FitPoint> pts;
  for (const auto& cell : result.cells) pts.push_back({cell.h, cell.error});
  result.fit = fit_order(pts, study.floor);

  std::ostringstream csv;
  csv << "#schema=1\n";
  csv << "#problem=" << problem.label << " method=" << method_name(study.method)
      << " s=" << study.scheme.size() << " n=" << study.n
      << " norm=" << norm_name(study.norm, study.alpha)
      << " reference=" << (exact_ref ? "exact" : "computed") << "\n";
  csv << "h,error,pairwise_order";
  if (study.global_error) csv << ",global_error";
  csv << "\n";
  for (std::size_t k = 0; k < result.cells.size(); ++k) {
    csv << detail::fmt_g(result.cells[k].h) << "," << detail::fmt_g(result.cells[k].error)
        << "," << (k == 0 ? "nan" : detail::fmt_g(result.fit.pairwise[k - 1]));
    if (study.global_error) csv << "," << detail::fmt_g(result.cells[k].global_error);
    csv << "\n";
  }
  csv << "#slope=" << detail::fmt_g(result.fit.slope) << " window_h=["
      << detail::fmt_g(result.fit.points[result.fit.used_first].h) << ","
      << detail::fmt_g(result.fit.points[result.fit.used_last].h) << "]\n";
  for (const auto& line : result.fit.selection_log) csv << "#excluded " << line << "\n";
  result.csv = csv.str();
  return result;
}

}  // namespace erkc
