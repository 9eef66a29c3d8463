#pragma once

// Time-dependent delay descriptor, primary discontinuity points, and
// constrained time meshes.
//
// The delay tau must satisfy tau(t) >= tau0 > 0 and the deviated argument
// t - tau(t) must be strictly increasing; both are analytic hypotheses and
// are verified here by dense sampling. The primary discontinuity points
// come from the recursion xi_{mu+1} - tau(xi_{mu+1}) = xi_mu, xi_0 = 0,
// solved by bisection on the monotone deviated argument. Every xi_mu < T
// becomes a mesh node, so each mesh interval lies inside one smoothness
// segment [xi_{mu-1}, xi_mu].

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "erkc/errors.hpp"

namespace erkc {

struct DelaySpec {
  std::function<double(double)> tau;
  double tau0 = 0.0;           // positive lower bound of tau on [0, T]
  double history_start = 0.0;  // left end of the history domain, = -tau(0)

  double deviated(double t) const { return t - tau(t); }

  static DelaySpec make(std::function<double(double)> tau_fn, double tau0) {
    DelaySpec d;
    d.tau = std::move(tau_fn);
    d.tau0 = tau0;
    d.history_start = -d.tau(0.0);
    return d;
  }
};

// Samples tau(t) >= tau0 and strict monotonicity of t - tau(t) on [0, T].
inline void validate_delay(const DelaySpec& delay, double T,
                           int samples_per_unit = 10000) {
  const int m = std::max(2, static_cast<int>(std::ceil(T * samples_per_unit)));
  double prev = delay.deviated(0.0);
  if (delay.tau(0.0) < delay.tau0 - 1e-12)
    throw DelayBoundViolation("tau(0) below tau0");
  for (int i = 1; i <= m; ++i) {
    const double t = T * i / m;
    if (delay.tau(t) < delay.tau0 - 1e-12)
      throw DelayBoundViolation("tau(t) below tau0 at t = " + std::to_string(t));
    const double d = delay.deviated(t);
    if (d <= prev)
      throw NonmonotoneDeviatedArgument("t - tau(t) not increasing near t = " +
                                        std::to_string(t));
    prev = d;
  }
}

struct DiscontinuitySet {
  std::vector<double> xi;  // 0 < xi_1 < ... < xi_m < T
  double T = 0.0;
};

// All primary discontinuity points below T. Each xi solves
// deviated(xi) = xi_prev by bisection to tol; the iteration terminates
// because xi_{mu+1} >= xi_mu + tau0.
inline DiscontinuitySet compute_discontinuities(const DelaySpec& delay, double T,
                                                double tol = 1e-12) {
  validate_delay(delay, T);
  DiscontinuitySet out;
  out.T = T;
  double target = 0.0;  // xi_0
  while (true) {
    double lo = std::max(target, 0.0);
    double hi = T;
    const double dev_hi = delay.deviated(hi);
    if (dev_hi < target) break;  // next xi >= T
    double dev_lo = delay.deviated(lo);
    if (dev_lo > target)
      throw BracketFailure("deviated argument already above target at bracket start");
    // Bisect to machine precision (the midpoint degenerates to an endpoint
    // after ~60 halvings); tol is the guaranteed bound, not the stop width.
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;
      if (delay.deviated(mid) < target)
        lo = mid;
      else
        hi = mid;
    }
    const double xi = hi;
    if (std::abs(delay.deviated(xi) - target) > tol)
      throw BracketFailure("discontinuity root did not meet tolerance");
    if (xi >= T - tol) break;  // the root is T itself; xi_mu < T required
    out.xi.push_back(xi);
    target = xi;
  }
  return out;
}

enum class MeshPolicy { constrained_uniform, per_segment_uniform };

struct RatioStats {
  double max_increase = 1.0;  // max h_{j+1} / h_j
  double max_decrease = 1.0;  // max h_j / h_{j+1}
};

// Ordered time mesh containing every primary discontinuity point as a node.
// Intervals use the half-open convention (t_k, t_{k+1}].
class Mesh {
 public:
  static constexpr int kHistory = -1;

  Mesh(std::vector<double> nodes, std::vector<double> xi) : nodes_(std::move(nodes)) {
    const int N = intervals();
    seg_.resize(N);
    int mu = 0;
    const int m = static_cast<int>(xi.size());
    for (int k = 0; k < N; ++k) {
      const double mid = 0.5 * (nodes_[k] + nodes_[k + 1]);
      while (mu < m && xi[mu] < mid) ++mu;
      seg_[k] = mu;  // interval within [xi_mu-1, xi_mu] gets index mu (0-based)
    }
    const int nseg = seg_.empty() ? 0 : seg_.back() + 1;
    seg_first_.assign(nseg, intervals());
    seg_last_.assign(nseg, 0);
    for (int k = 0; k < N; ++k) {
      seg_first_[seg_[k]] = std::min(seg_first_[seg_[k]], k);
      seg_last_[seg_[k]] = std::max(seg_last_[seg_[k]], k + 1);
    }
    for (int k = 1; k < N; ++k) {
      const double r = step(k) / step(k - 1);
      ratio_.max_increase = std::max(ratio_.max_increase, r);
      ratio_.max_decrease = std::max(ratio_.max_decrease, 1.0 / r);
    }
  }

  int intervals() const { return static_cast<int>(nodes_.size()) - 1; }
  int node_count() const { return static_cast<int>(nodes_.size()); }
  double node(int k) const { return nodes_[k]; }
  const std::vector<double>& nodes() const { return nodes_; }
  double T() const { return nodes_.back(); }
  // Length of interval k = (t_k, t_{k+1}].
  double step(int k) const { return nodes_[k + 1] - nodes_[k]; }
  double max_step() const {
    double h = 0.0;
    for (int k = 0; k < intervals(); ++k) h = std::max(h, step(k));
    return h;
  }
  const RatioStats& ratio_stats() const { return ratio_; }

  // Segment index (0-based) of interval k; segment mu spans
  // [xi_mu, min(xi_mu+1, T)] with xi_0 = 0.
  int segment_of_interval(int k) const { return seg_[k]; }
  int segment_count() const { return seg_first_.empty() ? 0 : static_cast<int>(seg_first_.size()); }
  // First/last node index of a segment (both nodes lie on segment ends).
  int segment_first_node(int mu) const { return seg_first_[mu]; }
  int segment_last_node(int mu) const { return seg_last_[mu]; }

  // kHistory for t <= 0, otherwise the unique k with t in (t_k, t_{k+1}].
  int locate(double t) const {
    if (t <= nodes_.front()) {
      if (t < nodes_.front()) return kHistory;  // history function domain
      return kHistory;                          // t = 0 belongs to the history
    }
    if (t > nodes_.back() + 1e-12 * std::max(1.0, nodes_.back()))
      throw OutOfDomain("locate: t beyond final time");
    const auto it = std::lower_bound(nodes_.begin(), nodes_.end(), t);
    int k = static_cast<int>(it - nodes_.begin()) - 1;
    return std::min(k, intervals() - 1);
  }

 private:
  std::vector<double> nodes_;
  std::vector<int> seg_;
  std::vector<int> seg_first_, seg_last_;
  RatioStats ratio_;
};

// Mesh construction. constrained_uniform merges the uniform grid
// {k base_h} with {xi_mu} and {T}; a uniform node closer to a xi than
// base_h * 1e-8 is replaced by the exact xi value. per_segment_uniform
// divides each segment [xi_mu-1, min(xi_mu, T)] into ceil(len/base_h)
// equal steps.
inline Mesh build_mesh(const DiscontinuitySet& disc, const DelaySpec& delay,
                       double base_h, MeshPolicy policy) {
  const double T = disc.T;
  if (base_h <= 0.0) throw Error("base_h must be positive");
  if (base_h > delay.tau0 * (1.0 + 1e-12))
    throw StepExceedsTauZero("base step " + std::to_string(base_h) +
                             " exceeds tau0 = " + std::to_string(delay.tau0));
  std::vector<double> nodes;
  if (policy == MeshPolicy::constrained_uniform) {
    std::vector<double> pts;
    for (int k = 0; k * base_h < T - base_h * 1e-8; ++k) pts.push_back(k * base_h);
    pts.push_back(T);
    for (double x : disc.xi) pts.push_back(x);
    std::sort(pts.begin(), pts.end());
    const double dedup = base_h * 1e-8;
    for (double t : pts) {
      if (!nodes.empty() && t - nodes.back() < dedup) {
        // keep the exact xi (or T) value when a uniform node nearly collides
        const bool special =
            t == T || std::any_of(disc.xi.begin(), disc.xi.end(),
                                  [&](double x) { return x == t; });
        if (special) nodes.back() = t;
        continue;
      }
      nodes.push_back(t);
    }
  } else {
    std::vector<double> ends{0.0};
    for (double x : disc.xi)
      if (x < T) ends.push_back(x);
    ends.push_back(T);
    nodes.push_back(0.0);
    for (std::size_t seg = 0; seg + 1 < ends.size(); ++seg) {
      const double a = ends[seg], b = ends[seg + 1];
      const int m = std::max(1, static_cast<int>(std::ceil((b - a) / base_h - 1e-12)));
      for (int q = 1; q <= m; ++q) nodes.push_back(a + (b - a) * q / m);
    }
  }
  if (nodes.size() < 2) throw EmptySegment("mesh degenerated to fewer than two nodes");
  for (std::size_t k = 0; k + 1 < nodes.size(); ++k)
    if (!(nodes[k] < nodes[k + 1]))
      throw EmptySegment("mesh nodes not strictly increasing after deduplication");
  return Mesh(std::move(nodes), disc.xi);
}

}  // namespace erkc
