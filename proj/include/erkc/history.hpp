#pragma once

// Continuous extensions of the numerical solution, used to evaluate delayed
// arguments:
//  - InterpolantStore: per-interval Lagrange interpolant through the node and
//    stage values {U_k, U_{k,i}, U_{k+1}} (the ERKC-I extension Pi_h U)
//  - MeshNodeStore: per-interval polynomial through s+2 consecutive mesh-node
//    values, with the stencil confined to one smoothness segment (the
//    modified extension Pi*_h U)
//  - DenseOutputStore: the exponential dense output
//    W(t_k + theta h) = e^{-theta h A} W_k + h sum_i b_i(theta; -hA) G_{k,i}
//
// All stores return the problem history function for t <= 0 and throw
// FutureEvaluation past the completed range. Appends happen in interval
// order from the single integrator thread; evaluation is read-only.

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "erkc/delay.hpp"
#include "erkc/operators.hpp"
#include "erkc/phi.hpp"

namespace erkc {

using HistoryFn = std::function<void(double, StateVector&)>;

namespace detail {

// Barycentric weights for nodes normalized to [0,1].
inline std::vector<double> barycentric_weights(const std::vector<double>& x) {
  const std::size_t m = x.size();
  std::vector<double> w(m, 1.0);
  for (std::size_t q = 0; q < m; ++q)
    for (std::size_t r = 0; r < m; ++r)
      if (r != q) w[q] /= (x[q] - x[r]);
  return w;
}

// Coefficients gamma_q with p(theta) = sum_q gamma_q f_q; exact hits return
// a unit coefficient vector.
inline void barycentric_coeffs(const std::vector<double>& x,
                               const std::vector<double>& w, double theta,
                               std::vector<double>& gamma) {
  const std::size_t m = x.size();
  gamma.assign(m, 0.0);
  for (std::size_t q = 0; q < m; ++q) {
    if (std::abs(theta - x[q]) < 1e-14) {
      gamma[q] = 1.0;
      return;
    }
  }
  double denom = 0.0;
  for (std::size_t q = 0; q < m; ++q) {
    gamma[q] = w[q] / (theta - x[q]);
    denom += gamma[q];
  }
  for (std::size_t q = 0; q < m; ++q) gamma[q] /= denom;
}

}  // namespace detail

class InterpolantStore {
 public:
  struct Record {
    double t0 = 0.0, h = 0.0;
    std::vector<double> theta;       // distinct normalized nodes in [0,1]
    std::vector<double> bary;        // barycentric weights
    std::vector<StateVector> value;  // one state per node
  };

  InterpolantStore(const Mesh& mesh, HistoryFn history)
      : mesh_(&mesh), history_(std::move(history)) {}

  // Interval k record; times may contain near-duplicates (c_1 = 0 or
  // c_s = 1), which collapse to the later entry.
  void append(const std::vector<double>& times, const std::vector<StateVector>& values) {
    const int k = static_cast<int>(recs_.size());
    Record rec;
    rec.t0 = mesh_->node(k);
    rec.h = mesh_->step(k);
    for (std::size_t q = 0; q < times.size(); ++q) {
      const double theta = (times[q] - rec.t0) / rec.h;
      if (!rec.theta.empty() && theta - rec.theta.back() < 1e-12) {
        rec.value.back() = values[q];
        continue;
      }
      rec.theta.push_back(theta);
      rec.value.push_back(values[q]);
    }
    rec.bary = detail::barycentric_weights(rec.theta);
    recs_.push_back(std::move(rec));
  }

  int completed() const { return static_cast<int>(recs_.size()); }

  const Record& record(int k) const { return recs_[k]; }

  void eval(double t, StateVector& out) const {
    if (t <= 0.0) {
      history_(t, out);
      return;
    }
    const int k = mesh_->locate(t);
    if (k >= completed() || k < first_live_)
      throw FutureEvaluation("interpolant evaluation outside completed range");
    const Record& rec = recs_[k];
    const double theta = (t - rec.t0) / rec.h;
    std::vector<double> gamma;
    detail::barycentric_coeffs(rec.theta, rec.bary, theta, gamma);
    out.assign(rec.value[0].size(), 0.0);
    for (std::size_t q = 0; q < rec.value.size(); ++q) {
      const double c = gamma[q];
      const StateVector& v = rec.value[q];
      for (std::size_t i = 0; i < out.size(); ++i) out[i] += c * v[i];
    }
  }

  StateVector eval(double t) const {
    StateVector out;
    eval(t, out);
    return out;
  }

  // Releases records whose interval lies entirely below t.
  void prune_before(double t) {
    while (first_live_ < completed() &&
           mesh_->node(first_live_ + 1) < t) {
      std::vector<StateVector>().swap(recs_[first_live_].value);
      ++first_live_;
    }
  }

 private:
  const Mesh* mesh_;
  HistoryFn history_;
  std::vector<Record> recs_;
  int first_live_ = 0;
};

class MeshNodeStore {
 public:
  // stencil_size = s + 2 mesh nodes per evaluation.
  MeshNodeStore(const Mesh& mesh, HistoryFn history, int stencil_size)
      : mesh_(&mesh), history_(std::move(history)), stencil_(stencil_size) {}

  void append_node(const StateVector& u) { nodes_.push_back(u); }

  int completed_nodes() const { return static_cast<int>(nodes_.size()); }

  // Node index range [first, last] of the stencil used at time t: the
  // symmetric choice around the interval containing t, shifted until it fits
  // inside both the smoothness segment and the computed range.
  std::pair<int, int> stencil_for(double t) const {
    const int k = mesh_->locate(t);
    if (k + 1 >= completed_nodes())
      throw FutureEvaluation("mesh-node interpolant beyond computed range");
    const int mu = mesh_->segment_of_interval(k);
    const int lo = mesh_->segment_first_node(mu);
    const int hi = std::min(mesh_->segment_last_node(mu), completed_nodes() - 1);
    if (hi - lo + 1 < stencil_)
      throw StencilUnavailable("segment holds fewer than s + 2 mesh nodes");
    int a = k - ((stencil_ + 1) / 2 - 1);
    int b = a + stencil_ - 1;
    if (a < lo) {
      b += lo - a;
      a = lo;
    }
    if (b > hi) {
      a -= b - hi;
      b = hi;
    }
    return {a, b};
  }

  void eval(double t, StateVector& out) const {
    if (t <= 0.0) {
      history_(t, out);
      return;
    }
    const auto [a, b] = stencil_for(t);
    // normalize stencil times to [0,1]
    const double ta = mesh_->node(a), tb = mesh_->node(b);
    std::vector<double> x(b - a + 1);
    for (int q = a; q <= b; ++q) x[q - a] = (mesh_->node(q) - ta) / (tb - ta);
    const auto w = detail::barycentric_weights(x);
    std::vector<double> gamma;
    detail::barycentric_coeffs(x, w, (t - ta) / (tb - ta), gamma);
    out.assign(nodes_[a].size(), 0.0);
    for (int q = a; q <= b; ++q) {
      const double c = gamma[q - a];
      const StateVector& v = nodes_[q];
      for (std::size_t i = 0; i < out.size(); ++i) out[i] += c * v[i];
    }
  }

  StateVector eval(double t) const {
    StateVector out;
    eval(t, out);
    return out;
  }

 private:
  const Mesh* mesh_;
  HistoryFn history_;
  int stencil_;
  std::vector<StateVector> nodes_;
};

class DenseOutputStore {
 public:
  struct Record {
    SpectralVector w_left;             // spectral W_k
    std::vector<SpectralVector> ghat;  // spectral G_{k,i}
  };

  DenseOutputStore(const Mesh& mesh, const DiagonalizableOperator& op,
                   const CollocationScheme& scheme, HistoryFn history)
      : mesh_(&mesh), op_(&op), scheme_(&scheme), history_(std::move(history)) {}

  void append(SpectralVector w_left, std::vector<SpectralVector> ghat) {
    recs_.push_back(Record{std::move(w_left), std::move(ghat)});
  }

  int completed() const { return static_cast<int>(recs_.size()); }

  void eval(double t, StateVector& out) const {
    if (t <= 0.0) {
      history_(t, out);
      return;
    }
    const int k = mesh_->locate(t);
    if (k >= completed() || k < first_live_)
      throw FutureEvaluation("dense output evaluation outside completed range");
    const Record& rec = recs_[k];
    const double h = mesh_->step(k);
    const double theta = (t - mesh_->node(k)) / h;
    const int s = scheme_->size();
    const int modes = op_->modes();
    const int mult = op_->mult();
    const auto& lambda = op_->eigenvalues();
    SpectralVector spec(op_->spectral_size(), 0.0);
    std::vector<double> ph(s + 1), b(s);
    for (int m = 0; m < modes; ++m) {
      const double z = -h * lambda[m];
      phi_series(s, theta * z, ph.data());
      for (int i = 0; i < s; ++i) {
        double acc = 0.0, th_pow = theta, fact = 1.0;
        for (int q = 0; q < s; ++q) {
          acc += scheme_->monomial(i, q) * fact * th_pow * ph[q + 1];
          th_pow *= theta;
          fact *= (q + 1);
        }
        b[i] = acc;
      }
      for (int d = 0; d < mult; ++d) {
        const int idx = m * mult + d;
        double acc = ph[0] * rec.w_left[idx];  // e^{theta z} W_k
        for (int i = 0; i < s; ++i) acc += h * b[i] * rec.ghat[i][idx];
        spec[idx] = acc;
      }
    }
    op_->inverse(spec, out);
  }

  StateVector eval(double t) const {
    StateVector out;
    eval(t, out);
    return out;
  }

  void prune_before(double t) {
    while (first_live_ < completed() && mesh_->node(first_live_ + 1) < t) {
      SpectralVector().swap(recs_[first_live_].w_left);
      std::vector<SpectralVector>().swap(recs_[first_live_].ghat);
      ++first_live_;
    }
  }

 private:
  const Mesh* mesh_;
  const DiagonalizableOperator* op_;
  const CollocationScheme* scheme_;
  HistoryFn history_;
  std::vector<Record> recs_;
  int first_live_ = 0;
};

}  // namespace erkc
