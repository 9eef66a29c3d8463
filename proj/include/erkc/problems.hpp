#pragma once

// Benchmark delay-parabolic problems. Each problem bundles the spatial
// operator, the delay, the history function on [history_start, 0], the
// pointwise nonlinearity g(t, v, w) (w is the delayed state) and, where a
// manufactured solution exists, the exact solution on the grid.
//
// Problems 1 and 4 are manufactured around u = Psi(t) * shape(x) with the
// three-piece Psi
//   e^{-t}                                   t <= 0
//   1 + t e^{2t}                             0 < t <= 1
//   (1+e^2) + 3 e^2 (t-1) + (t-1)^2 e^{3t}   t > 1
// which is C^0 with Psi'(0^-) != Psi'(0^+) and Psi''(1^-) != Psi''(1^+).
// The compensating source is derived analytically; at a breakpoint the
// right-limit piece is used, matching the half-open interval convention
// (sources are only ever evaluated at stage times t in (t_n, t_{n+1}]).

#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "erkc/delay.hpp"
#include "erkc/operators.hpp"

namespace erkc {

struct ProblemSpec {
  std::shared_ptr<const DiagonalizableOperator> op;
  DelaySpec delay;
  double T = 0.0;
  std::string label;
  // history(t, out): solution values on the grid for t <= 0
  std::function<void(double, StateVector&)> history;
  // g(t, v, w, out): pointwise nonlinearity including any manufactured source
  std::function<void(double, const StateVector&, const StateVector&, StateVector&)> g;
  // exact(t, out): grid samples of the exact solution, when known
  std::function<void(double, StateVector&)> exact;
  bool has_exact = false;

  StateVector history_at(double t) const {
    StateVector out;
    history(t, out);
    return out;
  }
  StateVector exact_at(double t) const {
    StateVector out;
    exact(t, out);
    return out;
  }
};

namespace detail {

inline double psi_value(double t) {
  if (t <= 0.0) return std::exp(-t);
  if (t <= 1.0) return 1.0 + t * std::exp(2.0 * t);
  const double e2 = std::exp(2.0);
  const double d = t - 1.0;
  return (1.0 + e2) + 3.0 * e2 * d + d * d * std::exp(3.0 * t);
}

// Right-limit piece at the breakpoints 0 and 1.
inline double psi_deriv(double t) {
  if (t < 0.0) return -std::exp(-t);
  if (t < 1.0) return std::exp(2.0 * t) * (1.0 + 2.0 * t);
  const double e2 = std::exp(2.0);
  const double d = t - 1.0;
  return 3.0 * e2 + (2.0 * d + 3.0 * d * d) * std::exp(3.0 * t);
}

}  // namespace detail

// 1D reaction-diffusion with delayed argument t/2 - 1/2 and manufactured
// exact solution u = Psi(t) sin(x) sin(1-x) on [0,1], T = 3, homogeneous
// Dirichlet boundary.
inline ProblemSpec example_1(int n) {
  ProblemSpec p;
  p.label = "ex1";
  p.T = 3.0;
  p.op = std::make_shared<DiagonalizableOperator>(DiagonalizableOperator::dirichlet_1d(n));
  p.delay = DelaySpec::make([](double t) { return 0.5 * (t + 1.0); }, 0.5);

  std::vector<double> shape(n), curv(n);
  for (int i = 0; i < n; ++i) {
    const double x = double(i + 1) / (n + 1);
    shape[i] = std::sin(x) * std::sin(1.0 - x);
    curv[i] = std::cos(2.0 * x - 1.0);  // shape'' = -2 curv
  }
  auto eval = [shape](double t, StateVector& out) {
    const double psi = detail::psi_value(t);
    out.resize(shape.size());
    for (std::size_t i = 0; i < shape.size(); ++i) out[i] = psi * shape[i];
  };
  p.exact = eval;
  p.has_exact = true;
  p.history = eval;
  p.g = [shape, curv](double t, const StateVector& v, const StateVector& w,
                      StateVector& out) {
    const double psi = detail::psi_value(t);
    const double dpsi = detail::psi_deriv(t);
    const double psi_tau = detail::psi_value(0.5 * (t - 1.0));
    out.resize(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double ue = psi * shape[i];
      const double we = psi_tau * shape[i];
      const double source = dpsi * shape[i] + 2.0 * psi * curv[i] -
                            1.0 / (1.0 + ue * ue) - 1.0 / (1.0 + we * we);
      out[i] = 1.0 / (1.0 + v[i] * v[i]) + 1.0 / (1.0 + w[i] * w[i]) + source;
    }
  };
  return p;
}

// 2D variant on [0,1]^2 without source; history e^{-t} x(1-x) y(1-y);
// no exact solution. n grid points per dimension, row-major layout.
inline ProblemSpec example_2(int n) {
  ProblemSpec p;
  p.label = "ex2";
  p.T = 3.0;
  p.op = std::make_shared<DiagonalizableOperator>(DiagonalizableOperator::dirichlet_2d(n));
  p.delay = DelaySpec::make([](double t) { return 0.5 * (t + 1.0); }, 0.5);

  std::vector<double> shape(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    const double x = double(i + 1) / (n + 1);
    for (int j = 0; j < n; ++j) {
      const double y = double(j + 1) / (n + 1);
      shape[static_cast<std::size_t>(i) * n + j] = x * (1.0 - x) * y * (1.0 - y);
    }
  }
  p.history = [shape](double t, StateVector& out) {
    const double f = std::exp(-t);
    out.resize(shape.size());
    for (std::size_t i = 0; i < shape.size(); ++i) out[i] = f * shape[i];
  };
  p.g = [](double, const StateVector& v, const StateVector& w, StateVector& out) {
    out.resize(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
      out[i] = 1.0 / (1.0 + v[i] * v[i]) + 1.0 / (1.0 + w[i] * w[i]);
  };
  return p;
}

// 1D logistic-difference nonlinearity g = v(1-v) - w(1-w); history
// e^t x(1-x); no exact solution.
inline ProblemSpec example_3(int n) {
  ProblemSpec p;
  p.label = "ex3";
  p.T = 3.0;
  p.op = std::make_shared<DiagonalizableOperator>(DiagonalizableOperator::dirichlet_1d(n));
  p.delay = DelaySpec::make([](double t) { return 0.5 * (t + 1.0); }, 0.5);

  std::vector<double> shape(n);
  for (int i = 0; i < n; ++i) {
    const double x = double(i + 1) / (n + 1);
    shape[i] = x * (1.0 - x);
  }
  p.history = [shape](double t, StateVector& out) {
    const double f = std::exp(t);
    out.resize(shape.size());
    for (std::size_t i = 0; i < shape.size(); ++i) out[i] = f * shape[i];
  };
  p.g = [](double, const StateVector& v, const StateVector& w, StateVector& out) {
    out.resize(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
      out[i] = v[i] * (1.0 - v[i]) - w[i] * (1.0 - w[i]);
  };
  return p;
}

// Periodic problem with delayed argument t^2 - 1 and a stiff delayed
// coupling (factor 2000); manufactured exact solution u = Psi(t) sin(2 pi x)
// on [0,1), T = 1.4. tau(t) = t - t^2 + 1 has tau0 = tau(T) = 0.44.
inline ProblemSpec example_4(int n) {
  ProblemSpec p;
  p.label = "ex4";
  p.T = 1.4;
  p.op = std::make_shared<DiagonalizableOperator>(DiagonalizableOperator::periodic_1d(n));
  const double tau0 = 1.4 - 1.4 * 1.4 + 1.0;
  p.delay = DelaySpec::make([](double t) { return t - t * t + 1.0; }, tau0);

  std::vector<double> shape(n);
  for (int i = 0; i < n; ++i) shape[i] = std::sin(2.0 * M_PI * i / n);
  auto eval = [shape](double t, StateVector& out) {
    const double psi = detail::psi_value(t);
    out.resize(shape.size());
    for (std::size_t i = 0; i < shape.size(); ++i) out[i] = psi * shape[i];
  };
  p.exact = eval;
  p.has_exact = true;
  p.history = eval;
  const double four_pi_sq = 4.0 * M_PI * M_PI;
  p.g = [shape, four_pi_sq](double t, const StateVector& v, const StateVector& w,
                            StateVector& out) {
    const double psi = detail::psi_value(t);
    const double dpsi = detail::psi_deriv(t);
    const double psi_tau = detail::psi_value(t * t - 1.0);
    out.resize(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double ue = psi * shape[i];
      const double we = psi_tau * shape[i];
      const double source = (dpsi + four_pi_sq * psi) * shape[i] -
                            1.0 / (1.0 + ue * ue) - 2000.0 / (1.0 + we * we);
      out[i] = 1.0 / (1.0 + v[i] * v[i]) + 2000.0 / (1.0 + w[i] * w[i]) + source;
    }
  };
  return p;
}

inline ProblemSpec make_problem(const std::string& label, int n) {
  if (label == "ex1") return example_1(n);
  if (label == "ex2") return example_2(n);
  if (label == "ex3") return example_3(n);
  if (label == "ex4") return example_4(n);
  throw Error("unknown problem label: " + label);
}

}  // namespace erkc
