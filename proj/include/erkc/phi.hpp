#pragma once

// Scalar phi functions and collocation schemes.
//
// phi_j(z) = int_0^1 e^{(1-xi) z} xi^{j-1} / (j-1)! dxi  (j >= 1),  phi_0 = exp.
// The weight functions of exponential collocation methods are linear
// combinations of these:
//
//   b_i(theta; z) = sum_{m=1..s} p[i][m-1] * (m-1)! * theta^m * phi_m(theta z),
//
// where l_i(xi) = sum_m p[i][m-1] xi^{m-1} is the Lagrange basis of the
// collocation nodes. b_i(1; z) are the step weights and b_j(c_i; z) the
// internal coefficients a_ij(z).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "erkc/errors.hpp"

namespace erkc {

namespace detail {

inline double inv_factorial(int k) {
  static const std::vector<double> table = [] {
    std::vector<double> t(171);
    double f = 1.0;
    t[0] = 1.0;
    for (int i = 1; i <= 170; ++i) {
      f *= i;
      t[i] = 1.0 / f;
    }
    return t;
  }();
  return table[k];
}

}  // namespace detail

// Below this magnitude the upward recurrence from phi_0 = e^z cancels
// catastrophically; a truncated Taylor series is used instead.
inline constexpr double kPhiTaylorThreshold = 0.5;

// phi_j by Taylor series: sum_{k>=0} z^k / (k+j)!. Converges in ~20 terms
// for |z| < 0.5; terms are added until the relative increment is < 1e-18.
template <class Scalar>
Scalar phi_taylor(int j, Scalar z) {
  Scalar term = Scalar(detail::inv_factorial(j));
  Scalar sum = term;
  for (int k = 1; k < 64; ++k) {
    term *= z / Scalar(double(k + j));
    sum += term;
    if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

// Fills out[0..jmax] with phi_0(z)..phi_jmax(z).
template <class Scalar>
void phi_series(int jmax, Scalar z, Scalar* out) {
  out[0] = std::exp(z);
  if (jmax == 0) return;
  if (std::abs(z) < kPhiTaylorThreshold) {
    for (int j = 1; j <= jmax; ++j) out[j] = phi_taylor(j, z);
  } else {
    // Upward recurrence phi_{j+1} = (phi_j - 1/j!)/z; stable for |z| >= 0.5.
    for (int j = 1; j <= jmax; ++j)
      out[j] = (out[j - 1] - Scalar(detail::inv_factorial(j - 1))) / z;
  }
}

// phi_j(z); total for j >= 0 (phi_0 = exp).
template <class Scalar>
Scalar phi(int j, Scalar z) {
  if (j == 0) return std::exp(z);
  if (std::abs(z) < kPhiTaylorThreshold) return phi_taylor(j, z);
  Scalar cur = std::exp(z);
  for (int m = 1; m <= j; ++m)
    cur = (cur - Scalar(detail::inv_factorial(m - 1))) / z;
  return cur;
}

// Collocation scheme on s nonconfluent nodes in [0,1]. Stage indices are
// 0-based throughout. Immutable after construction.
class CollocationScheme {
 public:
  // Nodes are stored ascending (the method is invariant under stage
  // permutation; ascending order keeps stage times monotone per interval).
  explicit CollocationScheme(std::vector<double> nodes) : c_(std::move(nodes)) {
    const int s = static_cast<int>(c_.size());
    if (s < 1) throw NodeOutOfRange("collocation scheme needs at least one node");
    std::sort(c_.begin(), c_.end());
    for (int i = 0; i < s; ++i) {
      if (!(c_[i] >= 0.0 && c_[i] <= 1.0))
        throw NodeOutOfRange("collocation node outside [0,1]");
      if (i > 0 && c_[i] - c_[i - 1] < 1e-12)
        throw ConfluentNodes("collocation nodes must be pairwise distinct");
    }
    build_monomials();
    detect_quadrature_order();
  }

  static CollocationScheme gauss(int s);
  static CollocationScheme radau_iia(int s);

  int size() const { return static_cast<int>(c_.size()); }
  double node(int i) const { check_stage(i); return c_[i]; }
  const std::vector<double>& nodes() const { return c_; }

  // Coefficient of xi^m in l_i(xi), m = 0..s-1.
  double monomial(int i, int m) const { return p_[i * size() + m]; }

  // Quadrature weight b_i(0) = int_0^1 l_i(xi) dxi.
  double weight0(int i) const { check_stage(i); return w0_[i]; }

  // Largest q with sum_i b_i(0) c_i^{k-1}/(k-1)! = 1/k! for all k = 1..q
  // (residual < 1e-10). Always >= s; equals 2s for Gauss nodes.
  int quadrature_order() const { return quad_order_; }

  double lagrange(int i, double xi) const {
    check_stage(i);
    const int s = size();
    double acc = 0.0, pw = 1.0;
    for (int m = 0; m < s; ++m) {
      acc += p_[i * s + m] * pw;
      pw *= xi;
    }
    return acc;
  }

  void check_stage(int i) const {
    if (i < 0 || i >= size()) throw StageIndexError("stage index out of range");
  }

 private:
  void build_monomials() {
    const int s = size();
    p_.assign(static_cast<std::size_t>(s) * s, 0.0);
    w0_.assign(s, 0.0);
    for (int i = 0; i < s; ++i) {
      // Expand prod_{m != i} (xi - c_m) / (c_i - c_m) into monomials.
      std::vector<double> poly{1.0};
      double denom = 1.0;
      for (int m = 0; m < s; ++m) {
        if (m == i) continue;
        std::vector<double> next(poly.size() + 1, 0.0);
        for (std::size_t q = 0; q < poly.size(); ++q) {
          next[q] -= c_[m] * poly[q];
          next[q + 1] += poly[q];
        }
        poly = std::move(next);
        denom *= (c_[i] - c_[m]);
      }
      for (int m = 0; m < s; ++m) {
        p_[i * s + m] = poly[m] / denom;
        w0_[i] += poly[m] / denom / (m + 1);
      }
    }
  }

  void detect_quadrature_order() {
    const int s = size();
    quad_order_ = 0;
    for (int k = 1; k <= 2 * s; ++k) {
      double sum = 0.0;
      for (int i = 0; i < s; ++i) sum += w0_[i] * std::pow(c_[i], k - 1);
      if (std::abs(sum - 1.0 / k) >= 1e-10) break;
      quad_order_ = k;
    }
  }

  std::vector<double> c_;
  std::vector<double> p_;   // row-major s x s monomial coefficients
  std::vector<double> w0_;  // b_i(0)
  int quad_order_ = 0;
};

inline CollocationScheme CollocationScheme::gauss(int s) {
  switch (s) {
    case 1: return CollocationScheme({0.5});
    case 2: {
      const double d = std::sqrt(3.0) / 6.0;
      return CollocationScheme({0.5 - d, 0.5 + d});
    }
    case 3: {
      const double d = std::sqrt(15.0) / 10.0;
      return CollocationScheme({0.5 - d, 0.5, 0.5 + d});
    }
    default:
      throw NodeOutOfRange("gauss nodes provided for s = 1, 2, 3 only");
  }
}

inline CollocationScheme CollocationScheme::radau_iia(int s) {
  switch (s) {
    case 1: return CollocationScheme({1.0});
    case 2: return CollocationScheme({1.0 / 3.0, 1.0});
    case 3: {
      const double d = std::sqrt(6.0) / 10.0;
      return CollocationScheme({0.4 - d, 0.4 + d, 1.0});
    }
    default:
      throw NodeOutOfRange("radau nodes provided for s = 1, 2, 3 only");
  }
}

// b_i(theta; z) for one stage. Requires 0 < theta <= 1 in the scheme
// formulas; theta = 0 gives 0 and is accepted.
template <class Scalar>
Scalar weight_b(const CollocationScheme& scheme, int i, double theta, Scalar z) {
  scheme.check_stage(i);
  const int s = scheme.size();
  std::vector<Scalar> ph(static_cast<std::size_t>(s) + 1);
  phi_series(s, Scalar(theta) * z, ph.data());
  Scalar acc(0.0);
  double th_pow = theta;                 // theta^{m+1}
  double fact = 1.0;                     // m!
  for (int m = 0; m < s; ++m) {
    acc += Scalar(scheme.monomial(i, m) * fact * th_pow) * ph[m + 1];
    th_pow *= theta;
    fact *= (m + 1);
  }
  return acc;
}

// All stage weights b_i(theta; z) at once, sharing one phi series.
template <class Scalar>
void weights_b_all(const CollocationScheme& scheme, double theta, Scalar z,
                   Scalar* out) {
  const int s = scheme.size();
  std::vector<Scalar> ph(static_cast<std::size_t>(s) + 1);
  phi_series(s, Scalar(theta) * z, ph.data());
  for (int i = 0; i < s; ++i) {
    Scalar acc(0.0);
    double th_pow = theta;
    double fact = 1.0;
    for (int m = 0; m < s; ++m) {
      acc += Scalar(scheme.monomial(i, m) * fact * th_pow) * ph[m + 1];
      th_pow *= theta;
      fact *= (m + 1);
    }
    out[i] = acc;
  }
}

struct OrderConditionReport {
  std::vector<double> residuals;  // relative residual for j = 1..s
  bool pass = false;
};

// Checks sum_i b_i(theta; z) c_i^{j-1}/(j-1)! = theta^j phi_j(theta z)
// for j = 1..s and reports relative residuals against tol.
template <class Scalar>
OrderConditionReport check_order_conditions(const CollocationScheme& scheme,
                                            double theta, Scalar z, double tol) {
  const int s = scheme.size();
  std::vector<Scalar> b(s);
  weights_b_all(scheme, theta, z, b.data());
  std::vector<Scalar> ph(static_cast<std::size_t>(s) + 1);
  phi_series(s, Scalar(theta) * z, ph.data());
  OrderConditionReport rep;
  rep.residuals.resize(s);
  rep.pass = true;
  double th_pow = theta;
  for (int j = 1; j <= s; ++j) {
    Scalar lhs(0.0);
    for (int i = 0; i < s; ++i)
      lhs += b[i] * Scalar(std::pow(scheme.node(i), j - 1) *
                           detail::inv_factorial(j - 1));
    const Scalar rhs = Scalar(th_pow) * ph[j];
    const double denom = std::max(1.0, std::abs(rhs));
    rep.residuals[j - 1] = std::abs(lhs - rhs) / denom;
    if (!(rep.residuals[j - 1] <= tol)) rep.pass = false;
    th_pow *= theta;
  }
  return rep;
}

}  // namespace erkc
