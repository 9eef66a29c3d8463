#pragma once

// Diagonalizable model operators A with fast-transform eigenbases:
// 1D/2D Dirichlet Laplacian (second-order finite differences, sine basis),
// 1D periodic Laplacian (pseudospectral Fourier basis) and explicit diagonal
// matrices. All operator functions f(A) act as
//   inverse_transform( f(lambda_k) .* forward_transform(v) ).
//
// Operators are immutable after construction. FFTW plans are created once
// per operator (planning is serialized by a global mutex; FFTW's planner is
// not thread-safe) and executed through the new-array interface on per-call
// buffers, so concurrent application to distinct vectors is safe.

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "erkc/errors.hpp"
#include "erkc/phi.hpp"

namespace erkc {

using StateVector = std::vector<double>;
// Spectral coefficients; mult() consecutive doubles per eigenvalue bin.
using SpectralVector = std::vector<double>;

enum class OperatorKind {
  dirichlet_laplacian_1d,
  dirichlet_laplacian_2d,
  periodic_laplacian_1d,
  explicit_diagonal,
};

namespace detail {
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace detail

class DiagonalizableOperator {
 public:
  // n interior points of (0,1); lambda_k = 4(n+1)^2 sin^2(k pi / (2(n+1))).
  static DiagonalizableOperator dirichlet_1d(int n) {
    if (n < 1) throw DimensionError("dirichlet_1d needs n >= 1");
    DiagonalizableOperator op;
    op.kind_ = OperatorKind::dirichlet_laplacian_1d;
    op.n_ = n;
    op.dof_ = n;
    op.modes_ = n;
    op.mult_ = 1;
    op.inv_norm_ = 1.0 / (2.0 * (n + 1));
    op.grid_weight_ = 1.0 / (n + 1);
    op.lambda_.resize(n);
    for (int k = 1; k <= n; ++k) {
      const double s = std::sin(k * M_PI / (2.0 * (n + 1)));
      op.lambda_[k - 1] = 4.0 * (n + 1) * (n + 1) * s * s;
    }
    std::vector<double> a(op.dof_), b(op.dof_);
    std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
    op.fwd_ = fftw_plan_r2r_1d(n, a.data(), b.data(), FFTW_RODFT00,
                               FFTW_ESTIMATE | FFTW_UNALIGNED);
    op.bwd_ = op.fwd_;  // DST-I is its own inverse up to 1/(2(n+1))
    return op;
  }

  // Tensor product on (0,1)^2 with n interior points per dimension,
  // row-major flattening: lambda(i,j) = lambda_i + lambda_j.
  static DiagonalizableOperator dirichlet_2d(int n) {
    if (n < 1) throw DimensionError("dirichlet_2d needs n >= 1");
    DiagonalizableOperator op;
    op.kind_ = OperatorKind::dirichlet_laplacian_2d;
    op.n_ = n;
    op.dof_ = n * n;
    op.modes_ = n * n;
    op.mult_ = 1;
    op.inv_norm_ = 1.0 / (4.0 * double(n + 1) * double(n + 1));
    op.grid_weight_ = 1.0 / (double(n + 1) * double(n + 1));
    std::vector<double> lam1(n);
    for (int k = 1; k <= n; ++k) {
      const double s = std::sin(k * M_PI / (2.0 * (n + 1)));
      lam1[k - 1] = 4.0 * (n + 1) * (n + 1) * s * s;
    }
    op.lambda_.resize(op.modes_);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) op.lambda_[i * n + j] = lam1[i] + lam1[j];
    std::vector<double> a(op.dof_), b(op.dof_);
    std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
    op.fwd_ = fftw_plan_r2r_2d(n, n, a.data(), b.data(), FFTW_RODFT00,
                               FFTW_RODFT00, FFTW_ESTIMATE | FFTW_UNALIGNED);
    op.bwd_ = op.fwd_;
    return op;
  }

  // n equispaced points of [0,1); pseudospectral -d^2/dx^2 with
  // lambda_k = (2 pi k)^2, k = 0..n/2 (n even). The zero mode is kept;
  // only negative fractional powers are then forbidden.
  static DiagonalizableOperator periodic_1d(int n) {
    if (n < 2 || n % 2 != 0) throw DimensionError("periodic_1d needs even n >= 2");
    DiagonalizableOperator op;
    op.kind_ = OperatorKind::periodic_laplacian_1d;
    op.n_ = n;
    op.dof_ = n;
    op.modes_ = n / 2 + 1;
    op.mult_ = 2;
    op.inv_norm_ = 1.0 / n;
    op.grid_weight_ = 1.0 / n;
    op.lambda_.resize(op.modes_);
    for (int k = 0; k < op.modes_; ++k) {
      const double w = 2.0 * M_PI * k;
      op.lambda_[k] = w * w;
    }
    std::vector<double> a(op.dof_);
    std::vector<double> c(2 * op.modes_);
    std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
    op.fwd_ = fftw_plan_dft_r2c_1d(n, a.data(),
                                   reinterpret_cast<fftw_complex*>(c.data()),
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    op.bwd_ = fftw_plan_dft_c2r_1d(n, reinterpret_cast<fftw_complex*>(c.data()),
                                   a.data(), FFTW_ESTIMATE | FFTW_UNALIGNED);
    return op;
  }

  static DiagonalizableOperator diagonal(std::vector<double> eigenvalues) {
    if (eigenvalues.empty()) throw DimensionError("diagonal operator needs eigenvalues");
    for (double l : eigenvalues)
      if (l < 0.0) throw Error("diagonal operator eigenvalues must be >= 0");
    DiagonalizableOperator op;
    op.kind_ = OperatorKind::explicit_diagonal;
    op.n_ = static_cast<int>(eigenvalues.size());
    op.dof_ = op.n_;
    op.modes_ = op.n_;
    op.mult_ = 1;
    op.inv_norm_ = 1.0;
    op.grid_weight_ = 1.0;
    op.lambda_ = std::move(eigenvalues);
    return op;
  }

  DiagonalizableOperator(const DiagonalizableOperator&) = delete;
  DiagonalizableOperator& operator=(const DiagonalizableOperator&) = delete;
  DiagonalizableOperator(DiagonalizableOperator&& o) noexcept { move_from(o); }
  DiagonalizableOperator& operator=(DiagonalizableOperator&& o) noexcept {
    if (this != &o) {
      destroy_plans();
      move_from(o);
    }
    return *this;
  }
  ~DiagonalizableOperator() { destroy_plans(); }

  OperatorKind kind() const { return kind_; }
  int grid_n() const { return n_; }
  int dof() const { return dof_; }
  int modes() const { return modes_; }
  int mult() const { return mult_; }
  int spectral_size() const { return modes_ * mult_; }
  const std::vector<double>& eigenvalues() const { return lambda_; }
  double min_eigenvalue() const {
    return *std::min_element(lambda_.begin(), lambda_.end());
  }
  // Cell weight of the grid quadrature used for discrete L2 norms.
  double grid_weight() const { return grid_weight_; }

  void check_state(const StateVector& v) const {
    if (static_cast<int>(v.size()) != dof_)
      throw DimensionError("state vector length " + std::to_string(v.size()) +
                           " does not match operator dof " + std::to_string(dof_));
  }
  void check_spectral(const SpectralVector& v) const {
    if (static_cast<int>(v.size()) != spectral_size())
      throw DimensionError("spectral vector length mismatch");
  }

  void forward(const StateVector& v, SpectralVector& out) const {
    check_state(v);
    out.resize(spectral_size());
    switch (kind_) {
      case OperatorKind::explicit_diagonal:
        std::copy(v.begin(), v.end(), out.begin());
        break;
      case OperatorKind::periodic_laplacian_1d:
        fftw_execute_dft_r2c(fwd_, const_cast<double*>(v.data()),
                             reinterpret_cast<fftw_complex*>(out.data()));
        break;
      default:
        fftw_execute_r2r(fwd_, const_cast<double*>(v.data()), out.data());
    }
  }

  void inverse(const SpectralVector& v, StateVector& out) const {
    check_spectral(v);
    out.resize(dof_);
    switch (kind_) {
      case OperatorKind::explicit_diagonal:
        std::copy(v.begin(), v.end(), out.begin());
        return;
      case OperatorKind::periodic_laplacian_1d: {
        // c2r destroys its input; run it on a scratch copy.
        SpectralVector tmp(v);
        fftw_execute_dft_c2r(bwd_, reinterpret_cast<fftw_complex*>(tmp.data()),
                             out.data());
        break;
      }
      default:
        fftw_execute_r2r(bwd_, const_cast<double*>(v.data()), out.data());
    }
    for (double& x : out) x *= inv_norm_;
  }

  SpectralVector forward(const StateVector& v) const {
    SpectralVector out;
    forward(v, out);
    return out;
  }
  StateVector inverse(const SpectralVector& v) const {
    StateVector out;
    inverse(v, out);
    return out;
  }

  // e^{-tA} v
  StateVector apply_semigroup(double t, const StateVector& v) const {
    if (t < 0.0) throw Error("apply_semigroup needs t >= 0");
    return apply_table(semigroup_table(t), v);
  }

  // phi_j(-tA) v, j >= 1
  StateVector apply_phi(int j, double t, const StateVector& v) const {
    if (j < 1) throw StageIndexError("apply_phi needs j >= 1");
    if (t < 0.0) throw Error("apply_phi needs t >= 0");
    std::vector<double> table(modes_);
    for (int k = 0; k < modes_; ++k) table[k] = phi(j, -t * lambda_[k]);
    return apply_table(table, v);
  }

  // b_i(theta; -hA) v
  StateVector apply_weight(const CollocationScheme& scheme, int i, double theta,
                           double h, const StateVector& v) const {
    scheme.check_stage(i);
    if (h <= 0.0) throw Error("apply_weight needs h > 0");
    std::vector<double> table(modes_);
    for (int k = 0; k < modes_; ++k)
      table[k] = weight_b(scheme, i, theta, -h * lambda_[k]);
    return apply_table(table, v);
  }

  // A^gamma v, gamma in [-1, 1]
  StateVector apply_fractional_power(double gamma, const StateVector& v) const {
    if (std::abs(gamma) > 1.0)
      throw Error("apply_fractional_power supports gamma in [-1, 1]");
    if (gamma == 0.0) {
      check_state(v);
      return v;
    }
    if (gamma < 0.0 && min_eigenvalue() <= 0.0)
      throw ZeroEigenvalueNegativePower(
          "negative fractional power on an operator with a zero eigenvalue");
    std::vector<double> table(modes_);
    for (int k = 0; k < modes_; ++k) table[k] = std::pow(lambda_[k], gamma);
    return apply_table(table, v);
  }

  std::vector<double> semigroup_table(double t) const {
    std::vector<double> table(modes_);
    for (int k = 0; k < modes_; ++k) table[k] = std::exp(-t * lambda_[k]);
    return table;
  }

  StateVector apply_table(const std::vector<double>& table, const StateVector& v) const {
    SpectralVector spec = forward(v);
    diag_scale(table, spec);
    return inverse(spec);
  }

  // spec[k*mult + d] *= table[k]
  void diag_scale(const std::vector<double>& table, SpectralVector& spec) const {
    check_spectral(spec);
    if (mult_ == 1) {
      for (int k = 0; k < modes_; ++k) spec[k] *= table[k];
    } else {
      for (int k = 0; k < modes_; ++k)
        for (int d = 0; d < mult_; ++d) spec[k * mult_ + d] *= table[k];
    }
  }

  // y[k*mult + d] += scale * table[k] * x[k*mult + d]
  void diag_axpy(const std::vector<double>& table, double scale,
                 const SpectralVector& x, SpectralVector& y) const {
    if (mult_ == 1) {
      for (int k = 0; k < modes_; ++k) y[k] += scale * table[k] * x[k];
    } else {
      for (int k = 0; k < modes_; ++k)
        for (int d = 0; d < mult_; ++d)
          y[k * mult_ + d] += scale * table[k] * x[k * mult_ + d];
    }
  }

  // y[k*mult + d] = table[k] * x[k*mult + d]
  void diag_mul(const std::vector<double>& table, const SpectralVector& x,
                SpectralVector& y) const {
    y.resize(x.size());
    if (mult_ == 1) {
      for (int k = 0; k < modes_; ++k) y[k] = table[k] * x[k];
    } else {
      for (int k = 0; k < modes_; ++k)
        for (int d = 0; d < mult_; ++d)
          y[k * mult_ + d] = table[k] * x[k * mult_ + d];
    }
  }

 private:
  DiagonalizableOperator() = default;

  void move_from(DiagonalizableOperator& o) {
    kind_ = o.kind_;
    n_ = o.n_;
    dof_ = o.dof_;
    modes_ = o.modes_;
    mult_ = o.mult_;
    inv_norm_ = o.inv_norm_;
    grid_weight_ = o.grid_weight_;
    lambda_ = std::move(o.lambda_);
    fwd_ = o.fwd_;
    bwd_ = o.bwd_;
    o.fwd_ = nullptr;
    o.bwd_ = nullptr;
  }

  void destroy_plans() {
    if (!fwd_ && !bwd_) return;
    std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
    if (bwd_ && bwd_ != fwd_) fftw_destroy_plan(bwd_);
    if (fwd_) fftw_destroy_plan(fwd_);
    fwd_ = nullptr;
    bwd_ = nullptr;
  }

  OperatorKind kind_ = OperatorKind::explicit_diagonal;
  int n_ = 0;
  int dof_ = 0;
  int modes_ = 0;
  int mult_ = 1;
  double inv_norm_ = 1.0;
  double grid_weight_ = 1.0;
  std::vector<double> lambda_;
  fftw_plan fwd_ = nullptr;
  fftw_plan bwd_ = nullptr;
};

}  // namespace erkc
