#include "erkc/history.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using erkc::CollocationScheme;
using erkc::DenseOutputStore;
using erkc::DiagonalizableOperator;
using erkc::InterpolantStore;
using erkc::Mesh;
using erkc::MeshNodeStore;
using erkc::StateVector;

namespace {
erkc::HistoryFn constant_history(double value, int dim) {
  return [value, dim](double, StateVector& out) { out.assign(dim, value); };
}
}  // namespace

TEST(Interpolant, LinearForBackwardEuler) {
  // s = 1, c = [1]: Pi_h U(t) = (1-theta) U_k + theta U_{k+1}
  Mesh mesh({0.0, 1.0}, {});
  InterpolantStore store(mesh, constant_history(0.0, 1));
  store.append({0.0, 1.0, 1.0}, {StateVector{2.0}, StateVector{5.0}, StateVector{5.0}});
  for (double theta : {0.25, 0.5, 0.9}) {
    auto v = store.eval(theta);
    EXPECT_NEAR(v[0], (1.0 - theta) * 2.0 + theta * 5.0, 1e-14);
  }
  EXPECT_EQ(store.record(0).theta.size(), 2u);  // duplicate at c_s = 1 collapsed
}

TEST(Interpolant, RadauS2Coefficients) {
  // nodes {0, 1/3, 1}; at theta = 1/2 coefficients are (-1/4, 9/8, 1/8)
  Mesh mesh({0.0, 1.0}, {});
  InterpolantStore store(mesh, constant_history(0.0, 3));
  StateVector e0{1.0, 0.0, 0.0}, e1{0.0, 1.0, 0.0}, e2{0.0, 0.0, 1.0};
  store.append({0.0, 1.0 / 3.0, 1.0}, {e0, e1, e2});
  auto v = store.eval(0.5);
  EXPECT_NEAR(v[0], -0.25, 1e-14);
  EXPECT_NEAR(v[1], 1.125, 1e-14);
  EXPECT_NEAR(v[2], 0.125, 1e-14);
}

TEST(Interpolant, NodeReproductionAndHistory) {
  Mesh mesh({0.0, 0.5, 1.0}, {});
  InterpolantStore store(mesh, [](double t, StateVector& out) { out.assign(1, std::exp(-t)); });
  store.append({0.0, 0.2, 0.5}, {StateVector{1.0}, StateVector{1.5}, StateVector{2.0}});
  store.append({0.5, 0.7, 1.0}, {StateVector{2.0}, StateVector{2.5}, StateVector{3.0}});
  EXPECT_NEAR(store.eval(0.2)[0], 1.5, 1e-13);
  EXPECT_NEAR(store.eval(0.5)[0], 2.0, 1e-13);   // node hit, left interval
  EXPECT_NEAR(store.eval(0.7)[0], 2.5, 1e-13);
  EXPECT_NEAR(store.eval(1.0)[0], 3.0, 1e-13);
  EXPECT_NEAR(store.eval(-0.3)[0], std::exp(0.3), 1e-15);  // history side
}

TEST(Interpolant, PolynomialExactnessDegreeSweep) {
  // nodes {t_k, t_{k,i}, t_{k+1}} interpolate polynomials up to the record
  // degree exactly (l = s-1, s, s+1 depending on endpoint collisions)
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  struct Case {
    std::vector<double> nodes;
    int degree;
  };
  const std::vector<Case> cases = {
      {{0.0, 1.0 / 3.0, 1.0}, 2},        // c = [1/3, 1]: l = s
      {{0.0, 0.3, 0.7, 1.0}, 3},         // c = [0.3, 0.7]: l = s + 1
      {{0.0, 0.4, 1.0}, 2},              // c = [0, 0.4, 1] collapses twice: l = s - 1
  };
  for (const auto& c : cases) {
    Mesh mesh({0.0, 1.0}, {});
    InterpolantStore store(mesh, constant_history(0.0, 1));
    std::vector<double> coef(c.degree + 1);
    for (double& x : coef) x = uni(rng) - 0.5;
    auto poly = [&](double t) {
      double acc = 0.0, p = 1.0;
      for (double cc : coef) {
        acc += cc * p;
        p *= t;
      }
      return acc;
    };
    std::vector<StateVector> vals;
    for (double t : c.nodes) vals.push_back(StateVector{poly(t)});
    store.append(c.nodes, vals);
    for (int trial = 0; trial < 20; ++trial) {
      const double t = uni(rng);
      if (t <= 0.0) continue;
      EXPECT_NEAR(store.eval(t)[0], poly(t), 1e-12);
    }
  }
}

TEST(Interpolant, FutureEvaluationGuard) {
  Mesh mesh({0.0, 0.5, 1.0}, {});
  InterpolantStore store(mesh, constant_history(0.0, 1));
  store.append({0.0, 0.5}, {StateVector{1.0}, StateVector{2.0}});
  EXPECT_NO_THROW(store.eval(0.4));
  EXPECT_THROW(store.eval(0.7), erkc::FutureEvaluation);
}

TEST(MeshNode, ForcedAndSymmetricStencils) {
  // two segments: [0,1] with 4 intervals, [1,1.5] with 5 intervals; s = 2
  Mesh mesh({0.0, 0.25, 0.5, 0.75, 1.0, 1.1, 1.2, 1.3, 1.4, 1.5}, {1.0});
  MeshNodeStore store(mesh, constant_history(0.0, 1), 4);
  for (int q = 0; q < mesh.node_count(); ++q) store.append_node(StateVector{double(q)});
  // interior of segment 1: symmetric stencil l = r = 2 around interval 2
  auto [a, b] = store.stencil_for(0.6);
  EXPECT_EQ(a, 1);
  EXPECT_EQ(b, 4);
  // near segment start: shifted right
  auto [a2, b2] = store.stencil_for(0.1);
  EXPECT_EQ(a2, 0);
  EXPECT_EQ(b2, 3);
  // segment 2 has 6 nodes (indices 4..9): symmetric around interval 6
  auto [a3, b3] = store.stencil_for(1.25);
  EXPECT_EQ(a3, 5);
  EXPECT_EQ(b3, 8);
  // never crosses the discontinuity node 4 leftwards
  auto [a4, b4] = store.stencil_for(1.05);
  EXPECT_GE(a4, 4);
  EXPECT_EQ(b4 - a4, 3);
}

TEST(MeshNode, ForcedStencilWhenSegmentHasExactlyS2Nodes) {
  Mesh mesh({0.0, 0.5, 1.0, 1.25, 1.5, 1.75, 2.0}, {1.0});
  MeshNodeStore store(mesh, constant_history(0.0, 1), 3);  // s = 1
  for (int q = 0; q < mesh.node_count(); ++q) store.append_node(StateVector{double(q)});
  auto [a, b] = store.stencil_for(0.2);  // segment [0,1] has exactly 3 nodes
  EXPECT_EQ(a, 0);
  EXPECT_EQ(b, 2);
}

TEST(MeshNode, StencilUnavailableOnShortSegment) {
  Mesh mesh({0.0, 0.5, 1.0, 1.5, 2.0}, {1.0});  // each segment: 3 nodes
  MeshNodeStore store(mesh, constant_history(0.0, 1), 4);  // needs 4
  for (int q = 0; q < mesh.node_count(); ++q) store.append_node(StateVector{double(q)});
  EXPECT_THROW(store.eval(0.3), erkc::StencilUnavailable);
}

TEST(MeshNode, PolynomialReproductionPerSegment) {
  Mesh mesh({0.0, 0.2, 0.4, 0.6, 0.8, 1.0, 1.2, 1.4, 1.6}, {1.0});
  const int stencil = 4;  // degree 3
  MeshNodeStore store(mesh, constant_history(0.0, 1), stencil);
  // continuous at the breakpoint (like the solution; only derivatives jump)
  auto f = [](double t) {
    if (t <= 1.0) return 1.0 + t - 2.0 * t * t + 0.5 * t * t * t;
    const double d = t - 1.0;
    return 0.5 + 2.0 * d - 1.5 * d * d + 0.75 * d * d * d;
  };
  for (int q = 0; q < mesh.node_count(); ++q)
    store.append_node(StateVector{f(mesh.node(q))});
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> uni(0.01, 1.59);
  for (int trial = 0; trial < 40; ++trial) {
    const double t = uni(rng);
    EXPECT_NEAR(store.eval(t)[0], f(t), 1e-12) << "t=" << t;
  }
  // stored nodes reproduce exactly
  for (int q = 1; q < mesh.node_count(); ++q)
    EXPECT_NEAR(store.eval(mesh.node(q))[0], f(mesh.node(q)), 1e-13);
}

TEST(DenseOutput, NodeAndStageConsistencyScalar) {
  // Hand-assembled single interval on a diagonal operator; theta = c_i and
  // theta = 1 must reproduce the scheme's own stage/node expressions.
  auto op = DiagonalizableOperator::diagonal({2.0});
  const auto radau = CollocationScheme::radau_iia(2);
  Mesh mesh({0.0, 0.4}, {});
  DenseOutputStore store(mesh, op, radau, constant_history(1.0, 1));
  const double h = 0.4;
  erkc::SpectralVector w0{1.0};
  std::vector<erkc::SpectralVector> ghat{{0.7}, {-0.3}};
  store.append(w0, ghat);
  for (int i = 0; i < 2; ++i) {
    const double ci = radau.node(i);
    double expect = std::exp(-ci * h * 2.0) * 1.0;
    for (int j = 0; j < 2; ++j)
      expect += h * erkc::weight_b(radau, j, ci, -h * 2.0) * ghat[j][0];
    EXPECT_NEAR(store.eval(ci * h)[0], expect, 1e-14);
  }
}

TEST(DenseOutput, ReducesToCollocationPolynomialAtAZero) {
  // A = 0: the dense output is the collocation polynomial through the same
  // values, i.e. it agrees with the Lagrange interpolant of {W_k, W_{k,i},
  // W_{k+1}} on the interval.
  auto op = DiagonalizableOperator::diagonal({0.0});
  const auto gauss = CollocationScheme::gauss(2);
  Mesh mesh({0.0, 1.0}, {});
  DenseOutputStore dense(mesh, op, gauss, constant_history(0.0, 1));
  erkc::SpectralVector w0{0.8};
  std::vector<erkc::SpectralVector> ghat{{1.3}, {-0.4}};
  dense.append(w0, ghat);
  // stage and node values implied by the scheme at A = 0
  auto value_at = [&](double theta) {
    double acc = w0[0];
    for (int j = 0; j < 2; ++j)
      acc += erkc::weight_b(gauss, j, theta, 0.0) * ghat[j][0];
    return acc;
  };
  InterpolantStore interp(mesh, constant_history(0.0, 1));
  std::vector<double> times{0.0, gauss.node(0), gauss.node(1), 1.0};
  std::vector<StateVector> vals;
  for (double t : times) vals.push_back(StateVector{value_at(t)});
  interp.append(times, vals);
  for (double t : {0.11, 0.37, 0.52, 0.77, 0.93}) {
    EXPECT_NEAR(dense.eval(t)[0], interp.eval(t)[0], 1e-11);
  }
}

TEST(DenseOutput, HistorySideAndFutureGuard) {
  auto op = DiagonalizableOperator::diagonal({1.0});
  const auto be = CollocationScheme::radau_iia(1);
  Mesh mesh({0.0, 0.5, 1.0}, {});
  DenseOutputStore store(mesh, op, be, [](double t, StateVector& out) {
    out.assign(1, 2.0 * t);
  });
  store.append({1.0}, {{0.5}});
  EXPECT_NEAR(store.eval(-0.25)[0], -0.5, 1e-15);
  EXPECT_NO_THROW(store.eval(0.3));
  EXPECT_THROW(store.eval(0.6), erkc::FutureEvaluation);
}
