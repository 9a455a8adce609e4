#include <gtest/gtest.h>

#include "support.hpp"

namespace sd = simplexdyn;
using namespace testing_support;

TEST(TransitionMatrix, UniformPointSingleLeader) {
  const auto m = make_model(single_leader(), Family::ExpAttract, 4.0);
  const auto pi = sd::transition_matrix(m, SimplexVector::uniform(3));
  const double keep = std::exp(-4.0 / 3.0);
  EXPECT_NEAR(pi(0, 0), 1.0 - keep + keep * 0.8, 1e-14);
  EXPECT_NEAR(pi(0, 0), 0.947281, 1e-6);
  EXPECT_NEAR(pi(1, 2), keep * 0.4, 1e-14);
}

TEST(TransitionMatrix, NoReinforcementIsInfluence) {
  const auto m = make_model(single_leader(), Family::LinearAttract, 0.0);
  Rng rng(31);
  const auto pi = sd::transition_matrix(m, random_simplex(rng, 3));
  EXPECT_LE(max_abs_diff(pi.entries(), single_leader().entries()), 1e-15);
}

TEST(TransitionMatrix, FullReinforcementAtVertexKeepsRow) {
  const auto m = make_model(single_leader(), Family::LinearAttract, 1.0);
  const auto pi = sd::transition_matrix(m, SimplexVector::vertex(3, 1));
  EXPECT_EQ(pi(1, 1), 1.0);
  EXPECT_EQ(pi(1, 0), 0.0);
  EXPECT_EQ(pi(1, 2), 0.0);
}

TEST(Step, HandExample) {
  const auto m = make_model(RowStochasticMatrix({{0.5, 0.5}, {1.0, 0.0}}), Family::LinearAttract, 1.0);
  EXPECT_LE(max_abs_diff(sd::step(m, point({0.5, 0.5})), {0.625, 0.375}), 1e-15);
}

TEST(Step, DoublyStochasticKeepsUniform) {
  for (Family f : closed_families()) {
    const auto m = make_model(symmetric_ring(), f, 0.5);
    EXPECT_LE(sd::l1_distance(sd::step(m, SimplexVector::uniform(3)), SimplexVector::uniform(3)), 1e-15);
  }
}

TEST(Step, SingleLeaderFixedPoint) {
  const auto m = make_model(single_leader(), Family::ExpAttract, 4.0);
  const double y = oracle_single_leader_minor();
  const SimplexVector p({1.0 - 2 * y, y, y});
  EXPECT_LE(sd::l1_distance(sd::step(m, p), p), 1e-12);
  EXPECT_LE(max_abs_diff(sd::step(m, p), {0.9904, 0.0048, 0.0048}), 1e-3);
}

TEST(Step, MatchesDirectFormulaAndPreservesSimplex) {
  Rng rng(32);
  for (int t = 0; t < 10000; ++t) {
    const Family f = closed_families()[t % 4];
    const std::size_t n = 2 + t % 5;
    const auto m = random_model(rng, f, n, t % 3 == 0);
    const auto p = random_simplex(rng, n, t % 7 == 0 ? 0.0 : 1e-3);
    const auto q = sd::step(m, p);
    ASSERT_NO_THROW(SimplexVector(q.entries()));
    EXPECT_LE((q.entries() - oracle_step(m, p.entries())).lpNorm<1>(), 1e-13);
    const auto pi = sd::transition_matrix(m, p);
    EXPECT_GE(pi.entries().minCoeff(), 0.0);
    EXPECT_LE((pi.entries().rowwise().sum().array() - 1.0).abs().maxCoeff(), 1e-12);
  }
}

TEST(Step, NonExpansiveInContractiveRegimes) {
  Rng rng(33);
  const std::vector<std::pair<Family, double>> regimes{
      {Family::ExpAttract, 1.0}, {Family::ExpRepel, 1.0}, {Family::LinearAttract, 0.5}, {Family::LinearRepel, 0.5}};
  for (int t = 0; t < 10000; ++t) {
    const auto& [f, g] = regimes[t % regimes.size()];
    const std::size_t n = 2 + t % 4;
    const ModelSpec m(random_stochastic(rng, n), Reinforcement(f, g));
    const auto a = random_simplex(rng, n), b = random_simplex(rng, n);
    EXPECT_LE(sd::l1_distance(sd::step(m, a), sd::step(m, b)), sd::l1_distance(a, b) + 1e-10);
  }
}

TEST(Iterate, ZeroStepsAndReconstruction) {
  const auto m = make_model(single_leader(), Family::ExpAttract, 4.0);
  const auto p0 = point({0.2, 0.3, 0.5});
  const auto empty = sd::iterate(m, p0, 0);
  ASSERT_EQ(empty.size(), 1u);
  EXPECT_EQ(sd::l1_distance(empty.back(), p0), 0.0);
  const auto traj = sd::iterate(m, p0, 50);
  ASSERT_EQ(traj.size(), 51u);
  for (std::size_t t = 0; t + 1 < traj.size(); ++t) {
    EXPECT_LE(sd::l1_distance(sd::step(m, traj.points[t]), traj.points[t + 1]), 1e-12);
  }
  EXPECT_LE(sd::l1_distance(sd::step_n(m, p0, 50), traj.back()), 1e-15);
}

TEST(Iterate, DistanceToFixedPointNonIncreasing) {
  const auto m = make_model(single_leader(), Family::ExpAttract, 1.0);
  const auto star = sd::solve_kappa(m).points.front().point;
  Rng rng(34);
  for (int s = 0; s < 10; ++s) {
    const auto traj = sd::iterate(m, random_simplex(rng, 3), 200);
    for (std::size_t t = 0; t + 1 < traj.size(); ++t) {
      EXPECT_LE(sd::l1_distance(traj.points[t + 1], star), sd::l1_distance(traj.points[t], star) + 1e-12);
    }
  }
}

TEST(Iterate, OscillatingTailAlternates) {
  const auto m = make_model(oscillating(), Family::ExpRepel, 4.0);
  const auto traj = sd::iterate(m, point({0.2, 0.3, 0.5}), 2000);
  const auto& a = traj.points[1998];
  const auto& b = traj.points[1999];
  EXPECT_LE(sd::l1_distance(traj.points[1996], a), 1e-9);
  EXPECT_LE(sd::l1_distance(traj.points[1997], b), 1e-9);
  const bool a_first = a[2] > b[2];
  const auto& pa = a_first ? a : b;
  const auto& pb = a_first ? b : a;
  EXPECT_LE(max_abs_diff(pa, {0.1943, 0.1042, 0.7015}), 1e-3);
  EXPECT_LE(max_abs_diff(pb, {0.6450, 0.2005, 0.1545}), 1e-3);
}

TEST(FpUpdate, NoReinforcementGivesPerron) {
  const auto m = make_model(single_leader(), Family::LinearAttract, 0.0);
  EXPECT_LE(max_abs_diff(sd::fp_update(m, point({0.2, 0.3, 0.5})), {2.0 / 3, 1.0 / 6, 1.0 / 6}), 1e-9);
}

TEST(FpUpdate, MatchesOracleOfTransitionMatrix) {
  const auto m = make_model(single_leader(), Family::ExpAttract, 1.0);
  const auto p = SimplexVector::uniform(3);
  const Vector oracle = oracle_perron(sd::transition_matrix(m, p).entries());
  EXPECT_LE((sd::fp_update(m, p).entries() - oracle).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(FpUpdate, FixedPointOfMapIsFixedPointOfUpdate) {
  const auto m = make_model(single_leader(), Family::ExpAttract, 1.0);
  const auto star = sd::solve_kappa(m).points.front().point;
  EXPECT_LE(sd::l1_distance(sd::fp_update(m, star), star), 1e-9);
}

TEST(EulerFlow, StationaryAtEquilibria) {
  const auto m = make_model(single_leader(), Family::ExpAttract, 1.0);
  const auto star = sd::solve_kappa(m).points.front().point;
  const auto traj = sd::euler_flow(m, star, 0.05, 20);
  for (std::size_t t = 0; t + 1 < traj.size(); ++t) EXPECT_LE(sd::l1_distance(traj.points[t], traj.points[t + 1]), 1e-12);
  const auto ring = make_model(symmetric_ring(), Family::ExpRepel, 2.0);
  EXPECT_LE(sd::l1_distance(sd::euler_flow(ring, SimplexVector::uniform(3), 0.1, 10).back(), SimplexVector::uniform(3)),
            1e-12);
}

TEST(EulerFlow, OneStepMatchesLazyDiscreteStep) {
  Rng rng(35);
  for (int t = 0; t < 500; ++t) {
    const Family f = closed_families()[t % 4];
    const auto m = random_model(rng, f, 3 + t % 3);
    const auto p = random_simplex(rng, m.size());
    const double h = 0.1 / (1 + t % 5);
    const Vector euler = sd::euler_flow(m, p, h, 1).back().entries();
    const Vector lazy = (1 - h) * p.entries() + h * oracle_step(m, p.entries());
    EXPECT_LE((euler - lazy).lpNorm<1>(), 1e-12);
  }
}

TEST(EulerFlow, FirstOrderConvergence) {
  const auto m = make_model(single_leader(), Family::ExpAttract, 4.0);
  const auto p0 = point({0.2, 0.3, 0.5});
  const double horizon = 2.0;
  const Vector exact = oracle_flow_rk4(single_leader().entries(), Family::ExpAttract, 4.0, p0.entries(), horizon, 20000);
  double prev = 0.0;
  for (double h : {0.04, 0.02, 0.01, 0.005}) {
    const auto steps = static_cast<std::size_t>(std::lround(horizon / h));
    const double err = (sd::euler_flow(m, p0, h, steps).back().entries() - exact).lpNorm<1>();
    if (prev > 0.0) {
      EXPECT_GT(prev / err, 1.8);
      EXPECT_LT(prev / err, 2.2);
    }
    prev = err;
  }
}

TEST(EulerFlow, Preconditions) {
  const auto m = make_model(single_leader(), Family::ExpAttract, 1.0);
  EXPECT_THROW(sd::euler_flow(m, SimplexVector::uniform(3), 0.5, 1), sd::DomainError);
  EXPECT_THROW(sd::euler_flow(m, SimplexVector::uniform(3), 0.0, 1), sd::DomainError);
  ModelOptions opts;
  opts.stay = symmetric_ring();
  const ModelSpec general(single_leader(), Reinforcement(Family::ExpAttract, 1.0), opts);
  EXPECT_THROW(sd::euler_flow(general, SimplexVector::uniform(3), 0.05, 1), sd::PreconditionError);
}
