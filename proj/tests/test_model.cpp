#include <gtest/gtest.h>

#include "support.hpp"

namespace sd = simplexdyn;
using namespace testing_support;

TEST(Reinforcement, Values) {
  EXPECT_EQ(sd::r_eval(Reinforcement(Family::ExpAttract, 4.0), 0.0), 0.0);
  EXPECT_EQ(sd::r_eval(Reinforcement(Family::LinearRepel, 1.0), 1.0), 0.0);
  EXPECT_NEAR(sd::r_eval(Reinforcement(Family::ExpRepel, 4.0), 1.0 / 3.0), std::exp(-4.0 / 3.0), 1e-15);
  EXPECT_NEAR(sd::r_eval(Reinforcement(Family::ExpRepel, 4.0), 1.0 / 3.0), 0.263597, 1e-6);
}

TEST(Reinforcement, Derivatives) {
  for (double g : {0.3, 1.0, 4.0}) {
    EXPECT_DOUBLE_EQ(sd::r_derivative(Reinforcement(Family::ExpAttract, g), 0.0), g);
    EXPECT_DOUBLE_EQ(sd::r_derivative(Reinforcement(Family::ExpRepel, g), 0.0), -g);
  }
  for (double x : {0.0, 0.3, 1.0}) EXPECT_EQ(sd::r_derivative(Reinforcement(Family::LinearAttract, 0.5), x), 0.5);
}

TEST(Reinforcement, DerivativeMatchesFiniteDifferences) {
  Rng rng(21);
  std::uniform_real_distribution<double> ux(1e-5, 1.0 - 1e-5);
  for (Family f : closed_families()) {
    const Reinforcement r(f, f == Family::ExpAttract || f == Family::ExpRepel ? 4.0 : 0.7);
    for (int k = 0; k < 100; ++k) {
      const double x = ux(rng), h = 1e-6;
      const double fd = (oracle_r(f, r.gamma(), x + h) - oracle_r(f, r.gamma(), x - h)) / (2 * h);
      EXPECT_NEAR(sd::r_derivative(r, x), fd, 1e-6);
    }
  }
}

TEST(Reinforcement, RangeStaysInUnitInterval) {
  Rng rng(22);
  for (Family f : closed_families()) {
    for (int k = 0; k < 20; ++k) {
      const Reinforcement r(f, random_gamma(rng, f));
      for (int i = 0; i <= 100; ++i) {
        const double v = sd::r_eval(r, i / 100.0);
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
      }
    }
  }
}

TEST(Reinforcement, GammaValidation) {
  EXPECT_THROW(Reinforcement(Family::LinearAttract, 1.5), sd::DomainError);
  EXPECT_THROW(Reinforcement(Family::LinearRepel, 1.01), sd::DomainError);
  EXPECT_THROW(Reinforcement(Family::ExpAttract, -1.0), sd::DomainError);
  EXPECT_NO_THROW(Reinforcement(Family::ExpAttract, 50.0));
  EXPECT_THROW(sd::r_eval(Reinforcement(Family::ExpAttract, 1.0), 1.5), sd::DomainError);
}

TEST(Reinforcement, FamilyNamesRoundTrip) {
  for (Family f : closed_families()) EXPECT_EQ(sd::family_from_string(sd::to_string(f)), f);
  EXPECT_FALSE(sd::family_from_string("Sigmoid"));
}

TEST(ModelSpec, ValidatesStructure) {
  EXPECT_THROW(make_model(RowStochasticMatrix({{0.0, 1.0}, {1.0, 0.0}}), Family::ExpAttract, 1.0),
               sd::PreconditionError);
  EXPECT_THROW(make_model(RowStochasticMatrix::identity(3), Family::ExpAttract, 1.0), sd::PreconditionError);
  ModelOptions unsafe;
  unsafe.allow_reducible = true;
  EXPECT_NO_THROW(ModelSpec(RowStochasticMatrix::identity(3), Reinforcement(Family::ExpAttract, 1.0), unsafe));
  ModelOptions bad;
  bad.grouping = RowStochasticMatrix::identity(2);
  EXPECT_THROW(ModelSpec(single_leader(), Reinforcement(Family::ExpAttract, 1.0), bad), sd::DimensionError);
}

TEST(GuaranteedContractive, Table) {
  EXPECT_TRUE(sd::guaranteed_contractive(make_model(single_leader(), Family::ExpAttract, 1.0)));
  EXPECT_TRUE(sd::guaranteed_contractive(make_model(single_leader(), Family::LinearAttract, 0.5)));
  EXPECT_FALSE(sd::guaranteed_contractive(make_model(single_leader(), Family::ExpAttract, 4.0)));
  EXPECT_TRUE(sd::guaranteed_contractive(make_model(single_leader(), Family::ExpRepel, 1.0)));
  EXPECT_FALSE(sd::guaranteed_contractive(make_model(single_leader(), Family::LinearAttract, 0.75)));
  EXPECT_THROW(sd::guaranteed_contractive(grouping_model(pair_grouping())), sd::PreconditionError);
}

TEST(GuaranteedContractive, ImpliesNonnegativeJacobian) {
  Rng rng(23);
  const std::vector<std::pair<Family, double>> regimes{{Family::ExpAttract, 1.0},   {Family::ExpAttract, 0.4},
                                                      {Family::ExpRepel, 1.0},     {Family::LinearAttract, 0.5},
                                                      {Family::LinearAttract, 0.2}, {Family::LinearRepel, 0.5}};
  for (const auto& [f, g] : regimes) {
    const ModelSpec m(random_stochastic(rng, 4), Reinforcement(f, g));
    ASSERT_TRUE(sd::guaranteed_contractive(m)) << sd::to_string(f) << ' ' << g;
    for (int k = 0; k < 500; ++k) {
      EXPECT_GE(sd::jacobian(m, random_simplex(rng, 4)).action.minCoeff(), -1e-12);
    }
  }
}

TEST(ModelSpec, CustomReinforcementSimulates) {
  const ModelSpec m(single_leader(), Reinforcement::custom([](double x) { return x * x; },
                                                           [](double x) { return 2 * x; }));
  const auto p = point({0.2, 0.3, 0.5});
  Vector direct = Vector::Zero(3);
  for (int i = 0; i < 3; ++i) {
    const double r = p[i] * p[i];
    direct[i] += r * p[i];
    direct += (1 - r) * p[i] * m.influence().entries().row(i).transpose();
  }
  EXPECT_LE((sd::step(m, p).entries() - direct).lpNorm<1>(), 1e-14);
  EXPECT_FALSE(sd::guaranteed_contractive(m));
}
