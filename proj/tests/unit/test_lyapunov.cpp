#include "gyrover/lyapunov.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "gyrover/errors.hpp"

namespace gyrover {
namespace {

constexpr double kPi = std::numbers::pi;

GeneralizedState lean(double x, double bd, double bdd, double ad = 0.0) {
  GeneralizedState s;
  s.beta = kPi / 2 + x;
  s.beta_dot = bd;
  s.beta_ddot = bdd;
  s.alpha_dot = ad;
  return s;
}

// Closed-loop lean jerk with damping gain k1.
double jerk(const std::array<double, 3>& y, double k1) {
  return -((2 + k1) * y[0] + (3 + 2 * k1) * y[1] + (2 + k1) * y[2]);
}

TEST(BalanceV, Values) {
  EXPECT_EQ(balance_v(lean(0, 0, 0)), 0.0);
  EXPECT_NEAR(balance_v(lean(0.1, 0, 0)), 0.03, 1e-15);
}

TEST(BalanceVStar, ReducesToBalanceV) {
  const auto s = lean(0.2, -0.1, 0.4);
  EXPECT_DOUBLE_EQ(balance_v_star(s, 1.0), balance_v(s));
  EXPECT_NE(balance_v_star(s, 2.0), balance_v(s));
}

TEST(PositionV, AtScenarioStart) {
  EXPECT_DOUBLE_EQ(position_v(lean(0, 0, 0), PolarView{5.0, 0.0, 0.0}), 12.5);
}

TEST(LyapunovValue, NeedsGeometry) {
  EXPECT_THROW(lyapunov_value({LyapunovKind::PositionV}, lean(0, 0, 0)), Error);
  EXPECT_THROW(lyapunov_value({LyapunovKind::LineV}, lean(0, 0, 0)), Error);
}

TEST(LyapunovValue, ZeroOnlyAtGoal) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  LineGeometry goal_line;
  const PolarView goal_polar{};
  const std::vector<LyapunovSpec> specs = {{LyapunovKind::BalanceV},
                                           {LyapunovKind::BalanceVStar, 2.5},
                                           {LyapunovKind::BalanceVAlpha, 1.0, 0.7},
                                           {LyapunovKind::PositionV},
                                           {LyapunovKind::LineV}};
  const LyapunovContext at_goal{goal_polar, goal_line};
  for (const auto& spec : specs) {
    EXPECT_EQ(lyapunov_value(spec, lean(0, 0, 0), at_goal), 0.0);
    for (int i = 0; i < 1000; ++i) {
      const auto s = lean(u(rng), u(rng), u(rng), u(rng));
      LineGeometry lg;
      lg.e = std::abs(u(rng));
      lg.d = std::abs(u(rng));
      const LyapunovContext ctx{PolarView{std::abs(u(rng)), 0, 0}, lg};
      ASSERT_GT(lyapunov_value(spec, s, ctx), 0.0);
    }
  }
}

// dV/dt along the linear jerk loop, by central differences in state space.
double v_dot(const std::array<double, 3>& y, double k1) {
  const std::array<double, 3> f{y[1], y[2], jerk(y, k1)};
  const double h = 1e-6;
  auto v = [&](double k) {
    return balance_v_star(lean(y[0] + k * h * f[0], y[1] + k * h * f[1], y[2] + k * h * f[2]),
                          k1);
  };
  return (v(1) - v(-1)) / (2 * h);
}

TEST(BalanceV, DecaysAtRateTwo) {
  std::mt19937_64 rng(32);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const std::array<double, 3> y{u(rng), u(rng), u(rng)};
    const double v = balance_v(lean(y[0], y[1], y[2]));
    ASSERT_NEAR(v_dot(y, 1.0), -2 * v, 1e-7 * (1 + v));
  }
}

TEST(BalanceVStar, DerivativeIsNegativeDefinite) {
  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> gain(0.0, 4.0);
  for (int i = 0; i < 200; ++i) {
    const std::array<double, 3> y{u(rng), u(rng), u(rng)};
    const double k1 = gain(rng);
    const double x = y[0];
    const double yy = y[1] + x;
    const double z = y[2] + (1 + k1) * yy;
    ASSERT_NEAR(v_dot(y, k1), -x * x - k1 * yy * yy - z * z, 1e-7);
  }
}

TEST(BalanceVAlpha, NonIncreasingUnderSteeringLaw) {
  std::mt19937_64 rng(34);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const double k2 = 0.2 + std::abs(u(rng));
    const std::array<double, 3> y{u(rng), u(rng), u(rng)};
    const double ad = std::abs(u(rng)) + 0.01;
    const double v = balance_v(lean(y[0], y[1], y[2]));
    const double u5 = -(ad - std::pow(k2 * v, 0.25));
    const double grad_v = std::sqrt(k2) / (8 * std::sqrt(v));  // d/dV of sqrt(k2 V)/4
    const double rate = grad_v * (-2 * v) + ad * u5;
    ASSERT_NEAR(rate, -std::pow(ad - 0.5 * std::pow(k2 * v, 0.25), 2), 1e-12);
    ASSERT_LE(rate, 1e-15);
  }
}

TEST(ClosedFormBeta, InitialValue) {
  std::mt19937_64 rng(35);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const double a = u(rng);
    ASSERT_NEAR(closed_form_beta(a, u(rng), u(rng), 0.0), a, 1e-15);
  }
}

TEST(ClosedFormBeta, Reference) {
  EXPECT_NEAR(closed_form_beta(0.1, 0, 0, 1.0), 0.0780082524576, 1e-12);
}

TEST(ClosedFormBeta, DecaysToZero) {
  EXPECT_NEAR(closed_form_beta(0.5, -0.3, 0.8, 60.0), 0.0, 1e-25);
}

TEST(ClosedFormBeta, SatisfiesJerkEquation) {
  std::mt19937_64 rng(36);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  const double h = 1e-2;
  for (int run = 0; run < 10; ++run) {
    const double a = u(rng), b = u(rng), c = u(rng);
    auto f = [&](double t) { return closed_form_beta(a, b, c, t); };
    for (double t = 0.01; t <= 5.0; t += 0.05) {
      const double d1 = (-f(t + 2 * h) + 8 * f(t + h) - 8 * f(t - h) + f(t - 2 * h)) / (12 * h);
      const double d2 = (-f(t + 2 * h) + 16 * f(t + h) - 30 * f(t) + 16 * f(t - h) - f(t - 2 * h)) /
                        (12 * h * h);
      const double d3 = (-f(t + 3 * h) + 8 * f(t + 2 * h) - 13 * f(t + h) + 13 * f(t - h) -
                         8 * f(t - 2 * h) + f(t - 3 * h)) /
                        (8 * h * h * h);
      ASSERT_NEAR(d3, -(3 * f(t) + 5 * d1 + 3 * d2), 1e-6);
    }
    const double s = 1e-5;
    EXPECT_NEAR((f(s) - f(-s)) / (2 * s), b, 1e-8);
    EXPECT_NEAR((f(s) - 2 * f(0) + f(-s)) / (s * s), c, 1e-4);
  }
}

TEST(ClosedFormAlphaDot, Basics) {
  EXPECT_DOUBLE_EQ(closed_form_alpha_dot(0.7, 0.03, 1.0, 0.0), 0.7);
  EXPECT_DOUBLE_EQ(closed_form_alpha_dot(0.7, 0.0, 1.0, 1.5), std::exp(-1.5) * 0.7);
  EXPECT_NEAR(closed_form_alpha_dot(1.0, 0.03, 1.0, 2.0), 0.328895340898123, 1e-12);
  EXPECT_DOUBLE_EQ(closed_form_alpha_dot(-1.0, 0.03, 1.0, 2.0),
                   -closed_form_alpha_dot(1.0, 0.03, 1.0, 2.0));
  EXPECT_DOUBLE_EQ(closed_form_alpha_dot(1.0, 0.03, 2.0, 2.0),
                   closed_form_alpha_dot(1.0, 0.06, 1.0, 2.0));
}

TEST(ClosedFormAlphaDot, MatchesSteeringOde) {
  // alpha'' = -(alpha' - (V0 e^{-2t})^{1/4}) integrated with RK4.
  const double v0 = 0.03;
  auto f = [&](double t, double ad) { return -(ad - std::pow(v0 * std::exp(-2 * t), 0.25)); };
  double ad = 1.0;
  const double dt = 1e-3;
  for (int k = 0; k < 2000; ++k) {
    const double t = k * dt;
    const double k1 = f(t, ad);
    const double k2 = f(t + dt / 2, ad + dt / 2 * k1);
    const double k3 = f(t + dt / 2, ad + dt / 2 * k2);
    const double k4 = f(t + dt, ad + dt * k3);
    ad += dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  EXPECT_NEAR(ad, closed_form_alpha_dot(1.0, v0, 1.0, 2.0), 1e-6);
}

TEST(ClosedFormAlphaDot, NeverCrossesZero) {
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 100; ++i) {
    const double ad0 = u(rng);
    if (ad0 == 0.0) continue;
    const double v0 = std::abs(u(rng));
    for (double t = 0; t <= 30; t += 0.01) {
      ASSERT_EQ(std::signbit(closed_form_alpha_dot(ad0, v0, 1.0, t)), std::signbit(ad0));
    }
  }
}

TEST(DecayMonitor, GoalTrajectory) {
  const std::vector<double> t{0, 1, 2, 3};
  const std::vector<double> v(4, 0.0);
  const auto r = decay_monitor(t, v, LyapunovKind::PositionV);
  EXPECT_TRUE(r.ok());
  EXPECT_EQ(r.max_increase, 0.0);
}

TEST(DecayMonitor, InjectedIncrease) {
  std::vector<double> t, v;
  for (int k = 0; k <= 100; ++k) {
    t.push_back(k * 0.01);
    v.push_back(1.0 - k * 0.001);
  }
  v[40] += 0.01;
  const auto r = decay_monitor(t, v, LyapunovKind::LineV);
  ASSERT_EQ(r.violation_times.size(), 1u);
  EXPECT_DOUBLE_EQ(r.violation_times[0], t[40]);
  EXPECT_NEAR(r.max_increase, 0.009, 1e-12);
  EXPECT_FALSE(r.fitted_rate.has_value());
}

TEST(DecayMonitor, FitsExponentialRate) {
  std::vector<double> t, v;
  for (int k = 0; k <= 500; ++k) {
    t.push_back(k * 0.01);
    v.push_back(0.03 * std::exp(-2 * t.back()));
  }
  const auto r = decay_monitor(t, v, LyapunovKind::BalanceV);
  ASSERT_TRUE(r.fitted_rate.has_value());
  EXPECT_NEAR(*r.fitted_rate, -2.0, 1e-9);
  EXPECT_TRUE(r.ok());
  EXPECT_EQ(r.values, v);
}

TEST(DecayMonitor, ToleranceBoundary) {
  const std::vector<double> t{0, 1, 2};
  const std::vector<double> v{1.0, 1.0 + 5e-7, 1.0 + 9e-7};
  const auto r = decay_monitor(t, v, LyapunovKind::PositionV);
  EXPECT_TRUE(r.ok());
  const auto strict = decay_monitor(t, v, LyapunovKind::PositionV, 1e-7);
  EXPECT_EQ(strict.violation_times.size(), 2u);
  EXPECT_EQ(r.ok(), r.max_increase <= kDefaultMonotonicityTolerance);
}

TEST(DecayMonitor, Errors) {
  const std::vector<double> none;
  EXPECT_THROW(decay_monitor(none, none, LyapunovKind::BalanceV), EmptyTrajectoryError);
  const std::vector<double> t{0, 1};
  const std::vector<double> v{1};
  EXPECT_THROW(decay_monitor(t, v, LyapunovKind::BalanceV), Error);
}

}  // namespace
}  // namespace gyrover
