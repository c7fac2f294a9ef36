#include "gyrover/kinematics.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "gyrover/errors.hpp"
#include "gyrover/simulator.hpp"

namespace gyrover {
namespace {

constexpr double kPi = std::numbers::pi;

const RobotParams kParams{};

GeneralizedState pose(double alpha, double beta, double ad, double bd, double gd) {
  GeneralizedState s;
  s.alpha = alpha;
  s.beta = beta;
  s.alpha_dot = ad;
  s.beta_dot = bd;
  s.gamma_dot = gd;
  return s;
}

// Contact point with the opposite y sign, a negative control.
ContactPoint variant_contact(double x, double y, double alpha, double beta, double r) {
  return {x - r * std::sin(alpha) * std::cos(beta), y - r * std::cos(alpha) * std::cos(beta)};
}

TEST(WrapAngle, HalfOpenInterval) {
  EXPECT_DOUBLE_EQ(wrap_angle(kPi), kPi);
  EXPECT_DOUBLE_EQ(wrap_angle(-kPi), kPi);
  EXPECT_NEAR(wrap_angle(3 * kPi / 2), -kPi / 2, 1e-15);
  EXPECT_NEAR(wrap_angle(-7.0), -7.0 + 2 * kPi, 1e-15);
  EXPECT_DOUBLE_EQ(wrap_angle(0.25), 0.25);
}

TEST(RollingVelocity, AxisAligned) {
  auto v = rolling_velocity(pose(0, kPi / 2, 0, 0, 1), kParams);
  EXPECT_NEAR(v[0], 1.0, 1e-15);
  EXPECT_NEAR(v[1], 0.0, 1e-15);
  v = rolling_velocity(pose(kPi / 2, kPi / 2, 0, 0, 1), kParams);
  EXPECT_NEAR(v[0], 0.0, 1e-15);
  EXPECT_NEAR(v[1], 1.0, 1e-15);
  v = rolling_velocity(pose(0.4, 1.2, 0, 0, 0), kParams);
  EXPECT_EQ(v[0], 0.0);
  EXPECT_EQ(v[1], 0.0);
}

TEST(ContactPoint, VerticalWheelSitsUnderCenter) {
  const auto a = contact_point(1.5, -2.0, 0.7, kPi / 2, kParams);
  EXPECT_NEAR(a.x_a, 1.5, 1e-15);
  EXPECT_NEAR(a.y_a, -2.0, 1e-15);
}

TEST(ContactPoint, LeanedReference) {
  const auto a = contact_point(1.0, 0.0, 0.0, kPi / 3, kParams);
  EXPECT_NEAR(a.x_a, 1.0, 1e-15);
  EXPECT_NEAR(a.y_a, 0.5, 1e-15);
}

TEST(ContactPoint, CenterRoundTrip) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::uniform_real_distribution<double> beta(0.2, kPi - 0.2);
  for (int i = 0; i < 100; ++i) {
    const ContactPoint a{u(rng), u(rng)};
    const double al = u(rng);
    const double be = beta(rng);
    const Point2 c = center_from_contact(a, al, be, kParams);
    const ContactPoint back = contact_point(c.x, c.y, al, be, kParams);
    ASSERT_NEAR(back.x_a, a.x_a, 1e-14);
    ASSERT_NEAR(back.y_a, a.y_a, 1e-14);
  }
}

TEST(ContactVelocity, Basics) {
  auto v = contact_velocity(0.3, 0.0, kParams);
  EXPECT_EQ(v[0], 0.0);
  EXPECT_EQ(v[1], 0.0);
  v = contact_velocity(0.0, 2.0, kParams);
  EXPECT_DOUBLE_EQ(v[0], 2.0);
  EXPECT_DOUBLE_EQ(v[1], 0.0);
}

TEST(ContactVelocity, SpeedIsRollingRate) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  RobotParams p;
  p.radius = 0.34;
  for (int i = 0; i < 100; ++i) {
    const double gd = 3 * u(rng);
    const auto v = contact_velocity(u(rng), gd, p);
    ASSERT_NEAR(std::hypot(v[0], v[1]), p.radius * std::abs(gd), 1e-14);
  }
}

// Differentiates the contact map along an integrated center-of-mass path and
// compares with the contact velocity.
TEST(ContactPoint, DerivativeMatchesContactVelocity) {
  SimConfig cfg;
  cfg.dt = 1e-4;
  cfg.initial.q = pose(0.3, kPi / 2 + 0.2, 0.8, -0.3, 1.1);
  WheelState w = prepare_initial(cfg);
  const DecoupledCommand u{0.5, -0.4};
  std::vector<WheelState> path{w};
  for (int i = 0; i < 2000; ++i) path.push_back(w = step(w, u, cfg));

  int variant_failures = 0;
  int checked = 0;
  for (std::size_t i = 10; i + 1 < path.size(); i += 10) {
    const auto& prev = path[i - 1];
    const auto& next = path[i + 1];
    const auto& cur = path[i];
    const auto a0 = contact_point(prev.center.x, prev.center.y, prev.q.alpha, prev.q.beta, kParams);
    const auto a1 = contact_point(next.center.x, next.center.y, next.q.alpha, next.q.beta, kParams);
    const double vx = (a1.x_a - a0.x_a) / (2 * cfg.dt);
    const double vy = (a1.y_a - a0.y_a) / (2 * cfg.dt);
    const auto v = contact_velocity(cur.q.alpha, cur.q.gamma_dot, kParams);
    const double scale = std::hypot(v[0], v[1]);
    ASSERT_NEAR(vx, v[0], 1e-6 * scale);
    ASSERT_NEAR(vy, v[1], 1e-6 * scale);

    const auto p0 = variant_contact(prev.center.x, prev.center.y, prev.q.alpha, prev.q.beta, 1.0);
    const auto p1 = variant_contact(next.center.x, next.center.y, next.q.alpha, next.q.beta, 1.0);
    const double px = (p1.x_a - p0.x_a) / (2 * cfg.dt);
    const double py = (p1.y_a - p0.y_a) / (2 * cfg.dt);
    if (std::hypot(px - v[0], py - v[1]) > 1e-3 * scale) ++variant_failures;
    ++checked;
  }
  EXPECT_EQ(variant_failures, checked);
}

TEST(ContactPoint, IntegratedContactAgreesWithMap) {
  SimConfig cfg;
  cfg.initial.q = pose(-0.2, kPi / 2 - 0.15, 0.6, 0.2, 1.4);
  WheelState w = prepare_initial(cfg);
  for (int i = 0; i < 1000; ++i) w = step(w, DecoupledCommand{-0.3, 0.2}, cfg);
  const auto a = contact_point(w.center.x, w.center.y, w.q.alpha, w.q.beta, kParams);
  EXPECT_NEAR(a.x_a, w.contact.x_a, 1e-9);
  EXPECT_NEAR(a.y_a, w.contact.y_a, 1e-9);
}

TEST(PolarView, ScenarioStart) {
  const auto pv = polar_view({3, 4}, 0.0, {0, 0});
  EXPECT_DOUBLE_EQ(pv.e, 5.0);
  EXPECT_NEAR(pv.theta, std::atan2(4.0, 3.0), 1e-15);
}

TEST(PolarView, HeadingAwayFromTarget) {
  const auto pv = polar_view({3, 4}, std::atan2(4.0, 3.0), {0, 0});
  EXPECT_NEAR(pv.psi, 0.0, 1e-15);
  const auto r = polar_rates(pv, 0.7, -1.5, kParams);
  EXPECT_NEAR(r.e_dot, -1.5, 1e-15);
  EXPECT_NEAR(r.psi_dot, -0.7, 1e-15);
}

TEST(PolarView, AtTarget) {
  const auto pv = polar_view({1, 1}, 2.0, {1, 1});
  EXPECT_EQ(pv.e, 0.0);
  EXPECT_EQ(pv.psi, 0.0);
  const auto r = polar_rates(pv, 0.4, 3.0, kParams);
  EXPECT_EQ(r.e_dot, 0.0);
  EXPECT_EQ(r.psi_dot, -0.4);
  const auto near = polar_view({1 + 1e-7, 1}, 2.0, {1, 1});
  EXPECT_EQ(near.e, 0.0);
}

TEST(PolarView, PsiIsWrapped) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int i = 0; i < 1000; ++i) {
    const auto pv = polar_view({u(rng), u(rng)}, u(rng), {u(rng), u(rng)});
    ASSERT_GT(pv.psi, -kPi);
    ASSERT_LE(pv.psi, kPi);
    ASSERT_GE(pv.e, 0.0);
  }
}

TEST(PolarRates, TangentMotion) {
  PolarView pv{2.0, 0.0, kPi / 2};
  const auto r = polar_rates(pv, 0.0, 1.0, kParams);
  EXPECT_NEAR(r.e_dot, 0.0, 1e-15);
  EXPECT_NEAR(r.psi_dot, -0.5, 1e-15);
}

// Drives the contact point with constant rates and differentiates the polar
// chart numerically.
TEST(PolarRates, MatchFiniteDifferences) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  RobotParams p;
  p.radius = 0.3;
  const Point2 target{0.5, -0.2};
  constexpr double dt = 1e-5;
  for (int run = 0; run < 100; ++run) {
    ContactPoint a{3 * u(rng) + 2.0, 3 * u(rng) - 2.0};
    double alpha = 3 * u(rng);
    const double ua = u(rng);
    const double ug = 2 * u(rng);
    auto advance = [&](ContactPoint c, double al, double h) {
      // Exact solution of x' = R ug cos(alpha), alpha' = ua.
      ContactPoint out = c;
      if (ua == 0.0) {
        out.x_a += p.radius * ug * std::cos(al) * h;
        out.y_a += p.radius * ug * std::sin(al) * h;
      } else {
        out.x_a += p.radius * ug * (std::sin(al + ua * h) - std::sin(al)) / ua;
        out.y_a -= p.radius * ug * (std::cos(al + ua * h) - std::cos(al)) / ua;
      }
      return out;
    };
    const auto pv = polar_view(a, alpha, target);
    if (pv.e < 0.1) continue;
    const auto pf = polar_view(advance(a, alpha, dt), alpha + ua * dt, target);
    const auto pb = polar_view(advance(a, alpha, -dt), alpha - ua * dt, target);
    const double e_dot = (pf.e - pb.e) / (2 * dt);
    const double psi_dot = wrap_angle(pf.psi - pb.psi) / (2 * dt);
    const auto r = polar_rates(pv, ua, ug, p);
    ASSERT_NEAR(e_dot, r.e_dot, 1e-3 * std::max(std::abs(r.e_dot), 1e-3));
    ASSERT_NEAR(psi_dot, r.psi_dot, 1e-3 * std::max(std::abs(r.psi_dot), 1e-3));
  }
}

TEST(LineGeometry, PointOnSegment) {
  const double alpha = 0.4;
  const auto g = line_geometry({2, 0}, alpha, {5, 0});
  EXPECT_NEAR(g.e, 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(g.r, 2.0);
  EXPECT_DOUBLE_EQ(g.d, 3.0);
  EXPECT_DOUBLE_EQ(g.length, 5.0);
  EXPECT_NEAR(g.p, -3.0 * std::cos(alpha), 1e-14);
}

TEST(LineGeometry, AtOrigin) {
  const auto g = line_geometry({0, 0}, 0.0, {3, 4});
  EXPECT_EQ(g.r, 0.0);
  EXPECT_EQ(g.e, 0.0);
  EXPECT_DOUBLE_EQ(g.d, 5.0);
}

TEST(LineGeometry, DegenerateLine) {
  EXPECT_THROW(line_geometry({1, 1}, 0.0, {0, 0}), DegenerateLineError);
  EXPECT_THROW(line_geometry({1, 1}, 0.0, {2, 2}, {2, 2}), DegenerateLineError);
}

TEST(LineGeometry, Invariants) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int i = 0; i < 1000; ++i) {
    const ContactPoint a{u(rng), u(rng)};
    const Point2 end{u(rng), u(rng)};
    const double alpha = u(rng);
    const auto g = line_geometry(a, alpha, end);
    ASSERT_GE(g.e, 0.0);
    ASSERT_LE(g.e, g.r + 1e-12);
    ASSERT_GE(g.d, 0.0);
    ASSERT_NEAR(g.length, std::hypot(end.x, end.y), 1e-12);
    ASSERT_NEAR(g.p, g.r * std::cos(g.theta - alpha) - g.length * std::cos(g.phi - alpha), 1e-12);
    // Signed distance to the infinite line through the origin and end.
    const double cross = (end.x * a.y_a - end.y * a.x_a) / g.length;
    ASSERT_NEAR(g.e, std::abs(cross), 1e-10);
  }
}

TEST(LineGeometry, OffsetStartIsTranslationInvariant) {
  const Point2 shift{1.5, -2.5};
  const auto a = line_geometry({2, 1}, 0.3, {4, 3});
  const auto b = line_geometry({2 + shift.x, 1 + shift.y}, 0.3, {4 + shift.x, 3 + shift.y}, shift);
  EXPECT_NEAR(a.e, b.e, 1e-12);
  EXPECT_NEAR(a.d, b.d, 1e-12);
  EXPECT_NEAR(a.p, b.p, 1e-12);
}

// e e' = r R ug S(phi - alpha) S(phi - theta) and d d' = p R ug.
TEST(LineGeometry, RateIdentities) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  constexpr double dt = 1e-6;
  const Point2 end{5.0, 1.0};
  for (int i = 0; i < 100; ++i) {
    const ContactPoint a{3 * u(rng) + 1.0, 3 * u(rng)};
    const double alpha = 3 * u(rng);
    const double ug = u(rng) + 1.5;
    const auto v = contact_velocity(alpha, ug, kParams);
    const auto f = line_geometry({a.x_a + v[0] * dt, a.y_a + v[1] * dt}, alpha, end);
    const auto b = line_geometry({a.x_a - v[0] * dt, a.y_a - v[1] * dt}, alpha, end);
    const auto g = line_geometry(a, alpha, end);
    if (g.e < 0.05) continue;
    const double ee_dot = (f.e * f.e - b.e * b.e) / (4 * dt);
    const double pred = g.r * kParams.radius * ug * std::sin(g.phi - alpha) * std::sin(g.phi - g.theta);
    ASSERT_NEAR(ee_dot, pred, 1e-3 * std::max(std::abs(pred), 1e-3));
    const double dd_dot = (f.d * f.d - b.d * b.d) / (4 * dt);
    ASSERT_NEAR(dd_dot, g.p * kParams.radius * ug, 1e-3 * std::max(std::abs(g.p * ug), 1e-3));
  }
}

TEST(LineGeometry, OnLineIffSineVanishes) {
  for (double t : {-2.0, 0.5, 1.0, 3.0}) {
    const auto g = line_geometry({t * 2.0, t * 1.0}, 0.1, {4, 2});
    EXPECT_NEAR(g.e, 0.0, 1e-14);
    EXPECT_NEAR(std::sin(g.phi - g.theta), 0.0, 1e-14);
  }
}

}  // namespace
}  // namespace gyrover
