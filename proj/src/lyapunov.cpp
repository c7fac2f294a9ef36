#include "gyrover/lyapunov.hpp"

#include <cmath>
#include <numbers>

#include "gyrover/errors.hpp"

namespace gyrover {
namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;
constexpr double kFitFloor = 1e-12;

}  // namespace

double balance_v_star(const GeneralizedState& s, double k1) {
  const double x = s.beta - kHalfPi;
  const double y = s.beta_dot + x;
  const double z = s.beta_ddot + (1.0 + k1) * y;
  return 0.5 * (x * x + y * y + z * z);
}

double balance_v(const GeneralizedState& s) { return balance_v_star(s, 1.0); }

double balance_v_alpha(const GeneralizedState& s, double k2) {
  return std::sqrt(k2 * balance_v(s)) / 4.0 + 0.5 * s.alpha_dot * s.alpha_dot;
}

double lean_v1(const GeneralizedState& s) {
  const double x = s.beta - kHalfPi;
  const double y = s.beta_dot + x;
  return 0.5 * (x * x + y * y);
}

double position_v(const GeneralizedState& s, const PolarView& pv) {
  return lean_v1(s) + 0.5 * pv.e * pv.e;
}

double line_v(const GeneralizedState& s, const LineGeometry& lg) {
  return lean_v1(s) + 0.5 * lg.e * lg.e + 0.5 * lg.d * lg.d;
}

double lyapunov_value(const LyapunovSpec& spec, const GeneralizedState& s,
                      const LyapunovContext& ctx) {
  switch (spec.kind) {
    case LyapunovKind::BalanceV:
      return balance_v(s);
    case LyapunovKind::BalanceVAlpha:
      return balance_v_alpha(s, spec.k2);
    case LyapunovKind::BalanceVStar:
      return balance_v_star(s, spec.k1);
    case LyapunovKind::PositionV:
      if (!ctx.polar) throw Error("PositionV needs a polar view");
      return position_v(s, *ctx.polar);
    case LyapunovKind::LineV:
      if (!ctx.line) throw Error("LineV needs line geometry");
      return line_v(s, *ctx.line);
  }
  throw Error("unknown Lyapunov kind");
}

double closed_form_beta(double a, double b, double c, double t) {
  const double w = std::numbers::sqrt2 * t;
  return std::exp(-t) *
         ((3.0 * a + 2.0 * b + c) + std::numbers::sqrt2 * (a + b) * std::sin(w) -
          (a + 2.0 * b + c) * std::cos(w)) /
         2.0;
}

double closed_form_alpha_dot(double alpha_dot0, double v0, double k2, double t) {
  const double sign0 = alpha_dot0 > 0.0 ? 1.0 : -1.0;
  const double drive = std::pow(k2 * v0, 0.25);
  return std::exp(-t) * alpha_dot0 +
         sign0 * 2.0 * (std::exp(-0.5 * t) - std::exp(-t)) * drive;
}

DecayReport decay_monitor(std::span<const double> times, std::span<const double> values,
                          LyapunovKind kind, double tolerance) {
  if (values.empty()) throw EmptyTrajectoryError("decay monitor given no samples");
  if (times.size() != values.size()) {
    throw Error("decay monitor: times and values differ in length");
  }
  DecayReport report;
  report.values.assign(values.begin(), values.end());
  for (std::size_t i = 1; i < values.size(); ++i) {
    const double inc = values[i] - values[i - 1];
    if (inc > report.max_increase) report.max_increase = inc;
    if (inc > tolerance) report.violation_times.push_back(times[i]);
  }

  if (kind == LyapunovKind::BalanceV || kind == LyapunovKind::BalanceVStar) {
    double n = 0.0, st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (!(values[i] > kFitFloor)) continue;
      const double y = std::log(values[i]);
      n += 1.0;
      st += times[i];
      sy += y;
      stt += times[i] * times[i];
      sty += times[i] * y;
    }
    const double denom = n * stt - st * st;
    if (n >= 2.0 && denom > 0.0) report.fitted_rate = (n * sty - st * sy) / denom;
  }
  return report;
}

}  // namespace gyrover
