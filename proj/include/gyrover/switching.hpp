#pragma once

#include <optional>

namespace gyrover {

enum class SwitchKind { Sgn, Theta, Tanh, Uanh };

/// 1 for x >= 0, -1 otherwise.
double sgn(double x);
/// 1 for x >= 0, 0 otherwise.
double heaviside(double x);
/// (1 - exp(-k6 x)) / (1 + exp(-k6 x)), a bipolar stand-in for sgn.
double tanh_switch(double x, double k6);
/// 1 / (1 + exp(-k7 x)), a unipolar stand-in for heaviside.
double uanh_switch(double x, double k7);

/// `gain` is k6 for Tanh, k7 for Uanh and ignored otherwise.
double switching(double x, SwitchKind kind, double gain = 0.0);

/// Gains of the smooth substitutes for the hard switches.
struct Smoothing {
  double k6 = 20.0;
  double k7 = 20.0;

  bool operator==(const Smoothing&) const = default;
};

/// The bipolar and unipolar switch used by a controller: hard (Sgn, Theta)
/// when no smoothing is configured, (Tanh, Uanh) otherwise.
class SwitchSet {
 public:
  explicit SwitchSet(std::optional<Smoothing> smoothing = std::nullopt)
      : smoothing_(smoothing) {}

  double bipolar(double x) const {
    return smoothing_ ? tanh_switch(x, smoothing_->k6) : sgn(x);
  }
  double unipolar(double x) const {
    return smoothing_ ? uanh_switch(x, smoothing_->k7) : heaviside(x);
  }
  bool smoothed() const { return smoothing_.has_value(); }

 private:
  std::optional<Smoothing> smoothing_;
};

}  // namespace gyrover
