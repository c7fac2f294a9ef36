#include "gyrover/switching.hpp"

#include <cmath>

namespace gyrover {

double sgn(double x) { return x >= 0.0 ? 1.0 : -1.0; }

double heaviside(double x) { return x >= 0.0 ? 1.0 : 0.0; }

double tanh_switch(double x, double k6) {
  // Identical to (1 - e^{-k6 x}) / (1 + e^{-k6 x}) without the overflow.
  return std::tanh(0.5 * k6 * x);
}

double uanh_switch(double x, double k7) { return 1.0 / (1.0 + std::exp(-k7 * x)); }

double switching(double x, SwitchKind kind, double gain) {
  switch (kind) {
    case SwitchKind::Sgn:
      return sgn(x);
    case SwitchKind::Theta:
      return heaviside(x);
    case SwitchKind::Tanh:
      return tanh_switch(x, gain);
    case SwitchKind::Uanh:
      return uanh_switch(x, gain);
  }
  return sgn(x);
}

}  // namespace gyrover
