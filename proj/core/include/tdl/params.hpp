#pragma once

#include <cmath>

#include "tdl/errors.hpp"

namespace tdl {

// The fixed twist theta of tau(n, theta) together with the numerical policy
// shared by the analytic modules.
class TwistedParams {
 public:
  static constexpr double kDefaultThetaFloor = 1e-3;
  static constexpr double kDefaultPrecisionTarget = 1e-10;

  explicit TwistedParams(double theta, double theta_floor = kDefaultThetaFloor,
                         double precision_target = kDefaultPrecisionTarget)
      : theta_(theta), theta_floor_(theta_floor), precision_target_(precision_target) {
    if (!(theta_floor > 0.0) || !(precision_target > 0.0)) {
      throw DomainError("theta_floor and precision_target must be positive");
    }
    if (!std::isfinite(theta) || std::abs(theta) < theta_floor) {
      throw DomainError("|theta| must be at least theta_floor; poles of D(s) collide as theta -> 0");
    }
  }

  // Skips the theta-floor check. Only for degeneration tests (theta = 0
  // reduces tau(n, theta) to the divisor count d(n)).
  static TwistedParams unchecked(double theta) {
    TwistedParams p;
    p.theta_ = theta;
    return p;
  }

  double theta() const noexcept { return theta_; }
  double theta_floor() const noexcept { return theta_floor_; }
  double precision_target() const noexcept { return precision_target_; }
  bool degenerate() const noexcept { return std::abs(theta_) < theta_floor_; }

 private:
  TwistedParams() = default;

  double theta_ = 1.0;
  double theta_floor_ = kDefaultThetaFloor;
  double precision_target_ = kDefaultPrecisionTarget;
};

}  // namespace tdl
