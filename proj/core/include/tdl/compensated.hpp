#pragma once

namespace tdl {

// Double-double accumulator built on Knuth's error-free TwoSum. The pair
// (hi, lo) represents hi + lo exactly up to the rounding of each addition,
// so summing ~10^9 terms of size ~10 keeps a full binary64 result.
//
// Adding the same values in the same order always gives the same bits;
// callers fix the order to get reproducible reductions.
class CompensatedSum {
 public:
  constexpr CompensatedSum() = default;
  constexpr explicit CompensatedSum(double v) : hi_(v) {}

  constexpr void add(double v) noexcept {
    const double s = hi_ + v;
    const double bb = s - hi_;
    const double err = (hi_ - (s - bb)) + (v - bb);
    hi_ = s;
    lo_ += err;
  }

  constexpr void add(const CompensatedSum& other) noexcept {
    add(other.hi_);
    lo_ += other.lo_;
  }

  constexpr double value() const noexcept { return hi_ + lo_; }
  constexpr double hi() const noexcept { return hi_; }
  constexpr double lo() const noexcept { return lo_; }

 private:
  double hi_ = 0.0;
  double lo_ = 0.0;
};

}  // namespace tdl
