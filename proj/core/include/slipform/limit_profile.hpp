#pragma once

// Continuous piecewise-affine curves u : (0, L) -> R^2, the arguments of the
// limit functional.

#include <istream>
#include <ostream>
#include <vector>

#include "slipform/matrix2.hpp"

namespace slipform {

class LimitProfile {
 public:
  /// `breakpoints` = t_0 = 0 < t_1 < ... < t_N = L, one derivative per
  /// segment. Throws Errc::InvalidRange otherwise.
  LimitProfile(std::vector<double> breakpoints, std::vector<Vec2> derivatives, Vec2 anchor = {});

  /// Straight profile u(t) = anchor + t xi on (0, L).
  static LimitProfile straight(double L, Vec2 xi, Vec2 anchor = {});

  double length() const { return breakpoints_.back(); }
  std::size_t segments() const { return derivatives_.size(); }
  const std::vector<double> &breakpoints() const { return breakpoints_; }
  const std::vector<Vec2> &derivatives() const { return derivatives_; }
  Vec2 anchor() const { return anchor_; }
  double segment_length(std::size_t n) const { return breakpoints_[n + 1] - breakpoints_[n]; }

  /// u at t in [0, L] (clamped).
  Vec2 value(double t) const;
  /// Values at the breakpoints, accumulated left to right.
  std::vector<Vec2> vertex_values() const;

  /// CSV with header "t_end,xi1,xi2" and one row per segment; the profile
  /// starts at t = 0 with u(0) = 0. Throws Errc::ParseError.
  static LimitProfile read_csv(std::istream &in);
  void write_csv(std::ostream &out) const;

 private:
  std::vector<double> breakpoints_;
  std::vector<Vec2> derivatives_;
  Vec2 anchor_;
};

/// max_t |a(t) - b(t)|; both profiles must have the same length.
double sup_distance(const LimitProfile &a, const LimitProfile &b);

}  // namespace slipform
