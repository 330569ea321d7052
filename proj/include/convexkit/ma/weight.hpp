#pragma once

#include "convexkit/core/geometry.hpp"

#include <functional>
#include <memory>
#include <string>

namespace convexkit::ma {

/// Positive weight theta(p, z, x) of the conditional curvature, where p is a
/// slope, z a function value and x a domain point.
///
/// Parsed expressions use the variables p1 p2 z x1 x2 (x y alias x1 x2), the
/// constants pi and e, + - * / ^, and the functions sqrt exp log sin cos tan
/// abs pow min max.
class Weight {
 public:
  using Function = std::function<double(const Vec2& p, double z, const Vec2& x)>;

  /// theta = 1.
  Weight();
  static Weight constant(double value);
  /// Throws ParseError with the column as `line` on malformed input.
  static Weight parse(const std::string& expression);
  static Weight from_function(Function f, bool uses_p, bool uses_z, bool uses_x, std::string label = "custom");

  double operator()(const Vec2& p, double z, const Vec2& x) const { return eval_(p, z, x); }

  bool uses_p() const { return uses_p_; }
  bool uses_z() const { return uses_z_; }
  bool uses_x() const { return uses_x_; }
  bool is_constant() const { return !uses_p_ && !uses_z_ && !uses_x_; }
  /// Source expression, or a label for programmatic weights.
  const std::string& text() const { return text_; }

 private:
  Function eval_;
  bool uses_p_ = false;
  bool uses_z_ = false;
  bool uses_x_ = false;
  std::string text_;
};

}  // namespace convexkit::ma
