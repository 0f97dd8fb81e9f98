#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace steklov {

using Vec2 = Eigen::Vector2d;

/// Error thrown for violated preconditions, invalid inputs and numerical
/// failures. The message names the offending quantity.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

inline constexpr double kPi = 3.141592653589793238462643383279502884;

/// Wraps s into [0, period).
inline double wrap_coordinate(double s, double period) {
  double r = std::fmod(s, period);
  if (r < 0.0) r += period;
  // fmod can return the period itself after the correction when s is a
  // tiny negative number.
  if (r >= period) r = 0.0;
  return r;
}

/// Cyclic distance between two arclength coordinates on a loop of length
/// `period`: min(|a-b|, period-|a-b|).
inline double cyclic_distance(double a, double b, double period) {
  double d = std::abs(wrap_coordinate(a, period) - wrap_coordinate(b, period));
  return std::min(d, period - d);
}

/// FNV-1a over a byte string, used for provenance hashes.
inline std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace steklov
