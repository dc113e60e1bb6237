#pragma once

#include "varint/scalar.hpp"

#include <random>

namespace varint::test {

// Installs an MPFR default precision for the lifetime of the guard.
class ExtendedDigits {
 public:
  explicit ExtendedDigits(int digits) : saved_(Extended::default_precision()) {
    Extended::default_precision(static_cast<unsigned>(digits));
  }
  ~ExtendedDigits() { Extended::default_precision(saved_); }
  ExtendedDigits(const ExtendedDigits&) = delete;
  ExtendedDigits& operator=(const ExtendedDigits&) = delete;

 private:
  unsigned saved_;
};

inline std::mt19937_64& rng() {
  static std::mt19937_64 g(20240611);
  return g;
}

inline double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng()); }

inline double rel_err(double a, double b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s == 0 ? 0 : std::abs(a - b) / s;
}

}  // namespace varint::test
