#pragma once

// Configurable-precision real arithmetic.
//
// Every numerical routine is a template over the scalar type and is
// instantiated for two backends:
//   double    native binary64, used for precision contexts of <= 16 digits
//   Extended  MPFR binary floating point whose precision is set once per run
//
// The MPFR default precision is process-global, so a context must be applied
// before any Extended value of the run is created and left alone until the
// run is finished.

#include <boost/multiprecision/mpfr.hpp>
#include <Eigen/Core>

#include <limits>
#include <string>

namespace varint {

using Extended = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>,
                                               boost::multiprecision::et_off>;

/// Smallest accepted precision; anything below cannot resolve the experiments.
inline constexpr int kMinDigits = 10;
/// Largest precision served by native double.
inline constexpr int kDoubleDigits = 16;

class PrecisionContext {
 public:
  int digits() const noexcept { return digits_; }
  bool extended() const noexcept { return digits_ > kDoubleDigits; }
  /// Binary mantissa bits carried by values under this context.
  int bits() const noexcept;
  /// Significant decimal digits needed to round-trip any value of the context.
  int serialization_digits() const noexcept;
  /// Installs the MPFR default precision (no-op for double contexts).
  void apply() const;

 private:
  friend PrecisionContext with_precision(int digits);
  explicit PrecisionContext(int digits) : digits_(digits) {}
  int digits_;
};

/// Throws ConfigError for digits < kMinDigits. Does not apply the context.
PrecisionContext with_precision(int digits);

/// Machine epsilon of the scalar type under the active context.
template <class Real>
Real epsilon() {
  return std::numeric_limits<Real>::epsilon();
}

template <class Real>
Real parse_scalar(const std::string& text);

/// Scientific notation with `significant` digits.
template <class Real>
std::string format_scalar(const Real& x, int significant);

/// Round-trip serialization under the active precision of Real.
template <class Real>
std::string format_scalar(const Real& x);

template <class Real>
double to_double(const Real& x) {
  return static_cast<double>(x);
}

template <class Real>
Real pi();

template <class Real>
bool is_finite(const Real& x) {
  using std::isfinite;
  using boost::multiprecision::isfinite;
  return isfinite(x);
}

}  // namespace varint

namespace Eigen {

template <>
struct NumTraits<varint::Extended> : GenericNumTraits<varint::Extended> {
  using Real = varint::Extended;
  using NonInteger = varint::Extended;
  using Nested = varint::Extended;
  using Literal = varint::Extended;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 1,
    AddCost = 4,
    MulCost = 4,
  };
  static Real epsilon() { return std::numeric_limits<Real>::epsilon(); }
  static Real dummy_precision() { return Real(1000) * epsilon(); }
  static Real highest() { return (std::numeric_limits<Real>::max)(); }
  static Real lowest() { return (std::numeric_limits<Real>::lowest)(); }
  static int digits10() { return static_cast<int>(Real::default_precision()); }
};

}  // namespace Eigen
