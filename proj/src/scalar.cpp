#include "varint/scalar.hpp"

#include "varint/errors.hpp"

#include <boost/math/constants/constants.hpp>

#include <cmath>
#include <iomanip>
#include <sstream>

namespace varint {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Config: return "config";
    case ErrorCode::Domain: return "domain";
    case ErrorCode::NonMonotoneTime: return "non-monotone-time";
    case ErrorCode::NonConvergence: return "nonconvergence";
    case ErrorCode::IllPosed: return "ill-posed";
    case ErrorCode::UnsupportedOrder: return "unsupported-order";
    case ErrorCode::Io: return "io";
  }
  return "unknown";
}

namespace {

// Same digits -> bits rule as the MPFR backend, so bits() reports what the
// backend actually allocates.
int digits_to_bits(int digits) {
  return static_cast<int>(boost::multiprecision::detail::digits10_2_2(static_cast<unsigned long>(digits)));
}

}  // namespace

int PrecisionContext::bits() const noexcept {
  return extended() ? digits_to_bits(digits_) : std::numeric_limits<double>::digits;
}

int PrecisionContext::serialization_digits() const noexcept {
  if (!extended()) return std::numeric_limits<double>::max_digits10;
  return static_cast<int>(std::ceil(bits() * std::log10(2.0))) + 1;
}

void PrecisionContext::apply() const {
  if (extended()) Extended::default_precision(static_cast<unsigned>(digits_));
}

PrecisionContext with_precision(int digits) {
  if (digits < kMinDigits)
    throw ConfigError("precision of " + std::to_string(digits) + " digits is below the minimum of " +
                      std::to_string(kMinDigits));
  return PrecisionContext(digits);
}

template <>
double parse_scalar<double>(const std::string& text) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError("not a number: '" + text + "'");
  }
  if (used != text.size()) throw ConfigError("not a number: '" + text + "'");
  return v;
}

template <>
Extended parse_scalar<Extended>(const std::string& text) {
  // Validate with strtod's grammar first; MPFR then parses at full precision.
  (void)parse_scalar<double>(text);
  return Extended(text);
}

template <>
std::string format_scalar<double>(const double& x, int significant) {
  std::ostringstream os;
  os << std::scientific << std::setprecision(significant - 1) << x;
  return os.str();
}

template <>
std::string format_scalar<Extended>(const Extended& x, int significant) {
  return x.str(significant - 1, std::ios_base::scientific);
}

template <>
std::string format_scalar<double>(const double& x) {
  return format_scalar<double>(x, std::numeric_limits<double>::max_digits10);
}

template <>
std::string format_scalar<Extended>(const Extended& x) {
  const int digits = static_cast<int>(Extended::default_precision());
  return format_scalar<Extended>(x, with_precision(std::max(digits, kMinDigits)).serialization_digits());
}

template <>
double pi<double>() {
  return boost::math::constants::pi<double>();
}

template <>
Extended pi<Extended>() {
  return boost::math::constants::pi<Extended>();
}

}  // namespace varint
