#pragma once

#include "varint/scalar.hpp"

#include <Eigen/Dense>

namespace varint {

template <class Real>
using Vec = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

template <class Real>
using Mat = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;

template <class Real>
Real inf_norm(const Vec<Real>& v) {
  Real m(0);
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    using std::abs;
    Real a = abs(v[i]);
    if (!is_finite(a)) return a;  // NaN must not compare its way to zero
    if (a > m) m = a;
  }
  return m;
}

template <class Real>
bool all_finite(const Vec<Real>& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (!is_finite(v[i])) return false;
  return true;
}

}  // namespace varint
