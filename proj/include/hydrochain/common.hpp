// Copyright 2026 The hydrochain Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hydrochain {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Raised for invalid arguments to any library operation.
class Error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline void require(bool ok, const std::string& what) {
  if (!ok) throw Error(what);
}

// Least nonnegative residue of a modulo m.
inline std::int64_t wrap_index(std::int64_t a, std::int64_t m) {
  std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}

// sin(pi * m / d) with the argument reduced exactly in integers first, so
// large multiples of pi do not lose digits.
template <class Real = double>
Real sin_pi_ratio(std::int64_t m, std::int64_t d) {
  std::int64_t r = wrap_index(m, 2 * d);
  Real sign = 1;
  if (r >= d) {
    r -= d;
    sign = -1;
  }
  if (2 * r > d) r = d - r;
  return sign * std::sin(std::numbers::pi_v<Real> * static_cast<Real>(r) / static_cast<Real>(d));
}

template <class Real = double>
Real cos_pi_ratio(std::int64_t m, std::int64_t d) {
  // cos(x) = sin(x + pi/2); work on the doubled denominator.
  return sin_pi_ratio<Real>(2 * m + d, 2 * d);
}

// Pairwise summation; error grows like log(n) instead of n.
template <class T>
T pairwise_sum(std::span<const T> v) {
  constexpr std::size_t kLeaf = 32;
  if (v.size() <= kLeaf) {
    T s{};
    for (const T& x : v) s += x;
    return s;
  }
  const std::size_t h = v.size() / 2;
  return pairwise_sum(v.first(h)) + pairwise_sum(v.subspan(h));
}

template <class T>
T pairwise_sum(const std::vector<T>& v) {
  return pairwise_sum(std::span<const T>(v));
}

// Running mean and variance (Welford update, Chan merge).
struct ScalarStats {
  std::size_t count = 0;
  double mean_value = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++count;
    const double d = x - mean_value;
    mean_value += d / static_cast<double>(count);
    m2 += d * (x - mean_value);
  }
  void merge(const ScalarStats& o) {
    if (o.count == 0) return;
    if (count == 0) {
      *this = o;
      return;
    }
    const double na = static_cast<double>(count);
    const double nb = static_cast<double>(o.count);
    const double d = o.mean_value - mean_value;
    const double nt = na + nb;
    mean_value += d * nb / nt;
    m2 += o.m2 + d * d * na * nb / nt;
    count += o.count;
  }
  double mean() const { return mean_value; }
  // Sample variance with the 1/(count-1) normalization.
  double variance() const {
    return count < 2 ? 0.0 : m2 / static_cast<double>(count - 1);
  }
  double stderr_of_mean() const {
    return count < 2 ? 0.0 : std::sqrt(variance() / static_cast<double>(count));
  }
};

// Same for complex samples, real and imaginary parts tracked separately.
struct ComplexStats {
  ScalarStats re, im;
  void add(cplx z) {
    re.add(z.real());
    im.add(z.imag());
  }
  void merge(const ComplexStats& o) {
    re.merge(o.re);
    im.merge(o.im);
  }
  cplx mean() const { return {re.mean(), im.mean()}; }
  double stderr_re() const { return re.stderr_of_mean(); }
  double stderr_im() const { return im.stderr_of_mean(); }
  double stderr_abs() const { return std::hypot(stderr_re(), stderr_im()); }
};

}  // namespace hydrochain
