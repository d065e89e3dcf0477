#pragma once

// Exact arithmetic helpers. All exact CSP quantities (values, biases, level
// distributions, closed-form combinatorics) are kept as arbitrary-precision
// rationals so tests can use equality instead of tolerances.

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mbcsp {

using BigInt = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

// Error taxonomy. The CLI maps these onto distinct exit codes.
struct ArgumentError : std::runtime_error {
  explicit ArgumentError(const std::string& msg) : std::runtime_error(msg) {}
};
struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};
struct ResourceError : std::runtime_error {
  explicit ResourceError(const std::string& msg) : std::runtime_error(msg) {}
};

inline double to_double(const Rat& r) { return r.convert_to<double>(); }

inline BigInt binomial(long long n, long long r) {
  if (r < 0 || n < 0 || r > n) return 0;
  if (r > n - r) r = n - r;
  BigInt acc = 1;
  for (long long i = 1; i <= r; ++i) {
    acc *= (n - r + i);
    acc /= i;  // exact at every step: acc is C(n-r+i, i)
  }
  return acc;
}

inline Rat rat_pow(const Rat& base, long long e) {
  if (e < 0) throw ArgumentError("rat_pow: negative exponent");
  Rat acc = 1, b = base;
  while (e > 0) {
    if (e & 1) acc *= b;
    b *= b;
    e >>= 1;
  }
  return acc;
}

inline std::string rat_str(const Rat& r) {
  const BigInt num = boost::multiprecision::numerator(r);
  const BigInt den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

}  // namespace mbcsp
