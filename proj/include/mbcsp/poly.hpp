#pragma once

// Small univariate polynomial toolkit: exact construction over rationals,
// double evaluation, and global maximization on [0,1] via root isolation of
// the derivative (sign-bracketing on a fine grid + bisection).

#include <algorithm>
#include <cmath>
#include <vector>

#include "mbcsp/rational.hpp"

namespace mbcsp {

struct Poly {
  std::vector<double> c;  // c[i] is the coefficient of p^i

  double eval(double p) const {
    double acc = 0.0;
    for (size_t i = c.size(); i-- > 0;) acc = acc * p + c[i];
    return acc;
  }

  Poly derivative() const {
    Poly d;
    if (c.size() <= 1) {
      d.c = {0.0};
      return d;
    }
    d.c.resize(c.size() - 1);
    for (size_t i = 1; i < c.size(); ++i) d.c[i - 1] = c[i] * static_cast<double>(i);
    return d;
  }

  void add_scaled(const Poly& other, double s) {
    if (other.c.size() > c.size()) c.resize(other.c.size(), 0.0);
    for (size_t i = 0; i < other.c.size(); ++i) c[i] += s * other.c[i];
  }
};

// Exact rational coefficient accumulator, converted to Poly at the end.
struct RatPoly {
  std::vector<Rat> c;

  void add_term(size_t deg, const Rat& coeff) {
    if (deg >= c.size()) c.resize(deg + 1, Rat(0));
    c[deg] += coeff;
  }

  // Adds coeff * p^b * (1-p)^a, expanding the (1-p)^a factor exactly.
  void add_p_q_term(long long b, long long a, const Rat& coeff) {
    for (long long t = 0; t <= a; ++t) {
      Rat term = coeff * Rat(binomial(a, t));
      if (t & 1) term = -term;
      add_term(static_cast<size_t>(b + t), term);
    }
  }

  Poly to_poly() const {
    Poly p;
    p.c.reserve(c.size());
    for (const Rat& r : c) p.c.push_back(to_double(r));
    if (p.c.empty()) p.c = {0.0};
    return p;
  }
};

struct MaxResult {
  double arg = 0.0;
  double value = 0.0;
};

namespace detail {

inline double bisect_root(const Poly& d, double lo, double hi, double tol) {
  double flo = d.eval(lo);
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double fm = d.eval(mid);
    if ((flo <= 0.0) == (fm <= 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

inline void golden_refine(const Poly& f, double a, double b, double tol,
                          double tie_tol, double& best_arg, double& best_val) {
  static const double invphi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - invphi * (b - a), x2 = a + invphi * (b - a);
  double f1 = f.eval(x1), f2 = f.eval(x2);
  while (b - a > tol) {
    if (f1 < f2) {  // maximize
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f.eval(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = f.eval(x1);
    }
  }
  const double x = 0.5 * (a + b), fx = f.eval(x);
  if (fx > best_val + tie_tol) {  // smaller-argument ties keep the incumbent
    best_val = fx;
    best_arg = x;
  }
}

}  // namespace detail

// Global maximum of a polynomial on [0,1]. Critical points are isolated by
// sign changes of the derivative on a uniform grid (step `grid_step`) and
// sharpened by bisection to `tol`. Ties within `tie_tol` resolve toward the
// smaller argument.
inline MaxResult maximize01(const Poly& f, double grid_step = 1e-3,
                            double tol = 1e-14, double tie_tol = 1e-12) {
  const Poly d = f.derivative();
  std::vector<double> candidates{0.0, 1.0};

  const int steps = static_cast<int>(std::lround(1.0 / grid_step));
  double prev_x = 0.0, prev_d = d.eval(0.0);
  double best_grid_x = 0.0, best_grid_f = f.eval(0.0);
  for (int i = 1; i <= steps; ++i) {
    const double x = static_cast<double>(i) / steps;
    const double dx = d.eval(x);
    if (dx == 0.0) {
      candidates.push_back(x);
    } else if ((prev_d <= 0.0) != (dx <= 0.0)) {
      candidates.push_back(detail::bisect_root(d, prev_x, x, tol));
    }
    const double fx = f.eval(x);
    if (fx > best_grid_f) {
      best_grid_f = fx;
      best_grid_x = x;
    }
    prev_x = x;
    prev_d = dx;
  }

  MaxResult best;
  best.arg = 0.0;
  best.value = f.eval(0.0);
  std::sort(candidates.begin(), candidates.end());
  for (double x : candidates) {
    const double fx = f.eval(x);
    if (fx > best.value + tie_tol) {
      best.value = fx;
      best.arg = x;
    }
  }
  // Guards against flat or double-root critical points the bracketing missed:
  // polish around the best grid sample.
  detail::golden_refine(f, std::max(0.0, best_grid_x - grid_step),
                        std::min(1.0, best_grid_x + grid_step), tol, tie_tol,
                        best.arg, best.value);
  return best;
}

}  // namespace mbcsp
