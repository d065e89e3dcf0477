#pragma once

// Generic derivative-free minimizers used by the analysis module:
//  - golden-section line search on an interval,
//  - Nelder-Mead simplex descent in R^d.
// Simplex-constrained problems are handled by square-normalization
// (y -> y_i^2 / sum y_j^2), which maps all of R^d onto the probability
// simplex smoothly.

#include <cmath>
#include <functional>
#include <vector>

namespace mbcsp {

struct ScalarMinResult {
  double arg = 0.0;
  double value = 0.0;
};

inline ScalarMinResult golden_min(const std::function<double(double)>& f, double a,
                                  double b, double tol) {
  static const double invphi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - invphi * (b - a), x2 = a + invphi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 > f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = f(x1);
    }
  }
  ScalarMinResult r;
  r.arg = 0.5 * (a + b);
  r.value = f(r.arg);
  return r;
}

struct VectorMinResult {
  std::vector<double> arg;
  double value = 0.0;
};

inline VectorMinResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                   const std::vector<double>& x0, double step,
                                   double tol, int max_iter = 20000) {
  const size_t d = x0.size();
  std::vector<std::vector<double>> pts(d + 1, x0);
  for (size_t i = 0; i < d; ++i) pts[i + 1][i] += step;
  std::vector<double> fv(d + 1);
  for (size_t i = 0; i <= d; ++i) fv[i] = f(pts[i]);

  auto order = [&] {
    for (size_t i = 1; i <= d; ++i) {  // insertion sort; simplex is tiny
      auto p = pts[i];
      double v = fv[i];
      size_t j = i;
      while (j > 0 && fv[j - 1] > v) {
        pts[j] = pts[j - 1];
        fv[j] = fv[j - 1];
        --j;
      }
      pts[j] = p;
      fv[j] = v;
    }
  };
  order();

  for (int it = 0; it < max_iter; ++it) {
    if (std::fabs(fv[d] - fv[0]) < tol) break;
    std::vector<double> centroid(d, 0.0);
    for (size_t i = 0; i < d; ++i)
      for (size_t c = 0; c < d; ++c) centroid[c] += pts[i][c] / static_cast<double>(d);

    auto blend = [&](double t) {
      std::vector<double> p(d);
      for (size_t c = 0; c < d; ++c) p[c] = centroid[c] + t * (pts[d][c] - centroid[c]);
      return p;
    };

    auto xr = blend(-1.0);
    const double fr = f(xr);
    if (fr < fv[0]) {
      auto xe = blend(-2.0);
      const double fe = f(xe);
      if (fe < fr) {
        pts[d] = xe;
        fv[d] = fe;
      } else {
        pts[d] = xr;
        fv[d] = fr;
      }
    } else if (fr < fv[d - 1]) {
      pts[d] = xr;
      fv[d] = fr;
    } else {
      auto xc = blend(fr < fv[d] ? -0.5 : 0.5);
      const double fc = f(xc);
      if (fc < std::min(fr, fv[d])) {
        pts[d] = xc;
        fv[d] = fc;
      } else {
        for (size_t i = 1; i <= d; ++i) {  // shrink toward the best point
          for (size_t c = 0; c < d; ++c) pts[i][c] = pts[0][c] + 0.5 * (pts[i][c] - pts[0][c]);
          fv[i] = f(pts[i]);
        }
      }
    }
    order();
  }
  return {pts[0], fv[0]};
}

// Square-normalization onto the probability simplex.
inline std::vector<double> to_simplex(const std::vector<double>& y) {
  double total = 0.0;
  for (double v : y) total += v * v;
  std::vector<double> d(y.size());
  if (total <= 0.0) {
    for (double& v : d) v = 1.0 / static_cast<double>(y.size());
    return d;
  }
  for (size_t i = 0; i < y.size(); ++i) d[i] = y[i] * y[i] / total;
  return d;
}

}  // namespace mbcsp
