#pragma once

// Approximation-ratio analysis for symmetric Boolean predicates.
//
// For a predicate f_{S,k} and a level distribution D on {0..k} (the fraction
// of constraint weight whose negated restriction has each Hamming weight):
//
//   mu(D)        first-moment marginal, sum_i (-1 + 2i/k) D<i>
//   lambda(D,p)  expected value under independent per-bit retention w.p. p
//   gamma(D)     sum_{s in S} D<s>   (value of the distribution itself)
//   beta(D)      sup_p lambda(D,p)
//   gamma_{S,k}(mu) / beta_{S,k}(mu): extremal envelopes over {D : mu(D)=mu}
//
// alpha(f) = inf_D beta(D_N) / gamma_{S,k}(mu(D_N)) is computed by a
// two-level candidate search certified through a max-min (saddle point)
// argument, with a numeric fallback when certification fails.

#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <utility>
#include <string>
#include <vector>

#include "mbcsp/core.hpp"
#include "mbcsp/optim.hpp"
#include "mbcsp/poly.hpp"
#include "mbcsp/rational.hpp"
#include "mbcsp/rng.hpp"

namespace mbcsp {

using LevelDistribution = std::vector<double>;

// Centralized tolerances.
struct Tol {
  static constexpr double root = 1e-14;        // root isolation / bisection
  static constexpr double certify = 1e-10;     // max-min certification slack
  static constexpr double report = 1e-9;       // reported-value comparisons
  static constexpr double dist_sum = 1e-12;    // distribution mass checks
};

inline void validate_distribution(int k, const LevelDistribution& D) {
  if (static_cast<int>(D.size()) != k + 1)
    throw ArgumentError("level distribution must have k+1 entries");
  double total = 0.0;
  for (double v : D) {
    if (v < -Tol::dist_sum) throw ArgumentError("level distribution has negative mass");
    total += v;
  }
  if (std::fabs(total - 1.0) > Tol::dist_sum)
    throw ArgumentError("level distribution must sum to 1");
}

inline Rat epsilon(int i, int k) { return Rat(2 * i - k, k); }
inline double epsilon_d(int i, int k) {
  return static_cast<double>(2 * i - k) / static_cast<double>(k);
}

inline double mu(int k, const LevelDistribution& D) {
  double acc = 0.0;
  for (int i = 0; i <= k; ++i) acc += epsilon_d(i, k) * D[i];
  return acc;
}

inline LevelDistribution to_level_distribution(const std::vector<Rat>& D) {
  LevelDistribution out(D.size());
  for (size_t i = 0; i < D.size(); ++i) out[i] = to_double(D[i]);
  return out;
}

inline LevelDistribution symmetrize(const Instance& inst, const Assignment& x) {
  return to_level_distribution(template_distribution(inst, x));
}

// ---------------------------------------------------------------------------
// lambda
// ---------------------------------------------------------------------------

// Per-level polynomials of lambda in the retention probability p. For level i,
// the coefficient of D<i> is
//   sum_{s in S} sum_j C(i,j) C(k-i,s-j) (1-p)^{s+i-2j} p^{k-s-i+2j},
// j ranging over max(0, s-(k-i)) .. min(i, s): j counts level-i positions
// whose retained literal still disagrees after the perturbation pattern.
struct LambdaTable {
  int k = 0;
  std::vector<Poly> level;   // level[i](p)
  std::vector<Poly> dlevel;  // d/dp level[i]

  static const LambdaTable& get(const SymmetricPredicate& f) {
    static std::map<std::pair<int, std::set<int>>, LambdaTable> cache;
    auto key = std::make_pair(f.k, f.S);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, build(f)).first;
    return it->second;
  }

  static LambdaTable build(const SymmetricPredicate& f) {
    f.validate();
    LambdaTable t;
    t.k = f.k;
    const int k = f.k;
    t.level.resize(k + 1);
    t.dlevel.resize(k + 1);
    for (int i = 0; i <= k; ++i) {
      RatPoly rp;
      for (int s : f.S) {
        const int jlo = std::max(0, s - (k - i));
        const int jhi = std::min(i, s);
        for (int j = jlo; j <= jhi; ++j) {
          const Rat coeff = Rat(binomial(i, j) * binomial(k - i, s - j));
          rp.add_p_q_term(/*p exp=*/k - s - i + 2 * j, /*q exp=*/s + i - 2 * j, coeff);
        }
      }
      t.level[i] = rp.to_poly();
      t.dlevel[i] = t.level[i].derivative();
    }
    return t;
  }
};

inline double lambda(const SymmetricPredicate& f, const LevelDistribution& D, double p) {
  const LambdaTable& t = LambdaTable::get(f);
  double acc = 0.0;
  for (int i = 0; i <= t.k; ++i) acc += D[i] * t.level[i].eval(p);
  return acc;
}

// Exact rational lambda, for identities that must hold to equality.
inline Rat lambda_exact(const SymmetricPredicate& f, const std::vector<Rat>& D, const Rat& p) {
  f.validate();
  const int k = f.k;
  if (static_cast<int>(D.size()) != k + 1)
    throw ArgumentError("lambda_exact: distribution size mismatch");
  const Rat q = Rat(1) - p;
  Rat acc = 0;
  for (int i = 0; i <= k; ++i) {
    if (D[i] == 0) continue;
    Rat ci = 0;
    for (int s : f.S) {
      const int jlo = std::max(0, s - (k - i));
      const int jhi = std::min(i, s);
      for (int j = jlo; j <= jhi; ++j)
        ci += Rat(binomial(i, j) * binomial(k - i, s - j)) *
              rat_pow(q, s + i - 2 * j) * rat_pow(p, k - s - i + 2 * j);
    }
    acc += D[i] * ci;
  }
  return acc;
}

inline double gamma_dist(const SymmetricPredicate& f, const LevelDistribution& D) {
  double acc = 0.0;
  for (int s : f.S) acc += D[s];
  return acc;
}

struct BetaResult {
  double p_star = 0.0;
  double value = 0.0;
};

inline BetaResult beta_dist(const SymmetricPredicate& f, const LevelDistribution& D) {
  const LambdaTable& t = LambdaTable::get(f);
  Poly combined;
  combined.c = {0.0};
  for (int i = 0; i <= t.k; ++i)
    if (D[i] != 0.0) combined.add_scaled(t.level[i], D[i]);
  const MaxResult m = maximize01(combined, 1e-3, Tol::root, 1e-12);
  return {m.arg, m.value};
}

// ---------------------------------------------------------------------------
// gamma_{S,k}(mu) closed form and the mu-slice of the simplex
// ---------------------------------------------------------------------------

inline double gamma_mu(const SymmetricPredicate& f, double mu_val) {
  if (mu_val < -1.0 - Tol::report || mu_val > 1.0 + Tol::report)
    throw ArgumentError("gamma_mu: mu outside [-1,1]");
  mu_val = std::min(1.0, std::max(-1.0, mu_val));
  const int s = f.min_weight(), t = f.max_weight();
  const double es = epsilon_d(s, f.k), et = epsilon_d(t, f.k);
  double g = std::min((1.0 + mu_val) / (1.0 + es), 1.0);
  if (t < f.k) g = std::min(g, (1.0 - mu_val) / (1.0 - et));
  return g;
}

// Extreme points of {D in Delta_k : mu(D) = mu}: point masses on levels with
// epsilon_i = mu, plus two-level mixtures spanning mu.
inline std::vector<LevelDistribution> slice_vertices(int k, double mu_val,
                                                     double tol = 1e-12) {
  std::vector<LevelDistribution> out;
  for (int i = 0; i <= k; ++i) {
    if (std::fabs(epsilon_d(i, k) - mu_val) <= tol) {
      LevelDistribution D(k + 1, 0.0);
      D[i] = 1.0;
      out.push_back(std::move(D));
    }
  }
  for (int i = 0; i <= k; ++i) {
    const double ei = epsilon_d(i, k);
    if (ei >= mu_val - tol) continue;
    for (int j = i + 1; j <= k; ++j) {
      const double ej = epsilon_d(j, k);
      if (ej <= mu_val + tol) continue;
      const double th = (ej - mu_val) / (ej - ei);
      LevelDistribution D(k + 1, 0.0);
      D[i] = th;
      D[j] = 1.0 - th;
      out.push_back(std::move(D));
    }
  }
  return out;
}

struct BetaMuResult {
  double value = 0.0;
  double vertex_value = 0.0;
  double interior_value = 0.0;
  bool vertex_interior_disagree = false;
  LevelDistribution argmin;
};

// beta_{S,k}(mu) = inf over the mu-slice of beta. beta is convex in D, so the
// infimum can sit strictly inside the slice; the vertex enumeration is
// cross-checked against a numeric interior minimization over convex
// combinations of the slice vertices, and disagreement beyond 1e-8 is flagged.
inline BetaMuResult beta_mu(const SymmetricPredicate& f, double mu_val,
                            uint64_t seed = 0xC5B5) {
  const int k = f.k;
  const auto verts = slice_vertices(k, mu_val);
  if (verts.empty()) throw ArgumentError("beta_mu: mu outside [-1,1]");

  BetaMuResult res;
  res.vertex_value = std::numeric_limits<double>::infinity();
  for (const auto& v : verts) {
    const double b = beta_dist(f, v).value;
    if (b < res.vertex_value) {
      res.vertex_value = b;
      res.argmin = v;
    }
  }

  res.interior_value = res.vertex_value;
  if (verts.size() > 1) {
    auto blend = [&](const std::vector<double>& theta) {
      LevelDistribution D(k + 1, 0.0);
      for (size_t v = 0; v < verts.size(); ++v)
        for (int i = 0; i <= k; ++i) D[i] += theta[v] * verts[v][i];
      return D;
    };
    auto objective = [&](const std::vector<double>& y) {
      return beta_dist(f, blend(to_simplex(y))).value;
    };
    SplitRng rng(seed, 0x6d75);  // "mu"
    LevelDistribution interior_arg = res.argmin;
    for (int start = 0; start < 5; ++start) {
      std::vector<double> y0(verts.size());
      for (auto& v : y0) v = start == 0 ? 1.0 : 0.2 + rng.next_unit();
      const auto r = nelder_mead(objective, y0, 0.3, 1e-12, 4000);
      if (r.value < res.interior_value) {
        res.interior_value = r.value;
        interior_arg = blend(to_simplex(r.arg));
      }
    }
    if (res.interior_value < res.vertex_value - 1e-8) {
      res.vertex_interior_disagree = true;
      res.argmin = interior_arg;
    }
  }
  res.value = std::min(res.vertex_value, res.interior_value);
  return res;
}

// ---------------------------------------------------------------------------
// alpha(f)
// ---------------------------------------------------------------------------

inline bool supports_one_wise(const SymmetricPredicate& f) {
  // A distribution with uniform marginals supported on S exists iff S reaches
  // both sides of k/2; then the predicate is approximation-resistant.
  return 2 * f.min_weight() <= f.k && 2 * f.max_weight() >= f.k;
}

// Uniform-pattern template: D<i> = C(k,i)/2^k. A uniform pattern stays
// uniform under any independent per-bit perturbation, so lambda(D,p) = rho(f)
// for every p; combined with gamma_{S,k}(0) = 1 this is the minimizing
// witness for one-wise supported predicates.
inline LevelDistribution binomial_level_distribution(int k) {
  LevelDistribution D(k + 1);
  for (int i = 0; i <= k; ++i)
    D[i] = to_double(Rat(binomial(k, i)) / rat_pow(Rat(2), k));
  return D;
}

inline LevelDistribution one_wise_distribution(const SymmetricPredicate& f) {
  if (!supports_one_wise(f)) throw ArgumentError("predicate is not one-wise supported");
  const int s = f.min_weight(), t = f.max_weight();
  LevelDistribution D(f.k + 1, 0.0);
  const double es = epsilon_d(s, f.k), et = epsilon_d(t, f.k);
  if (et == es) {  // both are k/2
    D[s] = 1.0;
  } else {
    const double th = et / (et - es);
    D[s] = th;
    D[t] = 1.0 - th;
  }
  return D;
}

struct AlphaResult {
  std::set<int> S;
  int k = 0;
  double alpha = 0.0;
  LevelDistribution d_star;
  double p_star = 0.0;
  bool certified = false;
  std::string method;  // max-min-certified | numeric-only | one-wise-resistant
};

struct CertifyResult {
  bool ok = false;
  std::string detail;
};

// Max-min certificate: with p* fixed, lambda(., p*) is linear in D while
// gamma_{S,k}(mu(.)) is piecewise linear with breakpoints at mu = eps_s and
// mu = eps_t. On each linearity region the ratio is minimized at an extreme
// point, so checking lambda(E,p*) >= alpha * gamma(mu(E)) on all point masses
// and all two-level mixtures pinned to the breakpoints proves
// lambda(D,p*) >= alpha * gamma(mu(D)) for every D, hence beta(D)/gamma >= alpha.
inline CertifyResult certify_max_min(const SymmetricPredicate& f,
                                     const LevelDistribution& d_star, double p_star,
                                     double alpha, double slack = Tol::certify) {
  const int k = f.k;
  CertifyResult res;

  const BetaResult b = beta_dist(f, d_star);
  if (lambda(f, d_star, p_star) < b.value - slack) {
    res.detail = "p_star is not a global maximizer of lambda(d_star, .)";
    return res;
  }

  std::vector<LevelDistribution> witnesses;
  for (int i = 0; i <= k; ++i) {
    LevelDistribution D(k + 1, 0.0);
    D[i] = 1.0;
    witnesses.push_back(std::move(D));
  }
  std::vector<double> targets{epsilon_d(f.min_weight(), k)};
  if (f.max_weight() != f.min_weight()) targets.push_back(epsilon_d(f.max_weight(), k));
  for (double target : targets)
    for (auto& v : slice_vertices(k, target))
      witnesses.push_back(std::move(v));

  for (const auto& E : witnesses) {
    const double lam = lambda(f, E, p_star);
    const double g = gamma_mu(f, mu(k, E));
    if (lam < (alpha - slack) * g) {
      char buf[160];
      std::snprintf(buf, sizeof buf,
                    "witness fails: lambda=%.15g < alpha*gamma=%.15g (mu=%.6g)", lam,
                    alpha * g, mu(k, E));
      res.detail = buf;
      return res;
    }
  }
  res.ok = true;
  return res;
}

namespace detail {

struct RatioCandidate {
  LevelDistribution D;
  double ratio = std::numeric_limits<double>::infinity();
};

inline double ratio_objective(const SymmetricPredicate& f, const LevelDistribution& D) {
  const double g = gamma_mu(f, mu(f.k, D));
  if (g < 1e-12) return 1e12;
  return beta_dist(f, D).value / g;
}

// Polishes the mixing weight of a two-level candidate by solving the
// first-order optimality condition d/dtheta [beta(D_theta) / gamma(mu(theta))]
// = 0. Comparison-based search alone leaves O(1e-8) argument noise near the
// flat minimum, which is too coarse for the certificate's equality witnesses;
// the derivative (envelope theorem in p, frozen active branch of gamma) is
// computable to full precision, so bisecting its sign pins theta to ~1e-13.
inline double refine_two_level_theta(const SymmetricPredicate& f, int i, int j,
                                     double theta0) {
  const int k = f.k;
  const double ei = epsilon_d(i, k), ej = epsilon_d(j, k);
  const double mu0 = theta0 * ei + (1.0 - theta0) * ej;

  const int s = f.min_weight(), t = f.max_weight();
  const double es = epsilon_d(s, k), et = epsilon_d(t, k);
  double gval = (1.0 + mu0) / (1.0 + es), gslope = 1.0 / (1.0 + es);
  if (1.0 < gval - 1e-9) {
    gval = 1.0;
    gslope = 0.0;
  } else if (std::fabs(1.0 - gval) <= 1e-9) {
    return theta0;  // sitting on a kink of gamma
  }
  if (t < k) {
    const double bb = (1.0 - mu0) / (1.0 - et);
    if (bb < gval - 1e-9) {
      gval = bb;
      gslope = -1.0 / (1.0 - et);
    } else if (std::fabs(bb - gval) <= 1e-9) {
      return theta0;  // kink
    }
  }
  if (gval <= 1e-9) return theta0;

  const LambdaTable& tab = LambdaTable::get(f);
  const double mu_th = ei - ej;
  auto h = [&](double th) {
    LevelDistribution D(k + 1, 0.0);
    D[i] = th;
    D[j] += 1.0 - th;
    const BetaResult b = beta_dist(f, D);
    const double f_th = tab.level[i].eval(b.p_star) - tab.level[j].eval(b.p_star);
    const double g = gval + gslope * (th - theta0) * mu_th;
    return f_th * g - b.value * gslope * mu_th;
  };

  double lo = std::max(0.0, theta0 - 1.5e-3), hi = std::min(1.0, theta0 + 1.5e-3);
  double hlo = h(lo);
  const double hhi = h(hi);
  if (hlo == 0.0) return lo;
  if (hhi == 0.0) return hi;
  if ((hlo > 0.0) == (hhi > 0.0)) return theta0;  // no stationary point bracketed
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double hm = h(mid);
    if (hm == 0.0) return mid;
    if ((hm > 0.0) == (hlo > 0.0)) {
      lo = mid;
      hlo = hm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Best mixture of two point masses: point masses, then a theta grid with
// golden-section polish per level pair, then the derivative-based refinement
// of the winning pair.
inline RatioCandidate best_two_level(const SymmetricPredicate& f) {
  const int k = f.k;
  RatioCandidate best;
  int best_i = -1, best_j = -1;
  double best_theta = 0.0;

  for (int i = 0; i <= k; ++i) {
    LevelDistribution D(k + 1, 0.0);
    D[i] = 1.0;
    const double r = ratio_objective(f, D);
    if (r < best.ratio) {
      best.ratio = r;
      best.D = D;
    }
  }

  auto at_theta = [&](int i, int j, double th) {
    LevelDistribution D(k + 1, 0.0);
    D[i] = th;
    D[j] += 1.0 - th;
    return D;
  };

  for (int i = 0; i <= k; ++i) {
    for (int j = i + 1; j <= k; ++j) {
      double best_th = -1.0, best_r = std::numeric_limits<double>::infinity();
      for (int g = 0; g <= 1000; ++g) {
        const double th = static_cast<double>(g) / 1000.0;
        const double r = ratio_objective(f, at_theta(i, j, th));
        if (r < best_r) {
          best_r = r;
          best_th = th;
        }
      }
      if (best_th < 0.0) continue;
      const double lo = std::max(0.0, best_th - 1e-3), hi = std::min(1.0, best_th + 1e-3);
      const auto polished = golden_min(
          [&](double th) { return ratio_objective(f, at_theta(i, j, th)); }, lo, hi, 1e-12);
      if (polished.value < best_r) {
        best_r = polished.value;
        best_th = polished.arg;
      }
      if (best_r < best.ratio) {
        best.ratio = best_r;
        best.D = at_theta(i, j, best_th);
        best_i = i;
        best_j = j;
        best_theta = best_th;
      }
    }
  }

  if (best_i >= 0) {
    const double th = refine_two_level_theta(f, best_i, best_j, best_theta);
    const LevelDistribution D = at_theta(best_i, best_j, th);
    const double r = ratio_objective(f, D);
    if (r <= best.ratio + 1e-9) {
      best.ratio = std::min(best.ratio, r);
      best.D = D;
    }
  }
  return best;
}

}  // namespace detail

inline AlphaResult alpha(const SymmetricPredicate& f, uint64_t seed = 0xC5B5) {
  f.validate();
  AlphaResult res;
  res.S = f.S;
  res.k = f.k;

  if (supports_one_wise(f)) {
    res.alpha = to_double(rho(f));
    res.d_star = binomial_level_distribution(f.k);
    res.p_star = 0.5;
    res.certified = true;
    res.method = "one-wise-resistant";
    return res;
  }

  const auto cand = detail::best_two_level(f);
  const BetaResult cb = beta_dist(f, cand.D);
  const CertifyResult cert = certify_max_min(f, cand.D, cb.p_star, cand.ratio);
  if (cert.ok) {
    res.alpha = cand.ratio;
    res.d_star = cand.D;
    res.p_star = cb.p_star;
    res.certified = true;
    res.method = "max-min-certified";
    return res;
  }

  // Numeric fallback: multi-start Nelder-Mead over the whole simplex through
  // square-normalized coordinates.
  auto objective = [&](const std::vector<double>& y) {
    return detail::ratio_objective(f, to_simplex(y));
  };
  SplitRng rng(seed, 0x616c);  // "al"
  LevelDistribution best_D = cand.D;
  double best_ratio = cand.ratio;
  for (int start = 0; start < 20; ++start) {
    std::vector<double> y0(f.k + 1);
    if (start == 0) {
      for (int i = 0; i <= f.k; ++i) y0[i] = std::sqrt(std::max(0.0, cand.D[i])) + 0.01;
    } else {
      for (auto& v : y0) v = 0.1 + rng.next_unit();
    }
    const auto r = nelder_mead(objective, y0, 0.25, 1e-10, 6000);
    if (r.value < best_ratio) {
      best_ratio = r.value;
      best_D = to_simplex(r.arg);
    }
  }
  res.alpha = best_ratio;
  res.d_star = best_D;
  res.p_star = beta_dist(f, best_D).p_star;
  res.certified = false;
  res.method = "numeric-only";
  return res;
}

// alpha'_k = 2^{-(k-1)} (1 - 1/k^2)^{(k-1)/2}; closed-form reference point for
// the kAND family.
inline double alpha_prime(int k) {
  if (k < 1) throw ArgumentError("alpha_prime: k must be positive");
  const double base = (static_cast<double>(k - 1) * static_cast<double>(k + 1)) /
                      (4.0 * static_cast<double>(k) * static_cast<double>(k));
  return std::pow(base, static_cast<double>(k - 1) / 2.0);
}

// Threshold predicates accept every weight from some t up to k.
inline bool is_threshold(const SymmetricPredicate& f) {
  return f.max_weight() == f.k &&
         static_cast<int>(f.S.size()) == f.k - f.min_weight() + 1;
}

// alpha(f) for threshold predicates, memoized across callers (the analysis is
// deterministic, so the cache is transparent).
inline const AlphaResult& cached_threshold_alpha(const SymmetricPredicate& f) {
  if (!is_threshold(f))
    throw ArgumentError("cached_threshold_alpha requires a threshold predicate");
  static std::map<std::pair<int, int>, AlphaResult> cache;
  static std::mutex cache_mu;
  const std::pair<int, int> key{f.k, f.min_weight()};
  {
    std::lock_guard<std::mutex> lock(cache_mu);
    const auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  AlphaResult r = alpha(f);
  std::lock_guard<std::mutex> lock(cache_mu);
  return cache.emplace(key, std::move(r)).first->second;
}

// ---------------------------------------------------------------------------
// Padded one-wise pairs
// ---------------------------------------------------------------------------

inline double padded_pair_ratio(const SymmetricPredicate& f, const LevelDistribution& D_N,
                                const LevelDistribution& D_Y) {
  validate_distribution(f.k, D_N);
  validate_distribution(f.k, D_Y);
  if (std::fabs(mu(f.k, D_N) - mu(f.k, D_Y)) > Tol::report)
    throw ArgumentError("padded_pair_ratio: marginals must match");
  const double g = gamma_dist(f, D_Y);
  if (g <= 0.0) throw ArgumentError("padded_pair_ratio: gamma(D_Y) is zero");
  return beta_dist(f, D_N).value / g;
}

struct PaddedPairResult {
  bool is_pair = false;
  double eta = 0.0;
};

// (D_N, D_Y) form a padded one-wise pair iff for some eta, both split as
// eta*D_0 + (1-eta)*D' with a shared D_0 and residuals of zero marginal.
// Feasibility for a fixed eta reduces to a capped-mass mean problem solved
// greedily; eta is swept on a grid refined to 1e-9.
inline PaddedPairResult is_padded_onewise_pair(int k, const LevelDistribution& D_N,
                                               const LevelDistribution& D_Y) {
  validate_distribution(k, D_N);
  validate_distribution(k, D_Y);
  const double mu_n = mu(k, D_N), mu_y = mu(k, D_Y);
  if (std::fabs(mu_n - mu_y) > Tol::report) return {false, 0.0};
  const double mu_star = 0.5 * (mu_n + mu_y);

  if (std::fabs(mu_star) <= Tol::report) return {true, 0.0};

  std::vector<double> caps_base(k + 1);
  double cap_total = 0.0;
  for (int i = 0; i <= k; ++i) {
    caps_base[i] = std::min(D_N[i], D_Y[i]);
    cap_total += caps_base[i];
  }

  const double lo = std::fabs(mu_star), hi = std::min(cap_total, 1.0);
  if (hi < lo - 1e-12) return {false, 0.0};

  // Violation margin of the capped-mass problem at a fixed eta (0 = feasible).
  auto margin = [&](double eta) {
    if (eta <= 0.0) return 1.0;
    double sum_caps = 0.0;
    for (int i = 0; i <= k; ++i) sum_caps += caps_base[i] / eta;
    double viol = std::max(0.0, 1.0 - sum_caps);
    const double target = mu_star / eta;
    double remaining = 1.0, mu_lo = 0.0;
    for (int i = 0; i <= k && remaining > 0.0; ++i) {
      const double take = std::min(caps_base[i] / eta, remaining);
      mu_lo += epsilon_d(i, k) * take;
      remaining -= take;
    }
    remaining = 1.0;
    double mu_hi = 0.0;
    for (int i = k; i >= 0 && remaining > 0.0; --i) {
      const double take = std::min(caps_base[i] / eta, remaining);
      mu_hi += epsilon_d(i, k) * take;
      remaining -= take;
    }
    viol = std::max(viol, mu_lo - target);
    viol = std::max(viol, target - mu_hi);
    return viol;
  };

  double wlo = lo, whi = hi;
  double best_eta = lo, best_margin = std::numeric_limits<double>::infinity();
  while (true) {
    const int steps = 10000;
    best_margin = std::numeric_limits<double>::infinity();
    for (int g = 0; g <= steps; ++g) {
      const double eta = wlo + (whi - wlo) * static_cast<double>(g) / steps;
      const double m = margin(eta);
      if (m < best_margin) {
        best_margin = m;
        best_eta = eta;
      }
    }
    if (best_margin <= Tol::report) return {true, best_eta};
    const double step = (whi - wlo) / steps;
    if (step <= 1e-9) break;
    wlo = std::max(lo, best_eta - step);
    whi = std::min(hi, best_eta + step);
  }
  return {false, 0.0};
}

// ---------------------------------------------------------------------------
// Hypermatching hit probability
// ---------------------------------------------------------------------------

// Probability that a fixed weight-l set is perfectly paired by a uniform
// partial matching with `an` edges on n vertices: C(an, l/2) / C(n, l) for
// even l, zero for odd l.
inline Rat h_alpha(long long l, long long n, long long an) {
  if (l < 1 || l > n) throw ArgumentError("h_alpha: need 1 <= l <= n");
  if (an < 0 || 2 * an > n) throw ArgumentError("h_alpha: need 0 <= 2*an <= n");
  if (l % 2 != 0) return Rat(0);
  return Rat(binomial(an, l / 2), binomial(n, l));
}

inline Rat h_alpha_real(long long l, long long n, double alpha_frac) {
  const double an_real = alpha_frac * static_cast<double>(n);
  const long long an = std::llround(an_real);
  if (std::fabs(an_real - static_cast<double>(an)) > Tol::report)
    throw ArgumentError("h_alpha: alpha*n must be integral");
  return h_alpha(l, n, an);
}

// ---------------------------------------------------------------------------
// 3AND ratio-landscape check
// ---------------------------------------------------------------------------

struct ThreeAndMinResult {
  double value = 0.0;
  LevelDistribution argmin;
};

// Minimizes lambda(D, p(D)) / gamma_{S,k}(mu(D)) for S={3}, k=3 with the
// plug-in retention probability p(D) = D<1>/3 + 2 D<2>/3 + D<3>; the global
// minimum 2/9 is attained uniquely at the point mass on level 2.
inline ThreeAndMinResult three_and_minimum_check(int starts = 64, uint64_t seed = 0xC5B5) {
  const SymmetricPredicate f(3, {3});
  auto objective_dist = [&](const LevelDistribution& D) {
    const double g = gamma_mu(f, mu(3, D));
    if (g < 1e-9) return 1e12;
    const double p = D[1] / 3.0 + 2.0 * D[2] / 3.0 + D[3];
    return lambda(f, D, p) / g;
  };
  auto objective = [&](const std::vector<double>& y) {
    return objective_dist(to_simplex(y));
  };

  SplitRng rng(seed, 0x3a4d);
  ThreeAndMinResult best;
  best.value = std::numeric_limits<double>::infinity();
  for (int s = 0; s < starts; ++s) {
    std::vector<double> y0(4);
    if (s < 4) {
      for (int i = 0; i < 4; ++i) y0[i] = (i == s) ? 1.0 : 0.05;
    } else {
      for (auto& v : y0) v = 0.05 + rng.next_unit();
    }
    const auto r = nelder_mead(objective, y0, 0.3, 1e-12, 6000);
    if (r.value < best.value) {
      best.value = r.value;
      best.argmin = to_simplex(r.arg);
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// AlphaResult serialization (12 significant digits, pinned key order)
// ---------------------------------------------------------------------------

namespace detail {

inline std::string fmt12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string join_set(const std::set<int>& S) {
  std::string out;
  for (int s : S) {
    if (!out.empty()) out += ',';
    out += std::to_string(s);
  }
  return out;
}

inline std::string join_dist(const LevelDistribution& D) {
  std::string out;
  for (double v : D) {
    if (!out.empty()) out += ',';
    out += fmt12(v);
  }
  return out;
}

}  // namespace detail

inline std::string alpha_to_text(const AlphaResult& r) {
  std::string out;
  out += "S " + detail::join_set(r.S) + "\n";
  out += "k " + std::to_string(r.k) + "\n";
  out += "alpha " + detail::fmt12(r.alpha) + "\n";
  out += "d_star " + detail::join_dist(r.d_star) + "\n";
  out += "p_star " + detail::fmt12(r.p_star) + "\n";
  out += std::string("certified ") + (r.certified ? "true" : "false") + "\n";
  out += "method " + r.method + "\n";
  return out;
}

inline std::string alpha_to_json(const AlphaResult& r) {
  std::string out = "{";
  out += "\"S\":[";
  bool first = true;
  for (int s : r.S) {
    if (!first) out += ',';
    out += std::to_string(s);
    first = false;
  }
  out += "],\"k\":" + std::to_string(r.k);
  out += ",\"alpha\":" + detail::fmt12(r.alpha);
  out += ",\"d_star\":[";
  first = true;
  for (double v : r.d_star) {
    if (!first) out += ',';
    out += detail::fmt12(v);
    first = false;
  }
  out += "],\"p_star\":" + detail::fmt12(r.p_star);
  out += std::string(",\"certified\":") + (r.certified ? "true" : "false");
  out += ",\"method\":\"" + r.method + "\"}";
  return out;
}

}  // namespace mbcsp
