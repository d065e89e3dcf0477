#pragma once

// Independent reference implementations ("oracles") used to cross-check the
// library. Each oracle deliberately takes a different algorithmic route than
// the code under test:
//   - oracle_value / oracle_opt_value: plain lexicographic enumeration
//     (library uses Gray-code incremental updates),
//   - oracle_lambda_binomial: lambda as an exact binomial convolution
//     (library expands polynomial coefficients analytically),
//   - oracle_perturbation_expectation: exhaustive average over all 2^n
//     perturbation patterns (library evaluates lambda at the template),
//   - oracle_gamma_mu: vertex enumeration of the mu-slice (library uses the
//     closed form),
//   - oracle_rho_enum: truth-table average (library uses binomials),
//   - oracle_induced_sort / oracle_refine_sort: sorting-based ordering
//     primitives (library counts ranks and sweeps blocks),
//   - oracle_twice_touching: bitmask intersection counts (library scans
//     index lists).

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <utility>
#include <vector>

#include "mbcsp/analysis.hpp"
#include "mbcsp/core.hpp"
#include "mbcsp/rational.hpp"

namespace oracles {

using mbcsp::Assignment;
using mbcsp::BigInt;
using mbcsp::Instance;
using mbcsp::LevelDistribution;
using mbcsp::Rat;
using mbcsp::SymmetricPredicate;

// Satisfaction decided by materializing the negated restriction bit by bit.
inline bool oracle_satisfies(const SymmetricPredicate& f, const mbcsp::Constraint& c,
                             const Assignment& x) {
  std::vector<uint8_t> pattern;
  for (size_t t = 0; t < c.j.size(); ++t)
    pattern.push_back(static_cast<uint8_t>(c.b[t] ^ x[c.j[t] - 1]));
  int w = 0;
  for (uint8_t b : pattern) w += b;
  for (int s : f.S)
    if (s == w) return true;
  return false;
}

inline Rat oracle_value(const Instance& inst, const Assignment& x) {
  BigInt sat = 0, total = 0;
  for (const auto& c : inst.cons) {
    total += c.w;
    if (oracle_satisfies(inst.pred, c, x)) sat += c.w;
  }
  return Rat(sat, total);
}

// Optimum by plain lexicographic scan; first strict improvement wins, so the
// witness is automatically the lexicographically smallest maximizer.
inline std::pair<Rat, Assignment> oracle_opt_value(const Instance& inst) {
  Rat best = -1;
  Assignment best_x;
  const uint64_t total = 1ULL << inst.n;
  for (uint64_t mask = 0; mask < total; ++mask) {
    Assignment x(inst.n);
    for (int i = 0; i < inst.n; ++i) x[i] = (mask >> (inst.n - 1 - i)) & 1;
    const Rat v = oracle_value(inst, x);
    if (v > best) {
      best = v;
      best_x = x;
    }
  }
  return {best, best_x};
}

// rho by truth-table average over all 2^k inputs.
inline Rat oracle_rho_enum(const SymmetricPredicate& f) {
  BigInt acc = 0;
  for (uint64_t mask = 0; mask < (1ULL << f.k); ++mask) {
    const int w = __builtin_popcountll(mask);
    if (f.S.count(w)) ++acc;
  }
  return Rat(acc, BigInt(1) << f.k);
}

// Exact binomial pmf: Pr[Bin(n, p) = j] as a rational in p.
inline std::vector<Rat> binomial_pmf(int n, const Rat& p) {
  const Rat q = Rat(1) - p;
  std::vector<Rat> pmf(n + 1);
  for (int j = 0; j <= n; ++j)
    pmf[j] = Rat(mbcsp::binomial(n, j)) * mbcsp::rat_pow(p, j) * mbcsp::rat_pow(q, n - j);
  return pmf;
}

// lambda via its probabilistic meaning: a level-i constraint keeps j of its i
// disagreements (each w.p. p) and gains fresh disagreements from the k-i
// agreements (each w.p. 1-p); the new level is Bin(i,p) + Bin(k-i,1-p).
inline Rat oracle_lambda_binomial(const SymmetricPredicate& f, const std::vector<Rat>& D,
                                  const Rat& p) {
  const int k = f.k;
  Rat acc = 0;
  for (int i = 0; i <= k; ++i) {
    if (D[i] == 0) continue;
    const auto stay = binomial_pmf(i, p);
    const auto gain = binomial_pmf(k - i, Rat(1) - p);
    Rat hit = 0;
    for (int a = 0; a <= i; ++a)
      for (int b = 0; b <= k - i; ++b)
        if (f.S.count(a + b)) hit += stay[a] * gain[b];
    acc += D[i] * hit;
  }
  return acc;
}

// Expected value after independently keeping each bit of x with probability p
// (flipping otherwise), by exhaustive enumeration of all perturbation
// patterns. Exact; n must be small.
inline Rat oracle_perturbation_expectation(const Instance& inst, const Assignment& x,
                                           const Rat& p) {
  const Rat q = Rat(1) - p;
  Rat acc = 0;
  const uint64_t total = 1ULL << inst.n;
  for (uint64_t mask = 0; mask < total; ++mask) {
    Assignment y = x;
    int flips = 0;
    for (int i = 0; i < inst.n; ++i)
      if ((mask >> i) & 1) {
        y[i] ^= 1;
        ++flips;
      }
    acc += mbcsp::rat_pow(q, flips) * mbcsp::rat_pow(p, inst.n - flips) *
           oracle_value(inst, y);
  }
  return acc;
}

// Signed per-variable bias recomputed through an index map.
inline std::map<int, long long> oracle_bias_map(const Instance& inst) {
  std::map<int, long long> bias;
  for (const auto& c : inst.cons)
    for (size_t t = 0; t < c.j.size(); ++t)
      bias[c.j[t]] += c.b[t] ? -c.w : c.w;
  return bias;
}

// gamma_{S,k}(mu) as a maximum of gamma over the mu-slice vertices (the
// objective is linear, so vertices suffice; this is exact up to rounding).
inline double oracle_gamma_mu(const SymmetricPredicate& f, double mu_val) {
  const auto verts = mbcsp::slice_vertices(f.k, mu_val);
  double best = 0.0;
  for (const auto& v : verts) best = std::max(best, mbcsp::gamma_dist(f, v));
  return best;
}

// Closed-form lambda for S = {k} (kAND): sum_i (1-p)^{k-i} p^i D<i>.
inline double oracle_lambda_kand(int k, const LevelDistribution& D, double p) {
  double acc = 0.0;
  for (int i = 0; i <= k; ++i)
    acc += std::pow(1.0 - p, k - i) * std::pow(p, i) * D[i];
  return acc;
}

// Closed-form lambda for S = {k-1, k}: level-i coefficient
// (1-p)^{k-i-1} p^{i-1} ((k-i) p^2 + p(1-p) + i (1-p)^2), with the boundary
// levels expanded to avoid negative powers.
inline double oracle_lambda_thkm1(int k, const LevelDistribution& D, double p) {
  const double q = 1.0 - p;
  double acc = 0.0;
  for (int i = 0; i <= k; ++i) {
    double coeff;
    if (i == 0) {
      coeff = std::pow(q, k - 1) * (k * p + q);
    } else if (i == k) {
      coeff = std::pow(p, k - 1) * (k * q + p);
    } else {
      coeff = std::pow(q, k - i - 1) * std::pow(p, i - 1) *
              ((k - i) * p * p + p * q + i * q * q);
    }
    acc += coeff * D[i];
  }
  return acc;
}

// Closed-form gamma for S = {k-1, k}: min(sum_i i/(k-1) D<i>, 1).
inline double oracle_gamma_thkm1(int k, const LevelDistribution& D) {
  double acc = 0.0;
  for (int i = 0; i <= k; ++i)
    acc += static_cast<double>(i) / static_cast<double>(k - 1) * D[i];
  return std::min(acc, 1.0);
}

// Closed-form gamma for S = {k} (kAND): sum_i (i/k) D<i>.
inline double oracle_gamma_kand(int k, const LevelDistribution& D) {
  double acc = 0.0;
  for (int i = 0; i <= k; ++i) acc += static_cast<double>(i) / k * D[i];
  return acc;
}

// Induced permutation by sorting (position, slot) pairs: the slot whose
// position lands at sorted rank s gets pattern value s. Assumes sigma is a
// permutation, so positions are distinct.
inline std::vector<int> oracle_induced_sort(const std::vector<int>& sigma,
                                            const std::vector<int>& j) {
  std::vector<std::pair<int, int>> slots;
  for (size_t t = 0; t < j.size(); ++t)
    slots.emplace_back(sigma[j[t] - 1], static_cast<int>(t));
  std::sort(slots.begin(), slots.end());
  std::vector<int> pi(j.size());
  for (size_t s = 0; s < slots.size(); ++s)
    pi[slots[s].second] = static_cast<int>(s) + 1;
  return pi;
}

// Ordering value through the sort-based induced patterns.
inline Rat oracle_ordvalue(const std::vector<std::vector<int>>& cons,
                           const std::set<std::vector<int>>& accepted,
                           const std::vector<int>& sigma) {
  long long sat = 0;
  for (const std::vector<int>& j : cons)
    sat += accepted.count(oracle_induced_sort(sigma, j)) != 0;
  return Rat(sat, static_cast<long long>(cons.size()));
}

// Refinement by stable-sorting variables on their representative (0 acts as
// q); stability keeps ascending variable index inside each block.
inline std::vector<int> oracle_refine_sort(const std::vector<int>& x, int q) {
  const int n = static_cast<int>(x.size());
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int u, int v) {
    return (x[u] == 0 ? q : x[u]) < (x[v] == 0 ? q : x[v]);
  });
  std::vector<int> sigma(n);
  for (int pos = 0; pos < n; ++pos) sigma[idx[pos]] = pos + 1;
  return sigma;
}

// N(Psi, S) through bitmask intersections (n <= 32).
inline long long oracle_twice_touching(const std::vector<std::vector<int>>& cons,
                                       const std::vector<int>& S) {
  uint32_t smask = 0;
  for (int v : S) smask |= uint32_t{1} << (v - 1);
  long long count = 0;
  for (const std::vector<int>& j : cons) {
    uint32_t cmask = 0;
    for (int idx : j) cmask |= uint32_t{1} << (idx - 1);
    count += std::popcount(cmask & smask) >= 2;
  }
  return count;
}

}  // namespace oracles
