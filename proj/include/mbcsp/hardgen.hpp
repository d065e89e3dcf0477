#pragma once

// Communication-game samplers and the reductions that turn their transcripts
// into hard CSP instances.
//
// The games share one shape: a hidden assignment x* over Z_q^n, and per round
// a random k-hypermatching M whose edges carry labels z. Yes-case labels are
// consistent with x* (up to a per-edge constant shift for siRSD); No-case
// labels are uniform (or anti-consistent for sBPD'). The reductions keep the
// edges whose labels pass a local test and emit them as constraints, so Yes
// instances have a planted near-optimal assignment while No instances look
// like random graphs with much smaller optima.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <vector>

#include "mbcsp/core.hpp"
#include "mbcsp/rng.hpp"

namespace mbcsp {

// ---------------------------------------------------------------------------
// Hypermatchings and game samples
// ---------------------------------------------------------------------------

struct Hypermatching {
  int k = 0;
  int n = 0;
  std::vector<std::vector<int>> edges;  // 1-based vertices, pairwise disjoint

  void validate() const {
    if (k < 1 || n < 1) throw ArgumentError("hypermatching needs k, n >= 1");
    std::vector<uint8_t> seen(n + 1, 0);
    for (const auto& e : edges) {
      if (static_cast<int>(e.size()) != k) throw ArgumentError("edge arity mismatch");
      for (int v : e) {
        if (v < 1 || v > n) throw ArgumentError("vertex out of range");
        if (seen[v]) throw ArgumentError("vertex reused across edges");
        seen[v] = 1;
      }
    }
  }
};

namespace detail {

// First m steps of a Fisher-Yates shuffle: after the call, scratch[0..m) is a
// uniform ordered sample of m distinct entries. scratch may hold any
// permutation of its values on entry, so it can be reused across calls.
inline void sample_prefix(SplitRng& rng, std::vector<int>& scratch, int m) {
  const size_t n = scratch.size();
  for (int i = 0; i < m; ++i) {
    const size_t j = static_cast<size_t>(i) + rng.next_below(n - i);
    std::swap(scratch[i], scratch[j]);
  }
}

}  // namespace detail

// Uniform ordered k-hypermatching with the given edge count: a random
// permutation prefix chunked into k-tuples.
inline Hypermatching random_hypermatching(int k, int edge_count, int n, SplitRng& rng) {
  if (k < 1 || n < 1 || edge_count < 0)
    throw ArgumentError("random_hypermatching: bad parameters");
  if (static_cast<long long>(k) * edge_count > n)
    throw ArgumentError("random_hypermatching: k * edge_count exceeds n");
  std::vector<int> scratch(n);
  std::iota(scratch.begin(), scratch.end(), 1);
  detail::sample_prefix(rng, scratch, k * edge_count);
  Hypermatching M;
  M.k = k;
  M.n = n;
  M.edges.reserve(edge_count);
  for (int e = 0; e < edge_count; ++e)
    M.edges.emplace_back(scratch.begin() + static_cast<size_t>(e) * k,
                         scratch.begin() + static_cast<size_t>(e + 1) * k);
  return M;
}

enum class GameCase { Yes, No };

inline const char* game_case_name(GameCase c) {
  return c == GameCase::Yes ? "yes" : "no";
}

struct PlayerSample {
  Hypermatching M;
  // One entry per edge for the folded games (BPD family), k entries per edge
  // for siRSD blocks.
  std::vector<int> z;
};

struct GameSample {
  GameCase game_case = GameCase::Yes;
  int q = 2;
  std::vector<int> x_star;
  std::vector<PlayerSample> players;
};

namespace detail {

inline std::vector<int> uniform_zq(int n, int q, SplitRng& rng) {
  std::vector<int> x(n);
  for (int& v : x) v = static_cast<int>(rng.next_below(static_cast<uint64_t>(q)));
  return x;
}

inline PlayerSample bpd_round(const std::vector<int>& x_star, int edge_count, int n,
                              GameCase gc, SplitRng& rng) {
  PlayerSample p;
  p.M = random_hypermatching(2, edge_count, n, rng);
  p.z.reserve(edge_count);
  for (const auto& e : p.M.edges) {
    const int cross = x_star[e[0] - 1] ^ x_star[e[1] - 1];
    p.z.push_back(gc == GameCase::Yes ? cross
                                      : static_cast<int>(rng.next_below(2)));
  }
  return p;
}

inline PlayerSample sirsd_round(const std::vector<int>& x_star, int k, int q,
                                int edge_count, int n, GameCase gc, SplitRng& rng) {
  PlayerSample p;
  p.M = random_hypermatching(k, edge_count, n, rng);
  p.z.reserve(static_cast<size_t>(k) * edge_count);
  for (const auto& e : p.M.edges) {
    if (gc == GameCase::Yes) {
      const int shift = static_cast<int>(rng.next_below(static_cast<uint64_t>(q)));
      for (int v : e) p.z.push_back((x_star[v - 1] + shift) % q);
    } else {
      for (int t = 0; t < k; ++t)
        p.z.push_back(static_cast<int>(rng.next_below(static_cast<uint64_t>(q))));
    }
  }
  return p;
}

}  // namespace detail

// One-player BPD sample (k = 2, q = 2): z marks the edges crossing x* in the
// Yes case and is uniform in the No case.
inline GameSample bpd_sample(int edge_count, int n, GameCase gc, SplitRng& rng) {
  GameSample s;
  s.game_case = gc;
  s.q = 2;
  s.x_star = detail::uniform_zq(n, 2, rng);
  s.players.push_back(detail::bpd_round(s.x_star, edge_count, n, gc, rng));
  return s;
}

// T players sharing one x*, each with a fresh matching and labels.
inline GameSample sbpd_sample(int T, int edge_count, int n, GameCase gc, SplitRng& rng) {
  GameSample s;
  s.game_case = gc;
  s.q = 2;
  s.x_star = detail::uniform_zq(n, 2, rng);
  s.players.reserve(T);
  for (int t = 0; t < T; ++t)
    s.players.push_back(detail::bpd_round(s.x_star, edge_count, n, gc, rng));
  return s;
}

// One-player siRSD sample: each k-block of z is x*|_e plus a uniform constant
// shift (Yes) or uniform (No).
inline GameSample sirsd_sample(int k, int q, int edge_count, int n, GameCase gc,
                               SplitRng& rng) {
  if (q < 2) throw ArgumentError("sirsd_sample: q must be at least 2");
  GameSample s;
  s.game_case = gc;
  s.q = q;
  s.x_star = detail::uniform_zq(n, q, rng);
  s.players.push_back(detail::sirsd_round(s.x_star, k, q, edge_count, n, gc, rng));
  return s;
}

// ---------------------------------------------------------------------------
// Reductions to Boolean instances
// ---------------------------------------------------------------------------

struct HardInstance {
  Instance inst;
  Assignment x_star;
  GameCase game_case = GameCase::Yes;
  int x_star_resamples = 0;  // sBPD': constant x* is resampled
};

// Max-CUT from sBPD: every edge labelled 1 becomes a unit-weight Cut
// constraint. Yes-case labels mark exactly the crossing edges, so x* cuts
// every emitted constraint. The sample is redrawn in the (astronomically
// rare) event that no edge is labelled 1, so the instance is never empty.
inline HardInstance sbpd_to_maxcut(int T, int edge_count, int n, GameCase gc,
                                   SplitRng& rng) {
  if (T < 1 || edge_count < 1)
    throw ArgumentError("sbpd_to_maxcut: need T >= 1 and edge_count >= 1");
  for (;;) {
    const GameSample s = sbpd_sample(T, edge_count, n, gc, rng);
    HardInstance out;
    out.game_case = gc;
    out.inst.n = n;
    out.inst.pred = SymmetricPredicate(2, {1});
    for (const PlayerSample& p : s.players)
      for (size_t ell = 0; ell < p.M.edges.size(); ++ell)
        if (p.z[ell] == 1)
          out.inst.cons.push_back(
              Constraint{{0, 0}, {p.M.edges[ell][0], p.M.edges[ell][1]}, 1});
    if (out.inst.cons.empty()) continue;
    out.x_star.assign(s.x_star.begin(), s.x_star.end());
    return out;
  }
}

// Max-DiCut from sBPD': Alice plants ceil(edge_count * T / 4) constraints
// (u, v) with x*_u = 1, x*_v = 0 (sampled with replacement); each Bob adds
// both orientations of every edge labelled 1. Yes-case labels mark crossing
// edges (x* satisfies one orientation of each), No-case labels mark
// non-crossing edges (x* satisfies neither), giving values near 3/5 vs 1/5.
inline HardInstance sbpd_prime_to_maxdicut(int T, int edge_count, int n, GameCase gc,
                                           SplitRng& rng) {
  if (T < 1 || edge_count < 1)
    throw ArgumentError("sbpd_prime_to_maxdicut: need T >= 1 and edge_count >= 1");
  if (n < 2) throw ArgumentError("sbpd_prime_to_maxdicut: need n >= 2");

  HardInstance out;
  out.game_case = gc;
  out.inst.n = n;
  out.inst.pred = SymmetricPredicate(2, {2});

  std::vector<int> x_star;
  std::vector<int> ones, zeros;
  for (;;) {
    x_star = detail::uniform_zq(n, 2, rng);
    ones.clear();
    zeros.clear();
    for (int i = 0; i < n; ++i) (x_star[i] ? ones : zeros).push_back(i + 1);
    if (!ones.empty() && !zeros.empty()) break;
    ++out.x_star_resamples;
  }

  const long long alice = (static_cast<long long>(edge_count) * T + 3) / 4;
  for (long long a = 0; a < alice; ++a) {
    const int u = ones[rng.next_below(ones.size())];
    const int v = zeros[rng.next_below(zeros.size())];
    out.inst.cons.push_back(Constraint{{0, 1}, {u, v}, 1});
  }

  for (int t = 0; t < T; ++t) {
    const Hypermatching M = random_hypermatching(2, edge_count, n, rng);
    for (const auto& e : M.edges) {
      const int cross = x_star[e[0] - 1] ^ x_star[e[1] - 1];
      const int z = gc == GameCase::Yes ? cross : 1 - cross;
      if (z == 1) {
        out.inst.cons.push_back(Constraint{{0, 1}, {e[0], e[1]}, 1});
        out.inst.cons.push_back(Constraint{{0, 1}, {e[1], e[0]}, 1});
      }
    }
  }

  out.x_star.assign(x_star.begin(), x_star.end());
  return out;
}

// ---------------------------------------------------------------------------
// General predicates and instances over Z_q
// ---------------------------------------------------------------------------

// Arbitrary f : Z_q^k -> {0,1} as a truth table. Index encoding: the t-th
// tuple coordinate contributes x_t * q^t (t = 0 least significant).
struct QPredicate {
  int q = 2;
  int k = 0;
  std::vector<uint8_t> table;

  QPredicate() = default;
  QPredicate(int q_, int k_, std::vector<uint8_t> table_)
      : q(q_), k(k_), table(std::move(table_)) {
    validate();
  }

  template <typename Fn>
  static QPredicate from_function(int q, int k, Fn&& fn) {
    QPredicate f;
    f.q = q;
    f.k = k;
    if (q < 2 || k < 1) throw ArgumentError("predicate needs q >= 2, k >= 1");
    size_t size = 1;
    for (int t = 0; t < k; ++t) {
      if (size > (size_t{1} << 28) / static_cast<size_t>(q))
        throw ResourceError("q^k truth table too large");
      size *= static_cast<size_t>(q);
    }
    f.table.resize(size);
    std::vector<int> x(k, 0);
    for (size_t idx = 0; idx < size; ++idx) {
      f.table[idx] = fn(static_cast<const std::vector<int>&>(x)) ? 1 : 0;
      for (int t = 0; t < k; ++t) {
        if (++x[t] < q) break;
        x[t] = 0;
      }
    }
    return f;
  }

  // q = 2 bridge from the symmetric Boolean model: accept iff the Hamming
  // weight (number of nonzero entries) lies in S.
  static QPredicate from_boolean(const SymmetricPredicate& f) {
    f.validate();
    return from_function(2, f.k, [&](const std::vector<int>& x) {
      int w = 0;
      for (int v : x) w += v != 0;
      return f.accepts_weight(w);
    });
  }

  void validate() const {
    if (q < 2 || k < 1) throw ArgumentError("predicate needs q >= 2, k >= 1");
    size_t size = 1;
    for (int t = 0; t < k; ++t) size *= static_cast<size_t>(q);
    if (table.size() != size) throw ArgumentError("truth table size mismatch");
  }

  size_t index(const std::vector<int>& x) const {
    if (static_cast<int>(x.size()) != k) throw ArgumentError("tuple arity mismatch");
    size_t idx = 0, base = 1;
    for (int t = 0; t < k; ++t) {
      const int v = ((x[t] % q) + q) % q;
      idx += static_cast<size_t>(v) * base;
      base *= static_cast<size_t>(q);
    }
    return idx;
  }

  bool eval(const std::vector<int>& x) const { return table[index(x)] != 0; }
};

// Constraints of Max-CSP({f}) are bare weighted hyperedges: satisfaction is
// f(x|_j) with no per-constraint pattern.
struct QConstraint {
  std::vector<int> j;  // 1-based distinct indices, length k
  long long w = 1;
};

struct QInstance {
  int n = 0;
  QPredicate pred;
  std::vector<QConstraint> cons;

  void validate() const {
    pred.validate();
    if (n < 1) throw ArgumentError("instance needs at least one variable");
    for (const QConstraint& c : cons) {
      if (static_cast<int>(c.j.size()) != pred.k)
        throw ArgumentError("constraint arity mismatch");
      if (c.w < 0) throw ArgumentError("constraint weights must be nonnegative");
      std::vector<int> sorted = c.j;
      std::sort(sorted.begin(), sorted.end());
      for (size_t t = 0; t < sorted.size(); ++t) {
        if (sorted[t] < 1 || sorted[t] > n)
          throw ArgumentError("variable index out of range");
        if (t > 0 && sorted[t] == sorted[t - 1])
          throw ArgumentError("constraint indices must be distinct");
      }
    }
  }

  long long total_weight() const {
    long long W = 0;
    for (const QConstraint& c : cons) {
      if (c.w > std::numeric_limits<long long>::max() - W)
        throw ResourceError("total weight overflows 64 bits");
      W += c.w;
    }
    return W;
  }
};

inline Rat value(const QInstance& inst, const std::vector<int>& x) {
  if (static_cast<int>(x.size()) != inst.n)
    throw ArgumentError("assignment length mismatch");
  const long long W = inst.total_weight();
  if (W == 0) throw ArgumentError("value undefined on zero total weight");
  long long sat = 0;
  std::vector<int> restricted(inst.pred.k);
  for (const QConstraint& c : inst.cons) {
    for (int t = 0; t < inst.pred.k; ++t) restricted[t] = x[c.j[t] - 1];
    if (inst.pred.eval(restricted)) sat += c.w;
  }
  return Rat(sat, W);
}

struct QOptResult {
  Rat value;
  std::vector<int> argmax;
};

// Exact optimum by odometer enumeration of all q^n assignments.
inline QOptResult opt_value(const QInstance& inst, long long max_states = 1 << 22) {
  inst.validate();
  const long long W = inst.total_weight();
  if (W == 0) throw ArgumentError("opt_value undefined on zero total weight");
  long long states = 1;
  for (int i = 0; i < inst.n; ++i) {
    if (states > max_states / inst.pred.q)
      throw ResourceError("opt_value: instance too large for exact enumeration");
    states *= inst.pred.q;
  }

  std::vector<int> x(inst.n, 0);
  QOptResult best{Rat(-1), x};
  std::vector<int> restricted(inst.pred.k);
  for (long long s = 0; s < states; ++s) {
    long long sat = 0;
    for (const QConstraint& c : inst.cons) {
      for (int t = 0; t < inst.pred.k; ++t) restricted[t] = x[c.j[t] - 1];
      if (inst.pred.eval(restricted)) sat += c.w;
    }
    const Rat v(sat, W);
    if (v > best.value) {
      best.value = v;
      best.argmax = x;
    }
    for (int i = 0; i < inst.n; ++i) {
      if (++x[i] < inst.pred.q) break;
      x[i] = 0;
    }
  }
  return best;
}

// omega_b(f) = E_{c ~ U(Z_q)}[f(b + c * 1)]: the expected value of a kept
// constraint at the hidden assignment in the siRSD reduction.
inline Rat omega_b(const QPredicate& f, const std::vector<int>& b) {
  if (static_cast<int>(b.size()) != f.k) throw ArgumentError("omega_b: arity mismatch");
  long long hits = 0;
  std::vector<int> shifted(f.k);
  for (int c = 0; c < f.q; ++c) {
    for (int t = 0; t < f.k; ++t) shifted[t] = (b[t] + c) % f.q;
    if (f.eval(shifted)) ++hits;
  }
  return Rat(hits, f.q);
}

struct HardQInstance {
  QInstance inst;
  std::vector<int> x_star;
  GameCase game_case = GameCase::Yes;
};

// Max-CSP({f}) from siRSD: an edge is kept iff its label block minus the base
// pattern b is a constant vector. Yes-case keeps are exactly the edges with
// x*|_e = b + c*1, so each kept constraint is satisfied by x* with
// probability omega_b(f) over the shift; No-case keeps are an independent
// q^{-(k-1)} coin per edge. As above, empty draws are redrawn.
inline HardQInstance sirsd_to_csp(const QPredicate& f, const std::vector<int>& b,
                                  int T, int edge_count, int n, GameCase gc,
                                  SplitRng& rng) {
  f.validate();
  if (static_cast<int>(b.size()) != f.k)
    throw ArgumentError("sirsd_to_csp: base pattern arity mismatch");
  if (!f.eval(b)) throw ArgumentError("sirsd_to_csp: base pattern must satisfy f");
  if (T < 1 || edge_count < 1)
    throw ArgumentError("sirsd_to_csp: need T >= 1 and edge_count >= 1");

  for (;;) {
    HardQInstance out;
    out.game_case = gc;
    out.inst.n = n;
    out.inst.pred = f;
    out.x_star = detail::uniform_zq(n, f.q, rng);
    for (int t = 0; t < T; ++t) {
      const PlayerSample p =
          detail::sirsd_round(out.x_star, f.k, f.q, edge_count, n, gc, rng);
      for (size_t ell = 0; ell < p.M.edges.size(); ++ell) {
        const int* block = p.z.data() + ell * static_cast<size_t>(f.k);
        const int base = ((block[0] - b[0]) % f.q + f.q) % f.q;
        bool constant = true;
        for (int t2 = 1; t2 < f.k && constant; ++t2)
          constant = ((block[t2] - b[t2]) % f.q + f.q) % f.q == base;
        if (constant) out.inst.cons.push_back(QConstraint{p.M.edges[ell], 1});
      }
    }
    if (!out.inst.cons.empty()) return out;
  }
}

// ---------------------------------------------------------------------------
// Distances and protocol harnesses
// ---------------------------------------------------------------------------

inline double tv_distance(const std::vector<double>& P, const std::vector<double>& Q) {
  if (P.size() != Q.size())
    throw ArgumentError("tv_distance: distributions live on different universes");
  double acc = 0.0;
  for (size_t i = 0; i < P.size(); ++i) acc += std::abs(P[i] - Q[i]);
  return acc / 2.0;
}

// Birthday-paradox protocol for BPD: Alice reveals x* on a uniform
// n_tilde-subset; Bob accepts iff every matching edge inside the subset has a
// consistent label. Returns the Monte Carlo advantage
// |Pr_Yes[accept] - Pr_No[accept]| over `trials` paired samples.
inline double birthday_advantage(int edge_count, int n, int n_tilde, int trials,
                                 SplitRng& rng) {
  if (n_tilde < 0 || n_tilde > n)
    throw ArgumentError("birthday_advantage: subset size out of range");
  if (trials < 1) throw ArgumentError("birthday_advantage: need trials >= 1");

  std::vector<int> subset_scratch(n);
  std::iota(subset_scratch.begin(), subset_scratch.end(), 1);
  std::vector<uint8_t> in_subset(n + 1, 0);

  long long accept[2] = {0, 0};
  for (int trial = 0; trial < trials; ++trial) {
    for (GameCase gc : {GameCase::Yes, GameCase::No}) {
      const GameSample s = bpd_sample(edge_count, n, gc, rng);
      detail::sample_prefix(rng, subset_scratch, n_tilde);
      for (int i = 0; i < n_tilde; ++i) in_subset[subset_scratch[i]] = 1;
      bool ok = true;
      const PlayerSample& p = s.players[0];
      for (size_t ell = 0; ell < p.M.edges.size() && ok; ++ell) {
        const int u = p.M.edges[ell][0], v = p.M.edges[ell][1];
        if (in_subset[u] && in_subset[v])
          ok = p.z[ell] == (s.x_star[u - 1] ^ s.x_star[v - 1]);
      }
      accept[gc == GameCase::Yes ? 0 : 1] += ok;
      for (int i = 0; i < n_tilde; ++i) in_subset[subset_scratch[i]] = 0;
    }
  }
  return std::abs(accept[0] - accept[1]) / static_cast<double>(trials);
}

// Monte Carlo check of the hypermatching hit probability h_alpha(ell, n):
// the chance that the fixed set {1..ell} is perfectly paired within itself
// by a random 2-matching with edge_count edges.
inline double mc_h_alpha(int ell, int n, int edge_count, int trials, SplitRng& rng) {
  if (ell < 0 || ell > n) throw ArgumentError("mc_h_alpha: ell out of range");
  if (trials < 1) throw ArgumentError("mc_h_alpha: need trials >= 1");
  if (2LL * edge_count > n)
    throw ArgumentError("mc_h_alpha: 2 * edge_count exceeds n");

  std::vector<int> scratch(n);
  std::iota(scratch.begin(), scratch.end(), 1);
  std::vector<int> partner(n + 1);
  long long hits = 0;
  for (int trial = 0; trial < trials; ++trial) {
    detail::sample_prefix(rng, scratch, 2 * edge_count);
    std::fill(partner.begin(), partner.end(), 0);
    for (int e = 0; e < edge_count; ++e) {
      const int u = scratch[2 * e], v = scratch[2 * e + 1];
      partner[u] = v;
      partner[v] = u;
    }
    bool ok = true;
    for (int v = 1; v <= ell && ok; ++v) ok = partner[v] >= 1 && partner[v] <= ell;
    hits += ok;
  }
  return static_cast<double>(hits) / trials;
}

}  // namespace mbcsp
