#pragma once

// Ordering constraint satisfaction. An ordering predicate Pi accepts a set
// of permutation patterns of [k]; a constraint j = (j_1, ..., j_k) is
// satisfied by an ordering sigma of the n objects when the pattern induced
// by sigma on j is accepted. The module provides:
//
//   * exact ordering values and brute-force optima,
//   * the coarsening Pi -> Pi^(q) to a Z_q predicate and sigma -> sigma^(q)
//     to a Z_q assignment, and the reverse refinement of a Z_q assignment
//     into an ordering,
//   * hard ordering-instance generation by refining the streaming-hard
//     Max-CSP(Pi^(q)) instances from hardgen,
//   * the small-set / balanced-partition expansion counts that bound how
//     much coarsening and refining can move the value.
//
// Conventions (they change truth tables, so they are fixed here):
//   * An ordering is stored as the position vector sigma: sigma_i is the
//     position of object i, so sigma is a permutation of [n].
//   * iota maps Z_q onto the representatives {1, ..., q} with iota(0) = q
//     and iota(v) = v otherwise.
//   * refine_assignment places blocks in representative order (1, ...,
//     q - 1, then 0 last) and orders each block by ascending variable index.
//   * Ordering instances are unweighted: every constraint counts once.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <istream>
#include <numeric>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "mbcsp/hardgen.hpp"
#include "mbcsp/rational.hpp"

namespace mbcsp {

// ---------------------------------------------------------------------------
// Predicates and instances
// ---------------------------------------------------------------------------

struct OrderingPredicate {
  int k = 0;
  std::set<std::vector<int>> accepted;

  OrderingPredicate() = default;
  OrderingPredicate(int arity, std::set<std::vector<int>> patterns)
      : k(arity), accepted(std::move(patterns)) {
    validate();
  }

  void validate() const {
    if (k < 1) throw ArgumentError("ordering predicate arity must be at least 1");
    if (accepted.empty()) throw ArgumentError("accepted pattern set must be nonempty");
    for (const std::vector<int>& pi : accepted) {
      if (static_cast<int>(pi.size()) != k)
        throw ArgumentError("accepted pattern arity mismatch");
      std::vector<uint8_t> seen(k + 1, 0);
      for (int v : pi) {
        if (v < 1 || v > k || seen[v])
          throw ArgumentError("accepted patterns must be permutations of 1..k");
        seen[v] = 1;
      }
    }
  }

  bool accepts(const std::vector<int>& pi) const { return accepted.count(pi) != 0; }

  // Maximum acyclic subgraph: the pair (u, v) wants u ordered before v.
  static OrderingPredicate mas() { return OrderingPredicate(2, {{1, 2}}); }

  // Betweenness: the middle object must sit between the outer two.
  static OrderingPredicate btwn() {
    return OrderingPredicate(3, {{1, 2, 3}, {3, 2, 1}});
  }
};

struct OrderingInstance {
  int n = 0;
  int k = 0;
  std::vector<std::vector<int>> cons;  // k distinct 1-based indices each

  void validate() const {
    if (n < 1) throw ArgumentError("ordering instance needs at least one object");
    if (k < 1) throw ArgumentError("ordering instance arity must be at least 1");
    for (const std::vector<int>& j : cons) {
      if (static_cast<int>(j.size()) != k)
        throw ArgumentError("ordering constraint arity mismatch");
      std::set<int> seen;
      for (int idx : j) {
        if (idx < 1 || idx > n) throw ArgumentError("object index out of range");
        if (!seen.insert(idx).second)
          throw ArgumentError("ordering constraint indices must be distinct");
      }
    }
  }
};

// ---------------------------------------------------------------------------
// Permutation patterns
// ---------------------------------------------------------------------------

namespace detail {

inline void validate_permutation(const std::vector<int>& sigma, int n, const char* what) {
  if (static_cast<int>(sigma.size()) != n)
    throw ArgumentError(std::string(what) + ": length mismatch");
  std::vector<uint8_t> seen(n + 1, 0);
  for (int v : sigma) {
    if (v < 1 || v > n || seen[v])
      throw ArgumentError(std::string(what) + ": not a permutation of 1..n");
    seen[v] = 1;
  }
}

// Rank pattern of k distinct values encoded in base k + 1. An accepted
// pattern (a permutation of [k]) encodes to its own digits, so codes can be
// compared across the two representations.
inline long long rank_code(const int* vals, int k) {
  long long code = 0, base = 1;
  for (int i = 0; i < k; ++i) {
    int rank = 1;
    for (int t = 0; t < k; ++t) rank += vals[t] < vals[i];
    code += rank * base;
    base *= k + 1;
  }
  return code;
}

}  // namespace detail

// Rank pattern of a tuple: the unique permutation pi with
// a_{pi^-1(1)} < ... < a_{pi^-1(k)}, or nothing when entries repeat.
inline std::optional<std::vector<int>> ord(const std::vector<int>& a) {
  const int k = static_cast<int>(a.size());
  std::vector<int> pi(k);
  for (int i = 0; i < k; ++i) {
    int rank = 1;
    for (int t = 0; t < k; ++t) {
      if (t != i && a[t] == a[i]) return std::nullopt;
      rank += a[t] < a[i];
    }
    pi[i] = rank;
  }
  return pi;
}

// Pattern induced by sigma on the constraint tuple j.
inline std::vector<int> induced(const std::vector<int>& sigma, const std::vector<int>& j) {
  const int n = static_cast<int>(sigma.size());
  std::set<int> seen;
  std::vector<int> vals(j.size());
  for (size_t t = 0; t < j.size(); ++t) {
    if (j[t] < 1 || j[t] > n) throw ArgumentError("induced: index out of range");
    if (!seen.insert(j[t]).second) throw ArgumentError("induced: repeated index");
    vals[t] = sigma[j[t] - 1];
  }
  const std::optional<std::vector<int>> pi = ord(vals);
  if (!pi) throw ArgumentError("induced: sigma is not a permutation");
  return *pi;
}

// ---------------------------------------------------------------------------
// Values
// ---------------------------------------------------------------------------

inline Rat ordvalue(const OrderingInstance& phi, const std::vector<int>& sigma,
                    const OrderingPredicate& Pi) {
  phi.validate();
  Pi.validate();
  if (phi.k != Pi.k) throw ArgumentError("ordvalue: predicate arity mismatch");
  if (phi.cons.empty()) throw ArgumentError("ordvalue undefined on an empty instance");
  detail::validate_permutation(sigma, phi.n, "ordvalue");
  long long sat = 0;
  for (const std::vector<int>& j : phi.cons) sat += Pi.accepts(induced(sigma, j));
  return Rat(sat, static_cast<long long>(phi.cons.size()));
}

struct OrdOptResult {
  Rat value;
  std::vector<int> argmax;  // lexicographically least maximizing sigma
};

// Brute-force optimum over all n! orderings (lexicographic tie-break).
inline OrdOptResult opt_ordvalue(const OrderingInstance& phi, const OrderingPredicate& Pi,
                                 int max_n = 10) {
  phi.validate();
  Pi.validate();
  if (phi.k != Pi.k) throw ArgumentError("opt_ordvalue: predicate arity mismatch");
  if (phi.cons.empty()) throw ArgumentError("opt_ordvalue undefined on an empty instance");
  if (phi.n > max_n)
    throw ResourceError("opt_ordvalue: n! enumeration over cap (n = " +
                        std::to_string(phi.n) + ")");

  std::vector<long long> codes;
  codes.reserve(Pi.accepted.size());
  for (const std::vector<int>& pi : Pi.accepted)
    codes.push_back(detail::rank_code(pi.data(), Pi.k));
  std::sort(codes.begin(), codes.end());

  std::vector<int> sigma(phi.n);
  std::iota(sigma.begin(), sigma.end(), 1);
  std::vector<int> vals(phi.k);
  long long best = -1;
  std::vector<int> best_sigma;
  do {
    long long sat = 0;
    for (const std::vector<int>& j : phi.cons) {
      for (int t = 0; t < phi.k; ++t) vals[t] = sigma[j[t] - 1];
      sat += std::binary_search(codes.begin(), codes.end(),
                                detail::rank_code(vals.data(), phi.k));
    }
    if (sat > best) {
      best = sat;
      best_sigma = sigma;
    }
  } while (std::next_permutation(sigma.begin(), sigma.end()));
  return {Rat(best, static_cast<long long>(phi.cons.size())), best_sigma};
}

// Random-ordering baseline: a uniform ordering satisfies each constraint
// with probability |accepted| / k!.
inline Rat rho_ordering(const OrderingPredicate& Pi) {
  Pi.validate();
  long long fact = 1;
  for (int t = 2; t <= Pi.k; ++t) fact *= t;
  return Rat(static_cast<long long>(Pi.accepted.size()), fact);
}

// ---------------------------------------------------------------------------
// Coarsening and refinement
// ---------------------------------------------------------------------------

// Representative of a Z_q digit: 0 plays the role of q, everything else is
// itself.
inline int iota_rep(int v, int q) { return v == 0 ? q : v; }

// Pi^(q) over Z_q^k: accept a tuple iff its representatives are distinct and
// their rank pattern is accepted by Pi. For q < k every tuple repeats a
// representative, so the table is all-zero (legal, but unsatisfiable).
inline QPredicate coarsen_predicate(const OrderingPredicate& Pi, int q) {
  Pi.validate();
  if (q < 2) throw ArgumentError("coarsen_predicate: q must be at least 2");
  return QPredicate::from_function(q, Pi.k, [&](const std::vector<int>& a) {
    std::vector<int> reps(a.size());
    for (size_t t = 0; t < a.size(); ++t) reps[t] = iota_rep(a[t], q);
    const std::optional<std::vector<int>> pi = ord(reps);
    return pi && Pi.accepts(*pi);
  });
}

// sigma^(q): object i gets the Z_q digit whose representative is
// ceil(q sigma_i / n). Monotone: sigma_u < sigma_v implies the
// representative of u is at most that of v.
inline std::vector<int> coarsen_assignment(const std::vector<int>& sigma, int q) {
  if (q < 2) throw ArgumentError("coarsen_assignment: q must be at least 2");
  const int n = static_cast<int>(sigma.size());
  detail::validate_permutation(sigma, n, "coarsen_assignment");
  std::vector<int> x(n);
  for (int i = 0; i < n; ++i) {
    const int rep = static_cast<int>((static_cast<long long>(q) * sigma[i] + n - 1) / n);
    x[i] = rep % q;
  }
  return x;
}

// Refinement of a Z_q assignment into an ordering: blocks in representative
// order, ascending variable index inside each block. Monotone:
// iota(x_u) < iota(x_v) implies sigma_u < sigma_v.
inline std::vector<int> refine_assignment(const std::vector<int>& x, int q) {
  if (q < 2) throw ArgumentError("refine_assignment: q must be at least 2");
  const int n = static_cast<int>(x.size());
  if (n < 1) throw ArgumentError("refine_assignment: empty assignment");
  for (int v : x) {
    if (v < 0 || v >= q) throw ArgumentError("refine_assignment: digit out of range");
  }
  std::vector<int> sigma(n);
  int pos = 0;
  for (int rep = 1; rep <= q; ++rep) {
    for (int i = 0; i < n; ++i) {
      if (iota_rep(x[i], q) == rep) sigma[i] = ++pos;
    }
  }
  return sigma;
}

// Same constraint tuples, read as an ordering instance. Requires unit
// weights: the ordering model is unweighted.
inline OrderingInstance refine_instance(const QInstance& psi) {
  psi.validate();
  OrderingInstance phi;
  phi.n = psi.n;
  phi.k = psi.pred.k;
  phi.cons.reserve(psi.cons.size());
  for (const QConstraint& c : psi.cons) {
    if (c.w != 1) throw ArgumentError("refine_instance requires unit weights");
    phi.cons.push_back(c.j);
  }
  return phi;
}

// Same constraint tuples, read as a Max-CSP(Pi^(q)) instance (unit weights).
inline QInstance coarsen_instance(const OrderingInstance& phi, const OrderingPredicate& Pi,
                                  int q) {
  phi.validate();
  if (phi.k != Pi.k) throw ArgumentError("coarsen_instance: predicate arity mismatch");
  QInstance psi;
  psi.n = phi.n;
  psi.pred = coarsen_predicate(Pi, q);
  psi.cons.reserve(phi.cons.size());
  for (const std::vector<int>& j : phi.cons) psi.cons.push_back(QConstraint{j, 1});
  psi.validate();
  return psi;
}

// Fraction of constraints on which x repeats a digit. Exactly the
// constraints where satisfaction can differ between an ordering and its
// coarsening, so |ordvalue(phi, sigma) - value(psi, sigma^(q))| is at most
// this fraction.
inline Rat repeated_block_fraction(const OrderingInstance& phi, const std::vector<int>& x) {
  phi.validate();
  if (static_cast<int>(x.size()) != phi.n)
    throw ArgumentError("repeated_block_fraction: assignment length mismatch");
  if (phi.cons.empty())
    throw ArgumentError("repeated_block_fraction undefined on an empty instance");
  long long repeats = 0;
  for (const std::vector<int>& j : phi.cons) {
    bool rep = false;
    for (size_t s = 0; s < j.size() && !rep; ++s) {
      for (size_t t = s + 1; t < j.size(); ++t) {
        if (x[j[s] - 1] == x[j[t] - 1]) {
          rep = true;
          break;
        }
      }
    }
    repeats += rep;
  }
  return Rat(repeats, static_cast<long long>(phi.cons.size()));
}

// ---------------------------------------------------------------------------
// Hard ordering instances
// ---------------------------------------------------------------------------

struct HardOrderingInstance {
  OrderingInstance inst;
  std::vector<int> sigma_star;  // refinement of the planted coarse assignment
  QInstance coarse;             // the Max-CSP(Pi^(q)) instance before refining
  std::vector<int> x_star;      // planted coarse assignment
  GameCase game_case = GameCase::Yes;
};

// Hard Max-OCSP(Pi) instances: run the siRSD reduction against Pi^(q) with
// the base pattern b (an accepted permutation, embedded into Z_q so that its
// representatives spell b), then refine. Yes-case orderings sigma* satisfy
// roughly a 1 - (k-1)/q fraction; No-case optima approach rho(Pi) for large
// q and T.
inline HardOrderingInstance gen_ocsp_hard(const OrderingPredicate& Pi,
                                          const std::vector<int>& b, int q, int T,
                                          int edge_count, int n, GameCase gc,
                                          SplitRng& rng) {
  Pi.validate();
  if (q < Pi.k) throw ArgumentError("gen_ocsp_hard: need q >= k");
  if (!Pi.accepts(b))
    throw ArgumentError("gen_ocsp_hard: base pattern must be an accepted permutation");
  std::vector<int> b_q(b.size());
  for (size_t t = 0; t < b.size(); ++t) b_q[t] = b[t] % q;  // k -> 0 only when q = k
  const QPredicate f = coarsen_predicate(Pi, q);
  HardQInstance hard = sirsd_to_csp(f, b_q, T, edge_count, n, gc, rng);
  HardOrderingInstance out;
  out.inst = refine_instance(hard.inst);
  out.sigma_star = refine_assignment(hard.x_star, q);
  out.coarse = std::move(hard.inst);
  out.x_star = std::move(hard.x_star);
  out.game_case = gc;
  return out;
}

// ---------------------------------------------------------------------------
// Expansion checks
// ---------------------------------------------------------------------------

// N(psi, S): constraints with at least two indices inside S.
inline long long count_twice_touching(const QInstance& psi, const std::vector<int>& S) {
  psi.validate();
  std::vector<uint8_t> in_s(psi.n + 1, 0);
  for (int v : S) {
    if (v < 1 || v > psi.n) throw ArgumentError("count_twice_touching: index out of range");
    in_s[v] = 1;
  }
  long long count = 0;
  for (const QConstraint& c : psi.cons) {
    int hits = 0;
    for (int idx : c.j) hits += in_s[idx];
    count += hits >= 2;
  }
  return count;
}

// Largest N(psi, S) / m over all S with |S| <= gamma n, by subset
// enumeration (n <= max_n). psi is a (gamma, eps)-small-set expander iff
// this is at most eps.
inline Rat sse_epsilon(const QInstance& psi, double gamma, int max_n = 18) {
  psi.validate();
  if (psi.n > max_n)
    throw ResourceError("sse_epsilon: subset enumeration over cap (n = " +
                        std::to_string(psi.n) + ")");
  if (psi.cons.empty()) return Rat(0);
  const int limit = static_cast<int>(gamma * psi.n + 1e-9);
  std::vector<uint32_t> cmasks;
  cmasks.reserve(psi.cons.size());
  for (const QConstraint& c : psi.cons) {
    uint32_t mask = 0;
    for (int idx : c.j) mask |= uint32_t{1} << (idx - 1);
    cmasks.push_back(mask);
  }
  long long worst = 0;
  for (uint32_t s = 0; s < (uint32_t{1} << psi.n); ++s) {
    if (std::popcount(s) > limit) continue;
    long long count = 0;
    for (uint32_t mask : cmasks) count += std::popcount(mask & s) >= 2;
    worst = std::max(worst, count);
  }
  return Rat(worst, static_cast<long long>(psi.cons.size()));
}

inline bool is_sse(const QInstance& psi, double gamma, double eps, int max_n = 18) {
  return to_double(sse_epsilon(psi, gamma, max_n)) <= eps + 1e-9;
}

// Largest sum_a N(psi, b^-1(a)) / m over all digit assignments b whose
// blocks all have size at most gamma n, by q^n enumeration. psi is a
// (gamma, eps)-balanced-partition expander iff this is at most eps.
inline Rat bpe_epsilon(const QInstance& psi, double gamma, long long max_states = 1 << 22) {
  psi.validate();
  const int q = psi.pred.q;
  long long states = 1;
  for (int i = 0; i < psi.n; ++i) {
    if (states > max_states / q)
      throw ResourceError("bpe_epsilon: q^n enumeration over cap");
    states *= q;
  }
  if (psi.cons.empty()) return Rat(0);
  const int limit = static_cast<int>(gamma * psi.n + 1e-9);
  std::vector<int> assign(psi.n, 0), block_size(q, 0), digit_hits(q, 0);
  block_size[0] = psi.n;
  long long worst = 0;
  for (long long s = 0; s < states; ++s) {
    bool balanced = true;
    for (int a = 0; a < q; ++a) {
      if (block_size[a] > limit) {
        balanced = false;
        break;
      }
    }
    if (balanced) {
      long long total = 0;
      for (const QConstraint& c : psi.cons) {
        for (int idx : c.j) ++digit_hits[assign[idx - 1]];
        for (int idx : c.j) {
          const int a = assign[idx - 1];
          if (digit_hits[a] >= 2) ++total;
          digit_hits[a] = 0;  // count each twice-hit block once, then reset
        }
      }
      worst = std::max(worst, total);
    }
    for (int i = 0; i < psi.n; ++i) {  // odometer step
      --block_size[assign[i]];
      if (++assign[i] < q) {
        ++block_size[assign[i]];
        break;
      }
      assign[i] = 0;
      ++block_size[0];
    }
  }
  return Rat(worst, static_cast<long long>(psi.cons.size()));
}

inline bool is_bpe(const QInstance& psi, double gamma, double eps,
                   long long max_states = 1 << 22) {
  return to_double(bpe_epsilon(psi, gamma, max_states)) <= eps + 1e-9;
}

// ---------------------------------------------------------------------------
// Text format
// ---------------------------------------------------------------------------
//
//   ocsp k=<k> n=<n> m=<m> pred=<mas|btwn|perm-list:p1;p2;...>
//   <j_1> ... <j_k>
//
// perm-list patterns are comma-separated values, semicolon-separated
// patterns (e.g. perm-list:1,2,3;3,2,1). '#' starts a comment; blank lines
// are skipped.
// ---------------------------------------------------------------------------

inline std::string ordering_predicate_token(const OrderingPredicate& Pi) {
  Pi.validate();
  if (Pi.k == 2 && Pi.accepted == OrderingPredicate::mas().accepted) return "mas";
  if (Pi.k == 3 && Pi.accepted == OrderingPredicate::btwn().accepted) return "btwn";
  std::string token = "perm-list:";
  bool first_pattern = true;
  for (const std::vector<int>& pi : Pi.accepted) {
    if (!first_pattern) token += ';';
    first_pattern = false;
    for (size_t t = 0; t < pi.size(); ++t) {
      if (t > 0) token += ',';
      token += std::to_string(pi[t]);
    }
  }
  return token;
}

inline OrderingPredicate parse_ordering_predicate_token(const std::string& token, int k,
                                                        int lineno) {
  const std::string where = "line " + std::to_string(lineno);
  if (token == "mas") {
    if (k != 2) throw ParseError(where + ": pred=mas requires k=2");
    return OrderingPredicate::mas();
  }
  if (token == "btwn") {
    if (k != 3) throw ParseError(where + ": pred=btwn requires k=3");
    return OrderingPredicate::btwn();
  }
  const std::string prefix = "perm-list:";
  if (token.rfind(prefix, 0) != 0)
    throw ParseError(where + ": unknown predicate '" + token + "'");
  std::set<std::vector<int>> patterns;
  std::istringstream ps(token.substr(prefix.size()));
  std::string pattern;
  while (std::getline(ps, pattern, ';')) {
    std::vector<int> pi;
    std::istringstream es(pattern);
    std::string entry;
    while (std::getline(es, entry, ','))
      pi.push_back(static_cast<int>(detail::parse_int(entry, lineno, "pattern entry")));
    patterns.insert(std::move(pi));
  }
  try {
    return OrderingPredicate(k, std::move(patterns));
  } catch (const ArgumentError& e) {
    throw ParseError(where + ": " + e.what());
  }
}

inline void write_ordering_instance(std::ostream& out, const OrderingInstance& phi,
                                    const OrderingPredicate& Pi,
                                    const std::string& trailer = "") {
  phi.validate();
  if (phi.k != Pi.k)
    throw ArgumentError("write_ordering_instance: predicate arity mismatch");
  out << "ocsp k=" << phi.k << " n=" << phi.n << " m=" << phi.cons.size()
      << " pred=" << ordering_predicate_token(Pi) << '\n';
  for (const std::vector<int>& j : phi.cons) {
    for (size_t t = 0; t < j.size(); ++t) {
      if (t > 0) out << ' ';
      out << j[t];
    }
    out << '\n';
  }
  if (!trailer.empty()) out << "# " << trailer << '\n';
}

struct ParsedOrderingInstance {
  OrderingInstance inst;
  OrderingPredicate pred;
};

inline ParsedOrderingInstance parse_ordering_instance(std::istream& in) {
  int lineno = 0;
  std::string line;
  if (!detail::next_content_line(in, line, lineno))
    throw ParseError("empty input: missing ocsp header");

  std::istringstream hs(line);
  std::string tag;
  hs >> tag;
  if (tag != "ocsp")
    throw ParseError("line " + std::to_string(lineno) + ": expected 'ocsp' header");

  int k = -1, n = -1;
  long long m = -1;
  std::string pred_token;
  std::string field;
  while (hs >> field) {
    const size_t eq = field.find('=');
    if (eq == std::string::npos)
      throw ParseError("line " + std::to_string(lineno) + ": bad header field '" + field + "'");
    const std::string key = field.substr(0, eq), val = field.substr(eq + 1);
    if (key == "k") {
      k = static_cast<int>(detail::parse_int(val, lineno, "k"));
    } else if (key == "n") {
      n = static_cast<int>(detail::parse_int(val, lineno, "n"));
    } else if (key == "m") {
      m = detail::parse_int(val, lineno, "m");
    } else if (key == "pred") {
      pred_token = val;
    } else {
      throw ParseError("line " + std::to_string(lineno) + ": unknown header key '" + key + "'");
    }
  }
  if (k < 1 || n < 1 || m < 0 || pred_token.empty())
    throw ParseError("line " + std::to_string(lineno) + ": header must set k, n, m, pred");

  ParsedOrderingInstance out;
  out.pred = parse_ordering_predicate_token(pred_token, k, lineno);
  out.inst.n = n;
  out.inst.k = k;

  for (long long row = 0; row < m; ++row) {
    if (!detail::next_content_line(in, line, lineno))
      throw ParseError("unexpected end of input: expected " + std::to_string(m) +
                       " constraints, got " + std::to_string(row));
    std::istringstream cs(line);
    std::vector<int> j(k);
    for (int t = 0; t < k; ++t) {
      std::string tok;
      if (!(cs >> tok))
        throw ParseError("line " + std::to_string(lineno) + ": missing index");
      j[t] = static_cast<int>(detail::parse_int(tok, lineno, "index"));
    }
    std::string extra;
    if (cs >> extra)
      throw ParseError("line " + std::to_string(lineno) + ": trailing data '" + extra + "'");
    out.inst.cons.push_back(std::move(j));
  }

  try {
    out.inst.validate();
  } catch (const ArgumentError& e) {
    throw ParseError(std::string("invalid ordering instance: ") + e.what());
  }
  return out;
}

// Provenance trailer written by the ordering generators:
//   # planted-order <sigma_1,...,sigma_n> case <yes|no> seed <u64>
struct PlantedOrderInfo {
  std::vector<int> sigma;
  std::string case_name;
  uint64_t seed = 0;
};

inline std::string planted_order_trailer(const std::vector<int>& sigma,
                                         const std::string& case_name, uint64_t seed) {
  std::string joined;
  for (size_t i = 0; i < sigma.size(); ++i) {
    if (i > 0) joined += ',';
    joined += std::to_string(sigma[i]);
  }
  return "planted-order " + joined + " case " + case_name + " seed " +
         std::to_string(seed);
}

inline std::optional<PlantedOrderInfo> parse_planted_order_trailer(std::istream& in) {
  std::string line;
  std::optional<PlantedOrderInfo> found;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string hash, tag;
    if (!(ls >> hash) || hash != "#") continue;
    if (!(ls >> tag) || tag != "planted-order") continue;
    PlantedOrderInfo info;
    std::string joined, casekw, caseval, seedkw, seedval;
    if (!(ls >> joined >> casekw >> caseval >> seedkw >> seedval)) continue;
    if (casekw != "case" || seedkw != "seed") continue;
    std::istringstream ss(joined);
    std::string item;
    bool ok = true;
    while (std::getline(ss, item, ',')) {
      try {
        info.sigma.push_back(static_cast<int>(detail::parse_int(item, 0, "sigma entry")));
      } catch (const ParseError&) {
        ok = false;
        break;
      }
    }
    if (!ok || info.sigma.empty()) continue;
    info.case_name = caseval;
    info.seed = std::stoull(seedval);
    found = std::move(info);
  }
  return found;
}

}  // namespace mbcsp
