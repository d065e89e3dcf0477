#pragma once

// Exact model of Boolean constraint satisfaction with symmetric predicates.
//
// A predicate is described by an arity k and a set S of accepted Hamming
// weights: f_{S,k}(x) = 1 iff the weight of x lies in S. A constraint
// (b, j, w) applies the predicate to the negated restriction b XOR x|_j.
// Everything here is exact: weights are 64-bit integers, values and level
// distributions are arbitrary-precision rationals, and the optimum is found
// by full enumeration (with an incremental Gray-code walk).

#include <algorithm>
#include <array>
#include <cstdint>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mbcsp/poly.hpp"
#include "mbcsp/rational.hpp"

namespace mbcsp {

struct SymmetricPredicate {
  int k = 0;
  std::set<int> S;

  SymmetricPredicate() = default;
  SymmetricPredicate(int arity, std::set<int> weights) : k(arity), S(std::move(weights)) {
    validate();
  }

  void validate() const {
    if (k < 1) throw ArgumentError("predicate arity must be at least 1");
    if (S.empty()) throw ArgumentError("accepted weight set must be nonempty");
    for (int s : S) {
      if (s < 1 || s > k)
        throw ArgumentError("accepted weights must lie in 1.." + std::to_string(k));
    }
  }

  bool accepts_weight(int w) const { return S.count(w) != 0; }

  int min_weight() const { return *S.begin(); }
  int max_weight() const { return *S.rbegin(); }
};

// f_{S,k} applied to an explicit bit vector.
inline bool eval_predicate(const SymmetricPredicate& f, const std::vector<uint8_t>& bits) {
  if (static_cast<int>(bits.size()) != f.k)
    throw ArgumentError("eval_predicate: arity mismatch");
  int w = 0;
  for (uint8_t b : bits) w += (b != 0);
  return f.accepts_weight(w);
}

struct Constraint {
  std::vector<uint8_t> b;  // negation pattern, length k
  std::vector<int> j;      // 1-based distinct variable indices, length k
  long long w = 1;         // nonnegative weight
};

using Assignment = std::vector<uint8_t>;  // x[i] is the value of variable i+1

struct Instance {
  int n = 0;
  SymmetricPredicate pred;
  std::vector<Constraint> cons;

  int k() const { return pred.k; }

  void validate() const {
    pred.validate();
    if (n < 1) throw ArgumentError("instance needs at least one variable");
    for (const Constraint& c : cons) {
      if (static_cast<int>(c.b.size()) != pred.k || static_cast<int>(c.j.size()) != pred.k)
        throw ArgumentError("constraint arity mismatch");
      if (c.w < 0) throw ArgumentError("constraint weights must be nonnegative");
      std::set<int> seen;
      for (int idx : c.j) {
        if (idx < 1 || idx > n) throw ArgumentError("variable index out of range");
        if (!seen.insert(idx).second)
          throw ArgumentError("constraint indices must be distinct");
      }
    }
  }

  long long total_weight() const {
    long long W = 0;
    for (const Constraint& c : cons) {
      if (c.w > std::numeric_limits<long long>::max() - W)
        throw ResourceError("total weight overflows 64 bits");
      W += c.w;
    }
    return W;
  }
};

// Hamming weight of b XOR x|_j for one constraint.
inline int constraint_level(const Constraint& c, const Assignment& x) {
  int w = 0;
  for (size_t t = 0; t < c.j.size(); ++t) w += (c.b[t] ^ x[c.j[t] - 1]) != 0;
  return w;
}

inline bool satisfies(const SymmetricPredicate& f, const Constraint& c, const Assignment& x) {
  return f.accepts_weight(constraint_level(c, x));
}

inline Rat value(const Instance& inst, const Assignment& x) {
  if (static_cast<int>(x.size()) != inst.n)
    throw ArgumentError("assignment length mismatch");
  const long long W = inst.total_weight();
  if (W == 0) throw ArgumentError("value undefined on zero total weight");
  long long sat = 0;
  for (const Constraint& c : inst.cons)
    if (satisfies(inst.pred, c, x)) sat += c.w;
  return Rat(sat, W);
}

struct OptResult {
  Rat value;
  Assignment argmax;
};

// Exact optimum by Gray-code enumeration: consecutive assignments differ in
// one variable, so only the constraints touching that variable are retouched.
// Ties resolve to the lexicographically smallest assignment.
inline OptResult opt_value(const Instance& inst, int max_n = 24) {
  inst.validate();
  if (inst.n > max_n)
    throw ResourceError("opt_value: instance too large for exact enumeration");
  const long long W = inst.total_weight();
  if (W == 0) throw ArgumentError("opt_value undefined on zero total weight");

  const int n = inst.n;
  const size_t m = inst.cons.size();
  std::vector<std::vector<std::pair<int, int>>> touch(n);  // var -> (constraint, slot)
  for (size_t ci = 0; ci < m; ++ci)
    for (size_t t = 0; t < inst.cons[ci].j.size(); ++t)
      touch[inst.cons[ci].j[t] - 1].push_back({static_cast<int>(ci), static_cast<int>(t)});

  Assignment x(n, 0);
  std::vector<int> level(m);
  long long sat = 0;
  for (size_t ci = 0; ci < m; ++ci) {
    level[ci] = constraint_level(inst.cons[ci], x);
    if (inst.pred.accepts_weight(level[ci])) sat += inst.cons[ci].w;
  }

  long long best = sat;
  Assignment best_x = x;

  const uint64_t total = 1ULL << n;
  for (uint64_t step = 1; step < total; ++step) {
    const int v = __builtin_ctzll(step);  // Gray code: flip the lowest set bit index
    x[v] ^= 1;
    for (auto [ci, t] : touch[v]) {
      const Constraint& c = inst.cons[ci];
      const bool was = inst.pred.accepts_weight(level[ci]);
      level[ci] += (c.b[t] ^ x[v]) ? 1 : -1;
      const bool now = inst.pred.accepts_weight(level[ci]);
      if (was != now) sat += now ? c.w : -c.w;
    }
    if (sat > best || (sat == best && x < best_x)) {
      best = sat;
      best_x = x;
    }
  }
  return {Rat(best, W), best_x};
}

// rho(f) = average of f over uniform inputs = 2^-k * sum_{s in S} C(k,s).
inline Rat rho(const SymmetricPredicate& f) {
  f.validate();
  BigInt num = 0;
  for (int s : f.S) num += binomial(f.k, s);
  return Rat(num, BigInt(1) << f.k);
}

struct RhoSingleResult {
  double r_star = 0.0;
  double value = 0.0;
};

// sup_r sum_{s in S} C(k,s) r^s (1-r)^(k-s): the best product distribution for
// the single-predicate (no negations) problem.
inline RhoSingleResult rho_single_family(const SymmetricPredicate& f) {
  f.validate();
  RatPoly rp;
  for (int s : f.S) rp.add_p_q_term(s, f.k - s, Rat(binomial(f.k, s)));
  const MaxResult m = maximize01(rp.to_poly());
  return {m.arg, m.value};
}

// Level distribution of an assignment: D<i> = weight fraction of constraints
// whose negated restriction has Hamming weight i.
inline std::vector<Rat> template_distribution(const Instance& inst, const Assignment& x) {
  if (static_cast<int>(x.size()) != inst.n)
    throw ArgumentError("assignment length mismatch");
  const long long W = inst.total_weight();
  if (W == 0) throw ArgumentError("template undefined on zero total weight");
  std::vector<long long> mass(inst.k() + 1, 0);
  for (const Constraint& c : inst.cons) mass[constraint_level(c, x)] += c.w;
  std::vector<Rat> D(inst.k() + 1);
  for (int i = 0; i <= inst.k(); ++i) D[i] = Rat(mass[i], W);
  return D;
}

// Signed bias of one variable: sum over occurrences of (-1)^{b_t} * w.
inline long long bias_var(const Instance& inst, int var) {
  if (var < 1 || var > inst.n) throw ArgumentError("bias_var: index out of range");
  long long acc = 0;
  for (const Constraint& c : inst.cons)
    for (size_t t = 0; t < c.j.size(); ++t)
      if (c.j[t] == var) acc += c.b[t] ? -c.w : c.w;
  return acc;
}

// Total normalized bias: (1/(kW)) * sum_i |bias_var(i)|.
inline Rat bias_total(const Instance& inst) {
  const long long W = inst.total_weight();
  if (W == 0) throw ArgumentError("bias undefined on zero total weight");
  std::vector<long long> acc(inst.n, 0);
  for (const Constraint& c : inst.cons)
    for (size_t t = 0; t < c.j.size(); ++t)
      acc[c.j[t] - 1] += c.b[t] ? -c.w : c.w;
  BigInt num = 0;
  for (long long a : acc) num += a < 0 ? BigInt(-a) : BigInt(a);
  return Rat(num, BigInt(inst.k()) * W);
}

inline Instance union_instances(const Instance& a, const Instance& b) {
  if (a.pred.k != b.pred.k || a.pred.S != b.pred.S)
    throw ArgumentError("union requires identical predicates");
  Instance out = a;
  out.n = std::max(a.n, b.n);
  out.cons.insert(out.cons.end(), b.cons.begin(), b.cons.end());
  return out;
}

// ---------------------------------------------------------------------------
// Text format
//
//   mbcsp k=<k> n=<n> m=<m> S=<w1,w2,...>
//   <k bits of b> <j_1> ... <j_k> <w>
//
// '#' starts a comment; blank lines are skipped. Indices are 1-based.
// ---------------------------------------------------------------------------

namespace detail {

inline bool next_content_line(std::istream& in, std::string& line, int& lineno) {
  while (std::getline(in, line)) {
    ++lineno;
    const size_t pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos) continue;
    if (line[pos] == '#') continue;
    return true;
  }
  return false;
}

inline long long parse_int(const std::string& tok, int lineno, const char* what) {
  try {
    size_t used = 0;
    const long long v = std::stoll(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ParseError("line " + std::to_string(lineno) + ": bad " + what + " '" + tok + "'");
  }
}

}  // namespace detail

inline Instance parse_instance(std::istream& in) {
  int lineno = 0;
  std::string line;
  if (!detail::next_content_line(in, line, lineno))
    throw ParseError("empty input: missing mbcsp header");

  std::istringstream hs(line);
  std::string tag;
  hs >> tag;
  if (tag != "mbcsp") throw ParseError("line " + std::to_string(lineno) + ": expected 'mbcsp' header");

  int k = -1, n = -1;
  long long m = -1;
  std::set<int> S;
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
    } else if (key == "S") {
      std::istringstream ss(val);
      std::string item;
      while (std::getline(ss, item, ','))
        S.insert(static_cast<int>(detail::parse_int(item, lineno, "S entry")));
    } else {
      throw ParseError("line " + std::to_string(lineno) + ": unknown header key '" + key + "'");
    }
  }
  if (k < 1 || n < 1 || m < 0 || S.empty())
    throw ParseError("line " + std::to_string(lineno) + ": header must set k, n, m, S");

  Instance inst;
  inst.n = n;
  try {
    inst.pred = SymmetricPredicate(k, S);
  } catch (const ArgumentError& e) {
    throw ParseError("line " + std::to_string(lineno) + ": " + e.what());
  }

  for (long long row = 0; row < m; ++row) {
    if (!detail::next_content_line(in, line, lineno))
      throw ParseError("unexpected end of input: expected " + std::to_string(m) +
                       " constraints, got " + std::to_string(row));
    std::istringstream cs(line);
    std::string bstr;
    cs >> bstr;
    if (static_cast<int>(bstr.size()) != k)
      throw ParseError("line " + std::to_string(lineno) + ": pattern must have " +
                       std::to_string(k) + " bits");
    Constraint c;
    c.b.resize(k);
    for (int t = 0; t < k; ++t) {
      if (bstr[t] != '0' && bstr[t] != '1')
        throw ParseError("line " + std::to_string(lineno) + ": pattern must be bits");
      c.b[t] = bstr[t] == '1';
    }
    c.j.resize(k);
    for (int t = 0; t < k; ++t) {
      std::string tok;
      if (!(cs >> tok))
        throw ParseError("line " + std::to_string(lineno) + ": missing index");
      c.j[t] = static_cast<int>(detail::parse_int(tok, lineno, "index"));
    }
    std::string wtok;
    if (!(cs >> wtok)) throw ParseError("line " + std::to_string(lineno) + ": missing weight");
    c.w = detail::parse_int(wtok, lineno, "weight");
    std::string extra;
    if (cs >> extra)
      throw ParseError("line " + std::to_string(lineno) + ": trailing data '" + extra + "'");
    inst.cons.push_back(std::move(c));
  }

  try {
    inst.validate();
  } catch (const ArgumentError& e) {
    throw ParseError(std::string("invalid instance: ") + e.what());
  }
  return inst;
}

inline void write_instance(std::ostream& out, const Instance& inst,
                           const std::string& trailer = "") {
  out << "mbcsp k=" << inst.k() << " n=" << inst.n << " m=" << inst.cons.size() << " S=";
  bool first = true;
  for (int s : inst.pred.S) {
    if (!first) out << ',';
    out << s;
    first = false;
  }
  out << '\n';
  for (const Constraint& c : inst.cons) {
    for (uint8_t bit : c.b) out << (bit ? '1' : '0');
    for (int idx : c.j) out << ' ' << idx;
    out << ' ' << c.w << '\n';
  }
  if (!trailer.empty()) out << "# " << trailer << '\n';
}

// Provenance trailer written by the generators:
//   # planted <bits> case <yes|no> seed <u64>
struct PlantedInfo {
  Assignment xstar;
  std::string case_name;
  uint64_t seed = 0;
};

inline std::string planted_trailer(const Assignment& xstar, const std::string& case_name,
                                   uint64_t seed) {
  std::string bits;
  bits.reserve(xstar.size());
  for (uint8_t b : xstar) bits.push_back(b ? '1' : '0');
  return "planted " + bits + " case " + case_name + " seed " + std::to_string(seed);
}

inline std::optional<PlantedInfo> parse_planted_trailer(std::istream& in) {
  std::string line;
  std::optional<PlantedInfo> found;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string hash, tag;
    if (!(ls >> hash) || hash != "#") continue;
    if (!(ls >> tag) || tag != "planted") continue;
    PlantedInfo info;
    std::string bits, casekw, caseval, seedkw, seedval;
    if (!(ls >> bits >> casekw >> caseval >> seedkw >> seedval)) continue;
    if (casekw != "case" || seedkw != "seed") continue;
    info.xstar.reserve(bits.size());
    bool ok = true;
    for (char ch : bits) {
      if (ch != '0' && ch != '1') {
        ok = false;
        break;
      }
      info.xstar.push_back(ch == '1');
    }
    if (!ok) continue;
    info.case_name = caseval;
    info.seed = std::stoull(seedval);
    found = std::move(info);
  }
  return found;
}

}  // namespace mbcsp
