// Tests for the mergeable L1 sketch, the bias-vector stream, and the
// threshold value estimator. Accuracy checks run against exact references
// with fixed seeds, so they are deterministic.

#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <map>

#include "mbcsp/rng.hpp"
#include "mbcsp/sketch.hpp"
#include "oracles.hpp"

using namespace mbcsp;
using Catch::Approx;

namespace {

struct Update {
  int i;
  long long v;
};

std::vector<Update> random_stream(SplitRng& rng, int n, int len, long long wmax) {
  std::vector<Update> out;
  for (int u = 0; u < len; ++u) {
    const int i = 1 + static_cast<int>(rng.next_below(static_cast<uint64_t>(n)));
    long long v = 1 + static_cast<long long>(rng.next_below(static_cast<uint64_t>(wmax)));
    if (rng.next_bernoulli(0.5)) v = -v;
    out.push_back({i, v});
  }
  return out;
}

double exact_l1(int n, const std::vector<Update>& stream) {
  std::vector<long long> x(n + 1, 0);
  for (const auto& u : stream) x[u.i] += u.v;
  double s = 0.0;
  for (int i = 1; i <= n; ++i) s += std::llabs(x[i]);
  return s;
}

Instance random_threshold_instance(SplitRng& rng, int k, int n, int m) {
  Instance inst;
  inst.n = n;
  const int t = 1 + static_cast<int>(rng.next_below(static_cast<uint64_t>(k)));
  std::set<int> S;
  for (int s = t; s <= k; ++s) S.insert(s);
  inst.pred = SymmetricPredicate(k, S);
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i + 1;
  for (int ell = 0; ell < m; ++ell) {
    Constraint c;
    rng.shuffle(idx);
    c.j.assign(idx.begin(), idx.begin() + k);
    for (int s = 0; s < k; ++s) c.b.push_back(rng.next_bernoulli(0.5) ? 1 : 0);
    c.w = 1 + static_cast<long long>(rng.next_below(9));
    inst.cons.push_back(std::move(c));
  }
  inst.validate();
  return inst;
}

}  // namespace

TEST_CASE("sketch construction and width formula", "[sketch]") {
  CHECK_THROWS_AS(L1Sketch(0, 0.1, 0.05, 1), ArgumentError);
  CHECK_THROWS_AS(L1Sketch(10, 0.0, 0.05, 1), ArgumentError);
  CHECK_THROWS_AS(L1Sketch(10, 1.0, 0.05, 1), ArgumentError);
  CHECK_THROWS_AS(L1Sketch(10, 0.1, 0.0, 1), ArgumentError);
  CHECK_THROWS_AS(L1Sketch(10, 0.1, 1.5, 1), ArgumentError);

  CHECK(L1Sketch(10, 0.1, 0.05, 1).r() == 2397);  // ceil(8 ln 20 / 0.01)

  // With ln(1/delta) = 1 the ceil is exact, so halving eps quadruples r.
  const double delta = std::exp(-1.0);
  CHECK(L1Sketch(10, 0.5, delta, 1).r() == 32);
  CHECK(L1Sketch(10, 0.25, delta, 1).r() == 128);

  CHECK(L1Sketch(10, 0.1, 0.05, 1).estimate() == 0.0);
}

TEST_CASE("sketch updates are exact fixed-point arithmetic", "[sketch]") {
  L1Sketch a(20, 0.5, 0.3, 99);
  L1Sketch b(20, 0.5, 0.3, 99);

  SECTION("index validation") {
    CHECK_THROWS_AS(a.update(0, 1), ArgumentError);
    CHECK_THROWS_AS(a.update(21, 1), ArgumentError);
    CHECK_THROWS_AS(a.update(1, (INT64_C(1) << 41)), ResourceError);
  }

  SECTION("zero updates are no-ops") {
    a.update(3, 0);
    CHECK(a.accumulators() == b.accumulators());
  }

  SECTION("equal streams give bit-identical state") {
    for (int i = 1; i <= 20; ++i) {
      a.update(i, 3 * i - 7);
      b.update(i, 3 * i - 7);
    }
    CHECK(a.accumulators() == b.accumulators());
    // A different seed changes the coefficients.
    L1Sketch c(20, 0.5, 0.3, 100);
    c.update(1, 5);
    a = L1Sketch(20, 0.5, 0.3, 99);
    a.update(1, 5);
    CHECK(a.accumulators() != c.accumulators());
  }

  SECTION("updates cancel exactly") {
    a.update(7, 12345);
    a.update(7, -12345);
    CHECK(a.accumulators() == b.accumulators());
    CHECK(a.estimate() == 0.0);
  }

  SECTION("update order does not matter") {
    SplitRng rng(20240903, 1);
    auto stream = random_stream(rng, 20, 60, 50);
    for (const auto& u : stream) a.update(u.i, u.v);
    rng.shuffle(stream);
    for (const auto& u : stream) b.update(u.i, u.v);
    CHECK(a.accumulators() == b.accumulators());
  }

  SECTION("integer scaling is exact") {
    SplitRng rng(20240903, 2);
    const auto stream = random_stream(rng, 20, 40, 30);
    for (const auto& u : stream) {
      a.update(u.i, u.v);
      b.update(u.i, 9 * u.v);
    }
    CHECK(b.estimate() == Approx(9.0 * a.estimate()).margin(1e-12));
    for (size_t t = 0; t < a.accumulators().size(); ++t)
      CHECK(b.accumulators()[t] == 9 * a.accumulators()[t]);
  }
}

TEST_CASE("merge equals processing the whole stream", "[sketch]") {
  SplitRng rng(20240903, 3);

  SECTION("parameter mismatches are rejected") {
    L1Sketch a(10, 0.5, 0.3, 1), b(11, 0.5, 0.3, 1), c(10, 0.5, 0.3, 2),
        d(10, 0.25, 0.3, 1);
    CHECK_THROWS_AS(a.merge(b), ArgumentError);
    CHECK_THROWS_AS(a.merge(c), ArgumentError);
    CHECK_THROWS_AS(a.merge(d), ArgumentError);
  }

  SECTION("merging a fresh sketch is the identity") {
    L1Sketch a(10, 0.5, 0.3, 1), zero(10, 0.5, 0.3, 1);
    a.update(4, 17);
    const auto before = a.accumulators();
    a.merge(zero);
    CHECK(a.accumulators() == before);
  }

  SECTION("random splits are bit-exact") {
    for (int trial = 0; trial < 30; ++trial) {
      const int n = 30;
      const auto stream = random_stream(rng, n, 80, 100);
      const uint64_t seed = rng.next_u64();
      const size_t cut = rng.next_below(stream.size() + 1);

      L1Sketch whole(n, 0.5, 0.3, seed);
      for (const auto& u : stream) whole.update(u.i, u.v);

      L1Sketch left(n, 0.5, 0.3, seed), right(n, 0.5, 0.3, seed);
      for (size_t u = 0; u < stream.size(); ++u)
        (u < cut ? left : right).update(stream[u].i, stream[u].v);
      left.merge(right);

      CHECK(left.accumulators() == whole.accumulators());
    }
  }
}

TEST_CASE("sketch estimates the L1 norm", "[sketch]") {
  SplitRng rng(20240903, 4);
  const int n = 200;
  int within = 0;
  const int trials = 40;
  for (int trial = 0; trial < trials; ++trial) {
    const auto stream = random_stream(rng, n, 300, 1000);
    const double truth = exact_l1(n, stream);
    L1Sketch s(n, 0.1, 0.05, rng.next_u64());
    for (const auto& u : stream) s.update(u.i, u.v);
    if (std::fabs(s.estimate() - truth) <= 0.1 * truth) ++within;
  }
  CHECK(within >= static_cast<int>(0.9 * trials));

  // Single-coordinate vector: the estimate tracks |x_i| directly.
  int single_ok = 0;
  for (int trial = 0; trial < 40; ++trial) {
    L1Sketch s(50, 0.1, 0.05, rng.next_u64());
    s.update(17, 5);
    if (std::fabs(s.estimate() - 5.0) <= 0.5) ++single_ok;
  }
  CHECK(single_ok >= 36);
}

TEST_CASE("bias estimator streams signed constraint updates", "[sketch]") {
  SECTION("arity and weight validation") {
    BiasEstimator be(10, 2, 0.3, 0.1, 7);
    Constraint bad{{0, 1, 1}, {1, 2, 3}, 1};
    CHECK_THROWS_AS(be.feed(bad), ArgumentError);
    CHECK_THROWS_AS(be.estimate_bias(), ArgumentError);  // zero weight so far
  }

  SECTION("single all-positive constraint has full bias") {
    BiasEstimator be(10, 2, 0.2, 0.05, 7);
    be.feed(Constraint{{0, 0}, {3, 8}, 1});
    CHECK(be.total_weight() == 1);
    CHECK(be.estimate_bias() == Approx(1.0).margin(0.25));
  }

  SECTION("a constraint and its negated twin cancel exactly") {
    BiasEstimator be(10, 3, 0.3, 0.1, 7);
    be.feed(Constraint{{0, 0, 0}, {1, 2, 3}, 4});
    be.feed(Constraint{{1, 1, 1}, {1, 2, 3}, 4});
    CHECK(be.estimate_bias() == 0.0);
  }

  SECTION("normalized estimate tracks the exact bias") {
    SplitRng rng(20240903, 5);
    int ok = 0, total = 0;
    while (total < 25) {
      const int k = 2 + static_cast<int>(rng.next_below(3));
      const int n = 10 + static_cast<int>(rng.next_below(10));
      const Instance inst = random_threshold_instance(rng, k, n, 25);
      const double truth = to_double(bias_total(inst));
      if (truth < 0.05) continue;
      ++total;
      BiasEstimator be(n, k, 0.1, 0.05, rng.next_u64());
      for (const auto& c : inst.cons) be.feed(c);
      if (std::fabs(be.estimate_bias() - truth) <= 0.1 * truth) ++ok;
    }
    CHECK(ok >= 22);
  }
}

TEST_CASE("value estimator on threshold predicates", "[sketch]") {
  SECTION("rejects non-threshold predicates and bad eps") {
    CHECK_THROWS_AS(ValueEstimator(SymmetricPredicate(3, {1, 3}), 10, 0.05, 1),
                    ArgumentError);
    CHECK_THROWS_AS(ValueEstimator(SymmetricPredicate(3, {2}), 10, 0.05, 1),
                    ArgumentError);
    CHECK_THROWS_AS(ValueEstimator(SymmetricPredicate(2, {2}), 10, 0.9, 1),
                    ArgumentError);  // eps >= alpha = 4/9
  }

  SECTION("fully biased satisfiable kAND instance") {
    // Four disjoint 3AND constraints with no negations: val = 1, bias = 1.
    Instance inst;
    inst.n = 12;
    inst.pred = SymmetricPredicate(3, {3});
    for (int b = 0; b < 4; ++b)
      inst.cons.push_back(Constraint{{0, 0, 0}, {3 * b + 1, 3 * b + 2, 3 * b + 3}, 1});
    const double a = cached_threshold_alpha(inst.pred).alpha;
    const double est = estimate_value(inst, 0.05, 20240903);
    CHECK(est >= (a - 0.05) - 1e-9);
    CHECK(est <= a + 1e-9);
  }

  SECTION("zero-bias instance evaluates gamma at zero exactly") {
    Instance inst;
    inst.n = 4;
    inst.pred = SymmetricPredicate(2, {2});
    inst.cons = {{{0, 0}, {1, 2}, 3}, {{1, 1}, {1, 2}, 3}};
    ValueEstimator est(inst.pred, inst.n, 0.05, 99);
    for (const auto& c : inst.cons) est.feed(c);
    CHECK(est.bias_estimate() == 0.0);
    CHECK(est.value() == Approx(est.alpha() * gamma_mu(inst.pred, 0.0)).margin(1e-12));
  }

  SECTION("output lands in the guaranteed band on brute-forced instances") {
    SplitRng rng(20240903, 6);
    int ok = 0;
    const int trials = 20;
    for (int trial = 0; trial < trials; ++trial) {
      const int k = 2 + static_cast<int>(rng.next_below(2));
      const int n = k + 6 + static_cast<int>(rng.next_below(4));
      const Instance inst = random_threshold_instance(rng, k, n, 30);
      const double val = to_double(opt_value(inst).value);
      const double a = cached_threshold_alpha(inst.pred).alpha;
      const double est = estimate_value(inst, 0.05, rng.next_u64());
      if (est >= (a - 0.05) * val - 1e-9 && est <= val + 1e-9) ++ok;
    }
    CHECK(ok >= (2 * trials) / 3);
  }

  SECTION("split-and-merge is bit-exact against single-pass") {
    SplitRng rng(20240903, 7);
    const Instance inst = random_threshold_instance(rng, 2, 14, 24);
    Instance whole = inst;
    whole.pred = SymmetricPredicate(2, {2});

    ValueEstimator single(whole.pred, whole.n, 0.1, 777);
    for (const auto& c : whole.cons) single.feed(c);

    ValueEstimator left(whole.pred, whole.n, 0.1, 777);
    ValueEstimator right(whole.pred, whole.n, 0.1, 777);
    for (size_t i = 0; i < whole.cons.size(); ++i)
      (i < whole.cons.size() / 2 ? left : right).feed(whole.cons[i]);
    left.merge(right);

    CHECK(left.bias().sketch().accumulators() == single.bias().sketch().accumulators());
    CHECK(left.value() == single.value());
  }
}

TEST_CASE("sketch state size is independent of stream length", "[sketch]") {
  L1Sketch small(100, 0.9, 0.5, 5);
  L1Sketch large(100, 0.9, 0.5, 5);
  CHECK(small.r() == 7);

  SplitRng rng(20240903, 8);
  for (int u = 0; u < 10; ++u)
    small.update(1 + static_cast<int>(rng.next_below(100)),
                 1 + static_cast<int>(rng.next_below(50)));
  for (int u = 0; u < 1000000; ++u) {
    const int i = 1 + static_cast<int>(rng.next_below(100));
    long long v = 1 + static_cast<long long>(rng.next_below(50));
    if (rng.next_bernoulli(0.5)) v = -v;
    large.update(i, v);
  }
  CHECK(small.accumulators().size() == 7);
  CHECK(large.accumulators().size() == 7);
  CHECK(std::isfinite(large.estimate()));
}
