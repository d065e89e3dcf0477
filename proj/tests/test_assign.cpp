// Tests for majority + perturbation rounding: majority signs, perturbation
// statistics, the closed-form expected value, and the certified saddle
// guarantee chain lambda(D, p*) >= alpha * gamma(bias) >= alpha * opt.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "mbcsp/assign.hpp"
#include "mbcsp/rng.hpp"
#include "oracles.hpp"

using namespace mbcsp;
using Catch::Approx;

namespace {

Instance worked_example() {
  Instance inst;
  inst.n = 2;
  inst.pred = SymmetricPredicate(2, {2});
  inst.cons = {
      {{0, 0}, {1, 2}, 2},
      {{0, 1}, {1, 2}, 1},
      {{1, 1}, {1, 2}, 3},
  };
  inst.validate();
  return inst;
}

Instance random_instance(SplitRng& rng, int k, int n, int m, long long wmax = 10) {
  Instance inst;
  inst.n = n;
  std::set<int> S;
  while (S.empty())
    for (int s = 1; s <= k; ++s)
      if (rng.next_bernoulli(0.5)) S.insert(s);
  inst.pred = SymmetricPredicate(k, S);
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i + 1;
  for (int ell = 0; ell < m; ++ell) {
    Constraint c;
    rng.shuffle(idx);
    c.j.assign(idx.begin(), idx.begin() + k);
    for (int t = 0; t < k; ++t) c.b.push_back(rng.next_bernoulli(0.5) ? 1 : 0);
    c.w = 1 + static_cast<long long>(rng.next_below(static_cast<uint64_t>(wmax)));
    inst.cons.push_back(std::move(c));
  }
  inst.validate();
  return inst;
}

// Same shape but with a threshold acceptance set t..k.
Instance random_threshold_instance(SplitRng& rng, int k, int n, int m,
                                   long long wmax = 10) {
  Instance inst = random_instance(rng, k, n, m, wmax);
  const int t = 1 + static_cast<int>(rng.next_below(static_cast<uint64_t>(k)));
  std::set<int> S;
  for (int s = t; s <= k; ++s) S.insert(s);
  inst.pred = SymmetricPredicate(k, S);
  return inst;
}

}  // namespace

TEST_CASE("majority assignment follows bias signs", "[assign]") {
  SECTION("worked example: bias (0, -2) gives (1, 0)") {
    const Instance inst = worked_example();
    const Assignment x = majority_assignment(inst);
    REQUIRE(x.size() == 2);
    CHECK(x[0] == 1);  // bias exactly 0 resolves to 1
    CHECK(x[1] == 0);
  }

  SECTION("all-positive occurrences give all-ones") {
    SplitRng rng(20240904, 1);
    Instance inst = random_instance(rng, 3, 8, 20);
    for (auto& c : inst.cons) c.b.assign(3, 0);
    const Assignment x = majority_assignment(inst);
    for (uint8_t xi : x) CHECK(xi == 1);
  }

  SECTION("untouched variables default to 1") {
    Instance inst;
    inst.n = 4;
    inst.pred = SymmetricPredicate(2, {2});
    inst.cons = {{{1, 1}, {1, 2}, 5}};
    const Assignment x = majority_assignment(inst);
    CHECK(x[0] == 0);
    CHECK(x[1] == 0);
    CHECK(x[2] == 1);
    CHECK(x[3] == 1);
  }

  SECTION("DiCut edge: source gets 1, sink gets 0, and it is satisfied") {
    Instance inst;
    inst.n = 2;
    inst.pred = SymmetricPredicate(2, {2});
    inst.cons = {{{0, 1}, {1, 2}, 7}};
    const Assignment x = majority_assignment(inst);
    CHECK(x[0] == 1);
    CHECK(x[1] == 0);
    CHECK(value(inst, x) == Rat(1));
  }

  SECTION("agrees with bias_var on random instances") {
    SplitRng rng(20240904, 2);
    for (int trial = 0; trial < 20; ++trial) {
      const int k = 2 + static_cast<int>(rng.next_below(3));
      const int n = k + 2 + static_cast<int>(rng.next_below(6));
      const Instance inst = random_instance(rng, k, n, 1 + static_cast<int>(rng.next_below(25)));
      const Assignment x = majority_assignment(inst);
      for (int i = 1; i <= n; ++i)
        CHECK(x[i - 1] == (bias_var(inst, i) >= 0 ? 1 : 0));
    }
  }
}

TEST_CASE("perturbation endpoints, determinism, and flip rate", "[assign]") {
  SplitRng rng(20240904, 3);
  Assignment x(60);
  for (auto& b : x) b = rng.next_bernoulli(0.5) ? 1 : 0;

  SECTION("p = 1 is the identity, p = 0 the complement") {
    CHECK(perturb(x, {1.0, 7}) == x);
    Assignment comp = x;
    for (auto& b : comp) b ^= 1;
    CHECK(perturb(x, {0.0, 7}) == comp);
  }

  SECTION("deterministic given the seed") {
    const Assignment a = perturb(x, {0.5, 41});
    const Assignment b = perturb(x, {0.5, 41});
    const Assignment c = perturb(x, {0.5, 42});
    CHECK(a == b);
    CHECK(a != c);
  }

  SECTION("empirical flip rate within 3 sigma of 1 - p_star") {
    const int n = 100000;
    const double p_star = 2.0 / 3;
    const Assignment zeros(n, 0);
    const Assignment y = perturb(zeros, {p_star, 20240904});
    long flips = 0;
    for (uint8_t b : y) flips += b;
    const double mean = n * (1.0 - p_star);
    const double sigma = std::sqrt(n * p_star * (1.0 - p_star));
    CHECK(std::abs(flips - mean) <= 3.0 * sigma);
  }

  SECTION("p outside [0,1] is rejected") {
    CHECK_THROWS_AS(perturb(x, {-0.1, 0}), ArgumentError);
    CHECK_THROWS_AS(perturb(x, {1.1, 0}), ArgumentError);
  }
}

TEST_CASE("expected perturbed value is the lambda closed form", "[assign]") {
  SplitRng rng(20240904, 4);

  SECTION("p = 1 recovers the exact value") {
    for (int trial = 0; trial < 10; ++trial) {
      const Instance inst = random_instance(rng, 2 + static_cast<int>(rng.next_below(3)),
                                            8, 1 + static_cast<int>(rng.next_below(20)));
      Assignment x(inst.n);
      for (auto& b : x) b = rng.next_bernoulli(0.5) ? 1 : 0;
      CHECK(expected_perturbed_value_exact(inst, x, Rat(1)) == value(inst, x));
    }
  }

  SECTION("p = 1/2 gives rho regardless of the assignment") {
    for (int trial = 0; trial < 10; ++trial) {
      const Instance inst = random_instance(rng, 2 + static_cast<int>(rng.next_below(3)),
                                            7, 1 + static_cast<int>(rng.next_below(15)));
      Assignment x(inst.n);
      for (auto& b : x) b = rng.next_bernoulli(0.5) ? 1 : 0;
      CHECK(expected_perturbed_value_exact(inst, x, Rat(1, 2)) == rho(inst.pred));
    }
  }

  SECTION("matches exhaustive enumeration over all perturbation patterns") {
    const Rat ps[] = {Rat(1, 3), Rat(1, 2), Rat(2, 3), Rat(4, 5)};
    for (int trial = 0; trial < 12; ++trial) {
      const int k = 2 + static_cast<int>(rng.next_below(2));
      const int n = k + 2 + static_cast<int>(rng.next_below(4));  // n <= 8
      const Instance inst = random_instance(rng, k, n, 1 + static_cast<int>(rng.next_below(12)));
      Assignment x(inst.n);
      for (auto& b : x) b = rng.next_bernoulli(0.5) ? 1 : 0;
      const Rat& p = ps[trial % 4];
      const Rat closed = expected_perturbed_value_exact(inst, x, p);
      CHECK(closed == oracles::oracle_perturbation_expectation(inst, x, p));
      CHECK(expected_perturbed_value(inst, x, to_double(p)) ==
            Approx(to_double(closed)).margin(1e-12));
    }
  }

  SECTION("2AND majority at p = 2/3 dominates (2/9)(1 + bias)") {
    for (int trial = 0; trial < 25; ++trial) {
      Instance inst = random_instance(rng, 2, 6 + static_cast<int>(rng.next_below(5)),
                                      1 + static_cast<int>(rng.next_below(30)));
      inst.pred = SymmetricPredicate(2, {2});
      const Assignment maj = majority_assignment(inst);
      const Rat lhs = expected_perturbed_value_exact(inst, maj, Rat(2, 3));
      const Rat rhs = Rat(2, 9) * (Rat(1) + bias_total(inst));
      CHECK(lhs >= rhs);  // exact rational comparison
      CHECK(lhs >= Rat(4, 9) * opt_value(inst).value);
    }
  }
}

TEST_CASE("certified saddle guarantee on random threshold instances", "[assign]") {
  SplitRng rng(20240904, 5);
  for (int trial = 0; trial < 30; ++trial) {
    const int k = 2 + static_cast<int>(rng.next_below(3));
    const int n = k + 3 + static_cast<int>(rng.next_below(6));
    const Instance inst =
        random_threshold_instance(rng, k, n, 1 + static_cast<int>(rng.next_below(30)));
    const AlphaResult& ar = cached_threshold_alpha(inst.pred);
    REQUIRE(ar.certified);

    const Assignment maj = majority_assignment(inst);
    const double epv = expected_perturbed_value(inst, maj, ar.p_star);
    const double bias = to_double(bias_total(inst));
    const double envelope = ar.alpha * gamma_mu(inst.pred, bias);
    const double opt = to_double(opt_value(inst).value);
    CHECK(epv >= envelope - 1e-12);
    CHECK(envelope >= ar.alpha * opt - 1e-12);
  }
}

TEST_CASE("run_assign end to end", "[assign]") {
  SECTION("result fields and determinism") {
    SplitRng rng(20240904, 6);
    const Instance inst = [&] {
      Instance i = random_instance(rng, 2, 10, 25);
      i.pred = SymmetricPredicate(2, {2});
      return i;
    }();
    const AssignResult a = run_assign(inst, 77);
    const AssignResult b = run_assign(inst, 77);
    const AssignResult c = run_assign(inst, 78);
    CHECK(a.x == b.x);
    CHECK(a.x != c.x);
    CHECK(a.achieved == value(inst, a.x));
    CHECK(a.certified);
    CHECK(a.method == "max-min-certified");
    CHECK(a.p_star == Approx(2.0 / 3).margin(1e-6));
    CHECK(a.alpha == Approx(4.0 / 9).margin(1e-9));
  }

  SECTION("fully biased satisfiable kAND: expectation is (p*)^k exactly") {
    for (int k = 2; k <= 4; ++k) {
      Instance inst;
      inst.n = 3 * k;
      inst.pred = SymmetricPredicate(k, {k});
      for (int b = 0; b < 3; ++b) {
        Constraint c;
        c.b.assign(k, 0);
        for (int t = 0; t < k; ++t) c.j.push_back(k * b + t + 1);
        c.w = 1 + b;
        inst.cons.push_back(std::move(c));
      }
      const Assignment maj = majority_assignment(inst);
      const auto D = template_distribution(inst, maj);
      CHECK(D[k] == Rat(1));  // point mass: every literal agrees
      const Rat p(2, 3);  // p* for k = 2, 3; the identity holds at any p
      CHECK(expected_perturbed_value_exact(inst, maj, p) == rat_pow(p, k));
    }
  }

  SECTION("Monte Carlo mean tracks the closed-form expectation") {
    SplitRng rng(20240904, 7);
    Instance inst = random_instance(rng, 2, 9, 20);
    inst.pred = SymmetricPredicate(2, {2});
    const Assignment maj = majority_assignment(inst);
    const AlphaResult& ar = cached_threshold_alpha(inst.pred);
    const double expect = expected_perturbed_value(inst, maj, ar.p_star);
    double sum = 0.0;
    const int trials = 600;
    for (int t = 0; t < trials; ++t)
      sum += to_double(run_assign(inst, 1000 + t).achieved);
    const double se = 0.5 / std::sqrt(static_cast<double>(trials));
    CHECK(std::abs(sum / trials - expect) <= 3.0 * se);
  }

  SECTION("3AND mean clears the alpha guarantee against brute force") {
    SplitRng rng(20240904, 8);
    Instance inst = random_instance(rng, 3, 10, 24);
    inst.pred = SymmetricPredicate(3, {3});
    const double opt = to_double(opt_value(inst).value);
    double sum = 0.0;
    const int trials = 400;
    for (int t = 0; t < trials; ++t)
      sum += to_double(run_assign(inst, 5000 + t).achieved);
    CHECK(sum / trials >= (2.0 / 9 - 0.03) * opt);
  }

  SECTION("resistant threshold (OR) rounds to a uniform assignment worth rho") {
    SplitRng rng(20240904, 9);
    Instance inst = random_instance(rng, 2, 8, 18);
    inst.pred = SymmetricPredicate(2, {1, 2});
    const AssignResult r = run_assign(inst, 3);
    CHECK(r.certified);
    CHECK(r.method == "one-wise-resistant");
    CHECK(r.p_star == 0.5);
    const Assignment maj = majority_assignment(inst);
    CHECK(expected_perturbed_value_exact(inst, maj, Rat(1, 2)) == Rat(3, 4));
  }

  SECTION("input validation") {
    Instance inst;
    inst.n = 3;
    inst.pred = SymmetricPredicate(3, {1, 3});  // gap: not a threshold set
    inst.cons = {{{0, 0, 0}, {1, 2, 3}, 1}};
    CHECK_THROWS_AS(run_assign(inst, 0), ArgumentError);

    Instance zero;
    zero.n = 2;
    zero.pred = SymmetricPredicate(2, {2});
    zero.cons = {{{0, 0}, {1, 2}, 0}};
    CHECK_THROWS_AS(run_assign(zero, 0), ArgumentError);
  }
}
