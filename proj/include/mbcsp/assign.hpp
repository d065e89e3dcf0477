#pragma once

// Majority + perturbation rounding.
//
// The majority assignment sets each variable to the sign of its net bias; the
// perturbation keeps each coordinate independently with probability p* and
// flips it otherwise. With p* taken from the certified saddle point of the
// predicate, the expected value of the perturbed majority assignment is
//
//   lambda(D, p*) >= alpha * gamma_{S,k}(bias_total) >= alpha * opt,
//
// where D is the symmetrized template of the majority assignment. The first
// inequality is the saddle certificate, the second the envelope upper bound.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mbcsp/analysis.hpp"
#include "mbcsp/core.hpp"
#include "mbcsp/rng.hpp"

namespace mbcsp {

// x_i = 1 iff bias_var(i) >= 0; ties (including untouched variables) go to 1.
inline Assignment majority_assignment(const Instance& inst) {
  inst.validate();
  std::vector<long long> bias(inst.n, 0);
  for (const Constraint& c : inst.cons)
    for (size_t t = 0; t < c.j.size(); ++t)
      bias[c.j[t] - 1] += c.b[t] ? -c.w : c.w;
  Assignment x(inst.n);
  for (int i = 0; i < inst.n; ++i) x[i] = bias[i] >= 0 ? 1 : 0;
  return x;
}

struct PerturbationPlan {
  double p_star = 1.0;  // probability of keeping each coordinate
  uint64_t seed = 0;
};

inline Assignment perturb(const Assignment& x, const PerturbationPlan& plan) {
  if (!(plan.p_star >= 0.0 && plan.p_star <= 1.0))
    throw ArgumentError("perturb: p_star must lie in [0,1]");
  SplitRng rng(plan.seed, /*stream=*/0x70657274ULL);
  Assignment y(x.size());
  for (size_t i = 0; i < x.size(); ++i)
    y[i] = rng.next_bernoulli(plan.p_star) ? x[i] : static_cast<uint8_t>(x[i] ^ 1);
  return y;
}

// Expectation of value(perturb(x, p)) over the perturbation randomness,
// computed in closed form via lambda on the symmetrized template.
inline double expected_perturbed_value(const Instance& inst, const Assignment& x,
                                       double p) {
  return lambda(inst.pred, symmetrize(inst, x), p);
}

inline Rat expected_perturbed_value_exact(const Instance& inst, const Assignment& x,
                                          const Rat& p) {
  return lambda_exact(inst.pred, template_distribution(inst, x), p);
}

struct AssignResult {
  Assignment x;
  Rat achieved;            // value(inst, x), exact
  double p_star = 0.0;
  double alpha = 0.0;
  bool certified = false;  // false: p* came from a numeric-only analysis
  std::string method;
};

// End-to-end rounding for threshold predicates. The returned assignment is
// one perturbation draw; `achieved` is its exact value. When the alpha
// analysis is not certified the result still uses its p*, with `certified`
// cleared so callers can surface a warning.
inline AssignResult run_assign(const Instance& inst, uint64_t seed) {
  inst.validate();
  if (inst.total_weight() == 0)
    throw ArgumentError("run_assign: zero total weight");
  const AlphaResult& ar = cached_threshold_alpha(inst.pred);
  AssignResult res;
  res.p_star = ar.p_star;
  res.alpha = ar.alpha;
  res.certified = ar.certified;
  res.method = ar.method;
  res.x = perturb(majority_assignment(inst), PerturbationPlan{ar.p_star, seed});
  res.achieved = value(inst, res.x);
  return res;
}

}  // namespace mbcsp
