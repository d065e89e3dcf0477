#pragma once

// Space-efficient streaming estimation: a mergeable L1-norm sketch with
// Cauchy projections, the bias-vector stream built on it, and the
// threshold-predicate value estimator.
//
// The sketch keeps r = ceil(8 ln(1/delta) / eps^2) accumulators. Projection
// coefficients tan(pi(u - 1/2)) are derived deterministically from
// (seed, row, index) on demand and never stored, so the state is the
// accumulator vector alone and its size is independent of the stream length.
//
// Accumulators are fixed-point 128-bit integers: each coefficient is
// quantized once to a 2^-20 grid (clamped to +/-2^50) and updates add exact
// integer products. Integer addition is associative and commutative, so
// merging two sketches is bit-identical to processing the concatenated
// stream, with no floating-point drift.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "mbcsp/analysis.hpp"
#include "mbcsp/core.hpp"
#include "mbcsp/rng.hpp"

namespace mbcsp {

class L1Sketch {
 public:
  static constexpr int64_t kScale = INT64_C(1) << 20;
  static constexpr int64_t kClamp = INT64_C(1) << 50;
  static constexpr long long kMaxUpdate = INT64_C(1) << 40;

  L1Sketch(int n, double eps, double delta, uint64_t seed)
      : n_(n), eps_(eps), delta_(delta), seed_(seed) {
    if (n < 1) throw ArgumentError("sketch dimension must be positive");
    if (!(eps > 0.0 && eps < 1.0)) throw ArgumentError("sketch epsilon must lie in (0,1)");
    if (!(delta > 0.0 && delta < 1.0)) throw ArgumentError("sketch delta must lie in (0,1)");
    r_ = static_cast<int>(std::ceil(8.0 * std::log(1.0 / delta) / (eps * eps)));
    acc_.assign(static_cast<size_t>(r_), 0);
  }

  int n() const { return n_; }
  int r() const { return r_; }
  uint64_t seed() const { return seed_; }
  double eps() const { return eps_; }
  double delta() const { return delta_; }
  const std::vector<__int128>& accumulators() const { return acc_; }

  // Quantized Cauchy coefficient for (row t, coordinate i), regenerated from
  // the keyed generator on demand.
  int64_t coefficient(int t, int i) const {
    const double u =
        u64_to_unit(prf(seed_, static_cast<uint64_t>(t), static_cast<uint64_t>(i)));
    const double c = std::tan(M_PI * (u - 0.5)) * static_cast<double>(kScale);
    if (c >= static_cast<double>(kClamp)) return kClamp;
    if (c <= -static_cast<double>(kClamp)) return -kClamp;
    return static_cast<int64_t>(std::nearbyint(c));
  }

  void update(int i, long long v) {
    if (i < 1 || i > n_) throw ArgumentError("sketch update index out of range");
    if (v > kMaxUpdate || v < -kMaxUpdate)
      throw ResourceError("sketch update magnitude exceeds 2^40");
    if (v == 0) return;
    for (int t = 0; t < r_; ++t)
      acc_[static_cast<size_t>(t)] += static_cast<__int128>(coefficient(t, i)) * v;
  }

  void merge(const L1Sketch& other) {
    if (n_ != other.n_ || r_ != other.r_ || seed_ != other.seed_)
      throw ArgumentError("sketch merge requires identical dimension, width, and seed");
    for (size_t t = 0; t < acc_.size(); ++t) acc_[t] += other.acc_[t];
  }

  // Median of the accumulator magnitudes. A Cauchy combination of the stream
  // has scale ||x||_1, and the median of |Cauchy| equals its scale, so no
  // correction constant is needed.
  double estimate() const {
    std::vector<double> mags(acc_.size());
    for (size_t t = 0; t < acc_.size(); ++t) {
      __int128 a = acc_[t];
      if (a < 0) a = -a;
      mags[t] = static_cast<double>(a) / static_cast<double>(kScale);
    }
    const size_t mid = mags.size() / 2;
    std::nth_element(mags.begin(), mags.begin() + mid, mags.end());
    double med = mags[mid];
    if (mags.size() % 2 == 0) {
      const double below = *std::max_element(mags.begin(), mags.begin() + mid);
      med = 0.5 * (med + below);
    }
    return med;
  }

 private:
  int n_ = 0;
  int r_ = 0;
  double eps_ = 0.0;
  double delta_ = 0.0;
  uint64_t seed_ = 0;
  std::vector<__int128> acc_;
};

// Streams constraints into L1 updates of the signed bias vector: position t of
// a constraint contributes (-1)^{b_t} * w to coordinate j_t. The normalized
// estimate targets bias_total = ||bias||_1 / (k W).
class BiasEstimator {
 public:
  BiasEstimator(int n, int k, double eps, double delta, uint64_t seed)
      : sketch_(n, eps, delta, seed), k_(k) {
    if (k < 1) throw ArgumentError("bias estimator arity must be positive");
  }

  void feed(const Constraint& c) {
    if (static_cast<int>(c.b.size()) != k_ || static_cast<int>(c.j.size()) != k_)
      throw ArgumentError("bias estimator: constraint arity mismatch");
    if (c.w < 0) throw ArgumentError("bias estimator: negative weight");
    for (int t = 0; t < k_; ++t) sketch_.update(c.j[t], c.b[t] ? -c.w : c.w);
    if (c.w > std::numeric_limits<long long>::max() - total_weight_)
      throw ResourceError("bias estimator: total weight overflows 64 bits");
    total_weight_ += c.w;
  }

  void merge(const BiasEstimator& other) {
    if (k_ != other.k_) throw ArgumentError("bias estimator merge: arity mismatch");
    sketch_.merge(other.sketch_);
    if (other.total_weight_ > std::numeric_limits<long long>::max() - total_weight_)
      throw ResourceError("bias estimator: total weight overflows 64 bits");
    total_weight_ += other.total_weight_;
  }

  double estimate_bias() const {
    if (total_weight_ == 0) throw ArgumentError("bias undefined on zero total weight");
    return sketch_.estimate() / (static_cast<double>(k_) * static_cast<double>(total_weight_));
  }

  int k() const { return k_; }
  long long total_weight() const { return total_weight_; }
  const L1Sketch& sketch() const { return sketch_; }

 private:
  L1Sketch sketch_;
  int k_ = 0;
  long long total_weight_ = 0;
};

// One-pass value estimator for Max-CSP with a threshold predicate: sketches
// the bias, shrinks it by the sketch accuracy, and outputs
// alpha * gamma_{S,k}(bias / (1 + delta)). When the sketch lands inside its
// accuracy band the shrunk bias is at most the true bias, so the output
// never exceeds the optimum; the shrink costs at most eps of the
// approximation factor.
class ValueEstimator {
 public:
  ValueEstimator(const SymmetricPredicate& f, int n, double eps, uint64_t seed,
                 double sketch_delta = 0.05)
      : f_(f), alpha_(cached_threshold_alpha(validated(f)).alpha), eps_(eps) {
    if (!(eps > 0.0 && eps < alpha_))
      throw ArgumentError("estimate_value: need 0 < eps < alpha");
    delta_ = eps / (2.0 * alpha_ - eps);
    be_.emplace(n, f.k, delta_, sketch_delta, seed);
  }

  void feed(const Constraint& c) { be_->feed(c); }
  void merge(const ValueEstimator& other) { be_->merge(*other.be_); }

  double bias_estimate() const {
    return std::clamp(be_->estimate_bias(), 0.0, 1.0);
  }
  double value() const { return alpha_ * gamma_mu(f_, bias_estimate() / (1.0 + delta_)); }

  double alpha() const { return alpha_; }
  double eps() const { return eps_; }
  double delta() const { return delta_; }
  const BiasEstimator& bias() const { return *be_; }

 private:
  static const SymmetricPredicate& validated(const SymmetricPredicate& f) {
    if (!is_threshold(f))
      throw ArgumentError("estimate_value requires a threshold predicate");
    return f;
  }

  SymmetricPredicate f_;
  double alpha_ = 0.0;
  double eps_ = 0.0;
  double delta_ = 0.0;
  std::optional<BiasEstimator> be_;
};

inline double estimate_value(const SymmetricPredicate& f, int n,
                             const std::vector<Constraint>& cons, double eps,
                             uint64_t seed, double sketch_delta = 0.05) {
  ValueEstimator est(f, n, eps, seed, sketch_delta);
  for (const Constraint& c : cons) est.feed(c);
  return est.value();
}

inline double estimate_value(const Instance& inst, double eps, uint64_t seed,
                             double sketch_delta = 0.05) {
  return estimate_value(inst.pred, inst.n, inst.cons, eps, seed, sketch_delta);
}

}  // namespace mbcsp
