#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "blockcalc/rng.hpp"

namespace blockcalc {

using Key = std::int64_t;

// Ranged Zipfian distribution over keys 1..range: P(n) proportional to alpha^-n,
// or alpha^-(range+1-n) when reversed.
struct ZipfSpec {
  std::size_t range = 100;
  double alpha = 1.03;
  bool reversed = false;

  // Throws ConfigError unless range >= 1 and alpha > 1.
  void validate() const;
};

// Probability mass over keys 1..size(). Entries lie in [0, 1] and sum to 1
// within 1e-12; the constructor rejects anything else.
class ProbabilityVector {
 public:
  explicit ProbabilityVector(std::vector<double> probs);

  static ProbabilityVector uniform(std::size_t n);

  std::size_t size() const noexcept { return probs_.size(); }
  // 1-based key lookup.
  double at(Key key) const { return probs_.at(static_cast<std::size_t>(key - 1)); }
  std::span<const double> values() const noexcept { return probs_; }

  friend bool operator==(const ProbabilityVector&, const ProbabilityVector&) = default;

 private:
  std::vector<double> probs_;
};

ProbabilityVector zipf_pmf(const ZipfSpec& spec);

// Inverse-CDF sampler over a cumulative table built once from a pmf.
// Immutable after construction; share freely between threads.
class KeySampler {
 public:
  explicit KeySampler(const ProbabilityVector& pmf);

  // Maps u in [0, 1) to a 1-based key index.
  std::size_t index_for(double u) const;
  std::size_t size() const noexcept { return cdf_.size(); }

 private:
  std::vector<double> cdf_;
};

// Draws one key in 1..pmf.size() with probability pmf[key]; consumes one uniform.
Key sample_key(const KeySampler& sampler, RandomStream& rng);

// Composite trapezoidal rule over unit-spaced samples.
double trapezoid(std::span<const double> ys);

// Trapezoidal integral over x = 1..range of min(p[x], q[x]).
double overlap_area(const ProbabilityVector& p, const ProbabilityVector& q);

// Rounds to `decimals` places, halves upward.
double round_half_up(double value, int decimals);

// A distribution over an explicit key set. Keys are stored sorted and are
// distinct; keys outside the set carry probability 0.
class KeyDistribution {
 public:
  KeyDistribution(std::vector<Key> keys, ProbabilityVector probs);

  // Keys 1..probs.size().
  static KeyDistribution dense(ProbabilityVector probs);
  static KeyDistribution zipf(const ZipfSpec& spec) { return dense(zipf_pmf(spec)); }

  double prob(Key key) const noexcept;
  std::span<const Key> keys() const noexcept { return keys_; }
  std::span<const double> probs() const noexcept { return probs_; }
  std::size_t size() const noexcept { return keys_.size(); }

  Key sample(RandomStream& rng) const;
  Key key_for(double u) const { return keys_[sampler_.index_for(u) - 1]; }

  friend bool operator==(const KeyDistribution& a, const KeyDistribution& b) {
    return a.keys_ == b.keys_ && a.probs_ == b.probs_;
  }

 private:
  std::vector<Key> keys_;
  std::vector<double> probs_;
  KeySampler sampler_;
};

}  // namespace blockcalc
