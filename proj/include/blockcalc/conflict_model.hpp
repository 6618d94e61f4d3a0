#pragma once

#include <cstddef>

#include "blockcalc/distributions.hpp"

namespace blockcalc {

// Read/write mix and key distributions of one client population. The write
// probability is always 1 - rp.
class AccessPattern {
 public:
  AccessPattern(double read_probability, KeyDistribution read_keys, KeyDistribution write_keys);

  double rp() const noexcept { return rp_; }
  double wp() const noexcept { return wp_; }
  const KeyDistribution& read_keys() const noexcept { return read_keys_; }
  const KeyDistribution& write_keys() const noexcept { return write_keys_; }

 private:
  double rp_;
  double wp_;
  KeyDistribution read_keys_;
  KeyDistribution write_keys_;
};

// Probability that a later transaction b fails against one earlier
// transaction a of the same block, split by conflict kind.
struct FailureProbs {
  double p_rw = 0.0;  // a reads, b writes the same key
  double p_wr = 0.0;  // a writes, b reads the same key
  double p_ww = 0.0;  // both write the same key
  double p_b_fail = 0.0;
};

// Probability that independent draws from `a` and `b` pick the same key.
double key_collision_prob(const KeyDistribution& a, const KeyDistribution& b);

FailureProbs pairwise_failure_probs(const AccessPattern& pattern);

// Chance that two writes collide on a key, ignoring the read/write mix:
// sum of P_WK(i)^2. This is p_ww / wp^2.
double ww_key_conflict_prob(const AccessPattern& pattern);

// Success probability of the k-th transaction in a block (k >= 1):
// (1 - p_b_fail)^(k-1).
double kth_txn_success_prob(const FailureProbs& fp, std::size_t k);

// Expected successful transactions in a block of `bs` transactions, summed
// in closed form.
double expected_block_successes(const FailureProbs& fp, std::size_t bs);

// expected_block_successes / bs.
double model_success_rate(const AccessPattern& pattern, std::size_t bs);

}  // namespace blockcalc
