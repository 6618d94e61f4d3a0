#include "blockcalc/conflict_model.hpp"

#include <cmath>
#include <string>

#include "blockcalc/error.hpp"

namespace blockcalc {

AccessPattern::AccessPattern(double read_probability, KeyDistribution read_keys, KeyDistribution write_keys)
    : rp_(read_probability),
      wp_(1.0 - read_probability),
      read_keys_(std::move(read_keys)),
      write_keys_(std::move(write_keys)) {
  if (!(rp_ >= 0.0 && rp_ <= 1.0)) {
    throw ConfigError("read probability must lie in [0, 1], got " + std::to_string(rp_));
  }
}

double key_collision_prob(const KeyDistribution& a, const KeyDistribution& b) {
  // Walk both sorted key lists once.
  const auto ka = a.keys();
  const auto kb = b.keys();
  const auto pa = a.probs();
  const auto pb = b.probs();
  double sum = 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < ka.size() && j < kb.size()) {
    if (ka[i] < kb[j]) {
      ++i;
    } else if (kb[j] < ka[i]) {
      ++j;
    } else {
      sum += pa[i] * pb[j];
      ++i;
      ++j;
    }
  }
  return sum;
}

FailureProbs pairwise_failure_probs(const AccessPattern& pattern) {
  const double rp = pattern.rp();
  const double wp = pattern.wp();
  const double rw_overlap = key_collision_prob(pattern.read_keys(), pattern.write_keys());

  FailureProbs fp;
  fp.p_rw = rp * wp * rw_overlap;
  fp.p_wr = wp * rp * rw_overlap;
  fp.p_ww = wp * wp * key_collision_prob(pattern.write_keys(), pattern.write_keys());
  fp.p_b_fail = fp.p_rw + fp.p_wr + fp.p_ww;
  return fp;
}

double ww_key_conflict_prob(const AccessPattern& pattern) {
  return key_collision_prob(pattern.write_keys(), pattern.write_keys());
}

double kth_txn_success_prob(const FailureProbs& fp, std::size_t k) {
  if (k < 1) throw ConfigError("slot index k must be >= 1");
  return std::pow(1.0 - fp.p_b_fail, static_cast<double>(k - 1));
}

double expected_block_successes(const FailureProbs& fp, std::size_t bs) {
  if (bs < 1) throw ConfigError("block size must be >= 1");
  const double p = fp.p_b_fail;
  if (p <= 0.0) return static_cast<double>(bs);
  if (p >= 1.0) return 1.0;
  // (1 - (1-p)^bs) / p without cancellation for tiny p.
  return -std::expm1(static_cast<double>(bs) * std::log1p(-p)) / p;
}

double model_success_rate(const AccessPattern& pattern, std::size_t bs) {
  return expected_block_successes(pairwise_failure_probs(pattern), bs) / static_cast<double>(bs);
}

}  // namespace blockcalc
