#include "blockcalc/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "blockcalc/error.hpp"

namespace blockcalc {
namespace {

constexpr double kNormTolerance = 1e-12;

// Neumaier compensated summation.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace

void ZipfSpec::validate() const {
  if (range < 1) throw ConfigError("zipf: range must be >= 1");
  if (!(alpha > 1.0) || !std::isfinite(alpha)) {
    throw ConfigError("zipf: alpha must be a finite value > 1, got " + std::to_string(alpha));
  }
}

ProbabilityVector::ProbabilityVector(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) throw ConfigError("probability vector is empty");
  CompensatedSum total;
  for (double p : probs_) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("probability outside [0, 1]");
    total.add(p);
  }
  if (std::fabs(total.value() - 1.0) > kNormTolerance) {
    throw ConfigError("probabilities sum to " + std::to_string(total.value()) + ", not 1");
  }
}

ProbabilityVector ProbabilityVector::uniform(std::size_t n) {
  if (n == 0) throw ConfigError("uniform distribution needs at least one key");
  return ProbabilityVector(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

ProbabilityVector zipf_pmf(const ZipfSpec& spec) {
  spec.validate();
  std::vector<double> weights(spec.range);
  for (std::size_t n = 1; n <= spec.range; ++n) {
    weights[n - 1] = std::pow(spec.alpha, -static_cast<double>(n));
  }
  // Smallest terms first.
  CompensatedSum norm;
  for (auto it = weights.rbegin(); it != weights.rend(); ++it) norm.add(*it);
  const double z = norm.value();
  for (double& w : weights) w /= z;
  if (spec.reversed) std::reverse(weights.begin(), weights.end());
  return ProbabilityVector(std::move(weights));
}

KeySampler::KeySampler(const ProbabilityVector& pmf) : cdf_(pmf.size()) {
  const auto probs = pmf.values();
  CompensatedSum running;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    running.add(probs[i]);
    cdf_[i] = running.value();
  }
  // Pin the table to exactly 1 from the last key with mass onward, so rounding
  // never hands mass to a trailing zero-probability key.
  std::size_t last = probs.size();
  while (last > 0 && probs[last - 1] == 0.0) --last;
  for (std::size_t i = last == 0 ? 0 : last - 1; i < cdf_.size(); ++i) cdf_[i] = 1.0;
}

std::size_t KeySampler::index_for(double u) const {
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  const auto pos = static_cast<std::size_t>(it - cdf_.begin());
  return std::min(pos, cdf_.size() - 1) + 1;
}

Key sample_key(const KeySampler& sampler, RandomStream& rng) {
  return static_cast<Key>(sampler.index_for(rng.uniform()));
}

double trapezoid(std::span<const double> ys) {
  if (ys.size() < 2) return 0.0;
  double area = 0.0;
  for (std::size_t i = 0; i + 1 < ys.size(); ++i) area += 0.5 * (ys[i] + ys[i + 1]);
  return area;
}

double overlap_area(const ProbabilityVector& p, const ProbabilityVector& q) {
  if (p.size() != q.size()) {
    throw ConfigError("overlap_area: length mismatch (" + std::to_string(p.size()) + " vs " +
                      std::to_string(q.size()) + ")");
  }
  std::vector<double> lower(p.size());
  std::transform(p.values().begin(), p.values().end(), q.values().begin(), lower.begin(),
                 [](double a, double b) { return std::min(a, b); });
  return trapezoid(lower);
}

double round_half_up(double value, int decimals) {
  const double scale = std::pow(10.0, decimals);
  // The nudge absorbs representation error such as 0.125 stored as 0.12499999.
  return std::floor(value * scale + 0.5 + 1e-9) / scale;
}

KeyDistribution::KeyDistribution(std::vector<Key> keys, ProbabilityVector probs)
    : keys_(std::move(keys)), probs_(probs.values().begin(), probs.values().end()), sampler_(probs) {
  if (keys_.size() != probs_.size()) throw ConfigError("key list and probability list differ in length");
  std::vector<std::size_t> order(keys_.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return keys_[a] < keys_[b]; });
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (keys_[order[i]] == keys_[order[i - 1]]) throw ConfigError("duplicate key in key list");
  }
  if (!std::is_sorted(keys_.begin(), keys_.end())) {
    std::vector<Key> sorted_keys(keys_.size());
    std::vector<double> sorted_probs(keys_.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
      sorted_keys[i] = keys_[order[i]];
      sorted_probs[i] = probs_[order[i]];
    }
    keys_ = std::move(sorted_keys);
    probs_ = std::move(sorted_probs);
    sampler_ = KeySampler(ProbabilityVector(probs_));
  }
}

KeyDistribution KeyDistribution::dense(ProbabilityVector probs) {
  std::vector<Key> keys(probs.size());
  std::iota(keys.begin(), keys.end(), Key{1});
  return KeyDistribution(std::move(keys), std::move(probs));
}

double KeyDistribution::prob(Key key) const noexcept {
  const auto it = std::lower_bound(keys_.begin(), keys_.end(), key);
  if (it == keys_.end() || *it != key) return 0.0;
  return probs_[static_cast<std::size_t>(it - keys_.begin())];
}

Key KeyDistribution::sample(RandomStream& rng) const { return key_for(rng.uniform()); }

}  // namespace blockcalc
