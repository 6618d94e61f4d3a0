#pragma once

// Test-only reference implementations. None of these call into the code paths
// they are used to check.

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "blockcalc/conflict_model.hpp"
#include "blockcalc/simulator.hpp"

namespace oracle {

using blockcalc::Key;
using blockcalc::OpType;
using blockcalc::Transaction;
using blockcalc::Verdict;

// O(bs^2) pairwise scan: the first earlier slot that conflicts decides.
inline std::vector<Verdict> brute_force_verdicts(const std::vector<Transaction>& txns) {
  std::vector<Verdict> out(txns.size(), Verdict::Success);
  for (std::size_t j = 0; j < txns.size(); ++j) {
    for (std::size_t i = 0; i < j; ++i) {
      if (txns[i].key != txns[j].key) continue;
      const bool ri = txns[i].op == OpType::Read;
      const bool rj = txns[j].op == OpType::Read;
      if (ri && rj) continue;
      out[j] = ri ? Verdict::RWFail : (rj ? Verdict::WRFail : Verdict::WWFail);
      break;
    }
  }
  return out;
}

struct TypedKey {
  OpType op;
  Key key;
  double prob;
};

// Read of k with probability rp * P_RK(k), write of k with wp * P_WK(k).
inline std::vector<TypedKey> typed_keys(const blockcalc::AccessPattern& p) {
  std::vector<TypedKey> out;
  const auto rk = p.read_keys().keys();
  const auto rprob = p.read_keys().probs();
  for (std::size_t i = 0; i < rk.size(); ++i) out.push_back({OpType::Read, rk[i], p.rp() * rprob[i]});
  const auto wk = p.write_keys().keys();
  const auto wprob = p.write_keys().probs();
  for (std::size_t i = 0; i < wk.size(); ++i) out.push_back({OpType::Write, wk[i], p.wp() * wprob[i]});
  return out;
}

// Full enumeration of every typed-key sequence of length bs, weighted by its
// probability, scored with brute_force_verdicts.
inline double enumerate_expected_successes(const blockcalc::AccessPattern& p, std::size_t bs) {
  const auto types = typed_keys(p);
  std::vector<std::size_t> idx(bs, 0);
  std::vector<Transaction> seq(bs);
  double total = 0.0;
  while (true) {
    double w = 1.0;
    for (std::size_t s = 0; s < bs; ++s) {
      seq[s].op = types[idx[s]].op;
      seq[s].key = types[idx[s]].key;
      w *= types[idx[s]].prob;
    }
    if (w > 0.0) {
      const auto v = brute_force_verdicts(seq);
      std::size_t ok = 0;
      for (auto x : v) ok += x == Verdict::Success;
      total += w * static_cast<double>(ok);
    }
    std::size_t s = 0;
    while (s < bs && ++idx[s] == types.size()) idx[s++] = 0;
    if (s == bs) break;
  }
  return total;
}

// Exact expectation under i.i.d. slots: slot k holding typed key t succeeds with
// probability (1 - q(t))^(k-1), q(t) being the chance one predecessor conflicts.
inline double exact_expected_successes(const blockcalc::AccessPattern& p, std::size_t bs) {
  double total = 0.0;
  for (const auto& t : typed_keys(p)) {
    const double q = t.op == OpType::Read ? p.wp() * p.write_keys().prob(t.key)
                                          : p.rp() * p.read_keys().prob(t.key) + p.wp() * p.write_keys().prob(t.key);
    for (std::size_t k = 1; k <= bs; ++k) total += t.prob * std::pow(1.0 - q, static_cast<double>(k - 1));
  }
  return total;
}

// Literal sum of (1 - p)^(k-1), k = 1..bs.
inline double literal_geometric_sum(double p, std::size_t bs) {
  double total = 0.0;
  for (std::size_t k = 1; k <= bs; ++k) total += std::pow(1.0 - p, static_cast<double>(k - 1));
  return total;
}

}  // namespace oracle
