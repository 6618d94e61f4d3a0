#include "blockcalc/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <string>
#include <unordered_map>

#include "blockcalc/error.hpp"

namespace blockcalc {

const char* to_string(OpType op) { return op == OpType::Read ? "R" : "W"; }

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Success: return "Success";
    case Verdict::RWFail: return "RWFail";
    case Verdict::WRFail: return "WRFail";
    case Verdict::WWFail: return "WWFail";
  }
  return "?";
}

const char* to_string(ClientKind kind) {
  switch (kind) {
    case ClientKind::AllWrite: return "AllWrite";
    case ClientKind::ReadThenWriteRetry: return "ReadThenWriteRetry";
    case ClientKind::IndependentReadWrite: return "IndependentReadWrite";
  }
  return "?";
}

std::size_t BlockTrace::successes() const {
  return static_cast<std::size_t>(std::count(verdicts.begin(), verdicts.end(), Verdict::Success));
}

BlockTrace validate_block(std::span<const Transaction> txns) {
  // First slot that read / wrote each key so far.
  struct FirstAccess {
    std::size_t read = SIZE_MAX;
    std::size_t write = SIZE_MAX;
  };
  std::unordered_map<Key, FirstAccess> seen;
  seen.reserve(txns.size() * 2);

  BlockTrace trace;
  trace.txns.assign(txns.begin(), txns.end());
  trace.verdicts.reserve(txns.size());

  for (std::size_t j = 0; j < txns.size(); ++j) {
    auto& first = seen[txns[j].key];
    Verdict v = Verdict::Success;
    if (txns[j].op == OpType::Read) {
      if (first.write != SIZE_MAX) v = Verdict::WRFail;
      first.read = std::min(first.read, j);
    } else {
      if (first.read < first.write) {
        v = Verdict::RWFail;
      } else if (first.write != SIZE_MAX) {
        v = Verdict::WWFail;
      }
      first.write = std::min(first.write, j);
    }
    trace.verdicts.push_back(v);
  }
  return trace;
}

void ClientBehavior::validate() const {
  if (kind == ClientKind::AllWrite && pattern.rp() != 0.0) {
    throw ConfigError("AllWrite clients require rp == 0");
  }
  if (kind == ClientKind::ReadThenWriteRetry && !(pattern.read_keys() == pattern.write_keys())) {
    throw ConfigError("ReadThenWriteRetry clients require identical read and write key distributions");
  }
}

void SimConfig::validate() const {
  behavior.validate();
  if (bs < 1) throw ConfigError("block size must be >= 1");
  if (num_clients < bs) {
    throw ConfigError("num_clients (" + std::to_string(num_clients) + ") must be >= block size (" +
                      std::to_string(bs) + ")");
  }
  if (total_operations < bs) throw ConfigError("total_operations must be >= block size");
}

namespace {

struct ClientState {
  Transaction pending;
};

class ClientPool {
 public:
  ClientPool(const SimConfig& config, RandomStream& rng)
      : behavior_(config.behavior), rng_(rng), clients_(config.num_clients) {
    for (std::size_t c = 0; c < clients_.size(); ++c) {
      clients_[c].pending.client_id = static_cast<std::uint32_t>(c);
      fresh(clients_[c].pending);
    }
  }

  const Transaction& pending(std::size_t c) const { return clients_[c].pending; }

  void deliver(std::size_t c, Verdict v) {
    Transaction& t = clients_[c].pending;
    switch (behavior_.kind) {
      case ClientKind::AllWrite:
      case ClientKind::IndependentReadWrite:
        fresh(t);
        break;
      case ClientKind::ReadThenWriteRetry:
        if (v != Verdict::Success) {
          ++t.attempt;
        } else if (t.op == OpType::Read) {
          t.op = OpType::Write;
          t.attempt = 1;
        } else {
          fresh(t);
        }
        break;
    }
  }

 private:
  // A new submission. IndependentReadWrite always draws two uniforms so that
  // streams with the same seed stay aligned across parameter values.
  void fresh(Transaction& t) {
    const auto& p = behavior_.pattern;
    t.attempt = 1;
    switch (behavior_.kind) {
      case ClientKind::AllWrite:
        t.op = OpType::Write;
        t.key = p.write_keys().sample(rng_);
        break;
      case ClientKind::ReadThenWriteRetry:
        t.op = OpType::Read;
        t.key = p.read_keys().sample(rng_);
        break;
      case ClientKind::IndependentReadWrite: {
        const double op_u = rng_.uniform();
        const double key_u = rng_.uniform();
        t.op = op_u < p.rp() ? OpType::Read : OpType::Write;
        t.key = t.op == OpType::Read ? p.read_keys().key_for(key_u) : p.write_keys().key_for(key_u);
        break;
      }
    }
  }

  const ClientBehavior& behavior_;
  RandomStream& rng_;
  std::vector<ClientState> clients_;
};

}  // namespace

TrialSummary run_trial(const SimConfig& config, RandomStream& rng, std::vector<BlockTrace>* trace) {
  config.validate();
  ClientPool pool(config, rng);

  std::vector<std::size_t> order(config.num_clients);
  std::vector<Transaction> block(config.bs);
  TrialSummary summary;

  while (summary.validated < config.total_operations) {
    // Partial Fisher-Yates: the first bs entries become this block's clients.
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t s = 0; s < config.bs; ++s) {
      const std::size_t pick = s + rng.below(order.size() - s);
      std::swap(order[s], order[pick]);
      block[s] = pool.pending(order[s]);
    }

    BlockTrace result = validate_block(block);
    for (std::size_t s = 0; s < config.bs; ++s) pool.deliver(order[s], result.verdicts[s]);

    summary.successes += result.successes();
    summary.validated += config.bs;
    if (trace != nullptr) trace->push_back(std::move(result));
  }
  summary.rate = static_cast<double>(summary.successes) / static_cast<double>(summary.validated);
  return summary;
}

double nearest_rank(std::span<const double> sorted, double pct) {
  if (sorted.empty()) throw ConfigError("percentile of an empty sample");
  const double n = static_cast<double>(sorted.size());
  auto rank = static_cast<std::size_t>(std::ceil(pct / 100.0 * n - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

PercentileSummary summarize_rates(std::vector<double> rates) {
  if (rates.empty()) throw ConfigError("experiment needs at least one trial");
  std::sort(rates.begin(), rates.end());
  PercentileSummary s;
  s.p1 = nearest_rank(rates, 1.0);
  s.p50 = nearest_rank(rates, 50.0);
  s.p99 = nearest_rank(rates, 99.0);
  s.mean = std::accumulate(rates.begin(), rates.end(), 0.0) / static_cast<double>(rates.size());
  s.trials = rates.size();
  return s;
}

std::vector<double> trial_rates_serial(const SimConfig& config, std::size_t trials) {
  config.validate();
  std::vector<double> rates(trials);
  for (std::size_t i = 0; i < trials; ++i) {
    RandomStream rng(trial_seed(config.seed, i));
    rates[i] = run_trial(config, rng).rate;
  }
  return rates;
}

std::vector<double> trial_rates(const SimConfig& config, std::size_t trials) {
  config.validate();
  std::vector<double> rates(trials);
  const auto n = static_cast<std::int64_t>(trials);
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < n; ++i) {
    RandomStream rng(trial_seed(config.seed, static_cast<std::uint64_t>(i)));
    rates[static_cast<std::size_t>(i)] = run_trial(config, rng).rate;
  }
  return rates;
}

PercentileSummary run_experiment(const SimConfig& config, std::size_t trials) {
  return summarize_rates(trial_rates(config, trials));
}

PercentileSummary run_experiment_serial(const SimConfig& config, std::size_t trials) {
  return summarize_rates(trial_rates_serial(config, trials));
}

void write_trace_csv(std::ostream& out, std::span<const BlockTrace> blocks) {
  out << "block_index,slot,client,op,key,attempt,verdict\n";
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const auto& blk = blocks[b];
    for (std::size_t s = 0; s < blk.txns.size(); ++s) {
      const auto& t = blk.txns[s];
      out << b << ',' << s + 1 << ',' << t.client_id << ',' << to_string(t.op) << ',' << t.key << ','
          << t.attempt << ',' << to_string(blk.verdicts[s]) << '\n';
    }
  }
}

}  // namespace blockcalc
