#include "blockcalc/latency_model.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <string>

#include "blockcalc/error.hpp"
#include "blockcalc/text_io.hpp"

namespace blockcalc {

void EnvironmentParams::validate() const {
  if (!(arrival_rate > 0.0)) throw ConfigError("arrival rate must be > 0");
  if (!(txn_size_bits >= 1.0)) throw ConfigError("transaction size must be >= 1 bit");
  if (!(net_bandwidth >= 1.0)) throw ConfigError("network bandwidth must be >= 1 bit/s");
  if (!(disk_bandwidth >= 1.0)) throw ConfigError("disk bandwidth must be >= 1 bit/s");
  if (!(cpu_speed >= 1.0)) throw ConfigError("cpu speed must be >= 1 cycle/s");
}

void BlockDesign::validate() const {
  if (batch_size < 1) throw ConfigError("batch size must be >= 1");
  if (!(batch_timeout > 0.0)) throw ConfigError("batch timeout must be > 0");
}

void CostCoefficients::validate() const {
  if (!(metadata_bits >= 0.0 && fixed_cycles >= 0.0 && cycles_per_bit >= 0.0)) {
    throw ConfigError("cost coefficients must be >= 0");
  }
}

FittedLatencyModel to_fitted(const EnvironmentParams& env, const CostCoefficients& coeffs) {
  FittedLatencyModel m;
  m.c0 = env.txn_size_bits / env.disk_bandwidth + env.txn_size_bits / env.net_bandwidth +
         coeffs.cycles_per_bit * env.txn_size_bits / env.cpu_speed;
  m.c1 = coeffs.metadata_bits / env.disk_bandwidth + coeffs.metadata_bits / env.net_bandwidth +
         coeffs.fixed_cycles / env.cpu_speed;
  return m;
}

double io_time(const EnvironmentParams& env, const BlockDesign& design, const CostCoefficients& coeffs) {
  const double bits = coeffs.metadata_bits + static_cast<double>(design.batch_size) * env.txn_size_bits;
  return bits / env.disk_bandwidth + bits / env.net_bandwidth;
}

double cpu_time(const EnvironmentParams& env, const BlockDesign& design, const CostCoefficients& coeffs) {
  return (coeffs.fixed_cycles +
          coeffs.cycles_per_bit * static_cast<double>(design.batch_size) * env.txn_size_bits) /
         env.cpu_speed;
}

double wait_time(const EnvironmentParams& env, const BlockDesign& design) {
  const double fill = static_cast<double>(design.batch_size) / env.arrival_rate;
  return std::min(design.batch_timeout, fill) / 2.0;
}

double expected_latency(const EnvironmentParams& env, const BlockDesign& design, const FittedLatencyModel& fitted) {
  return wait_time(env, design) + fitted.c0 * static_cast<double>(design.batch_size) + fitted.c1;
}

double expected_latency(const EnvironmentParams& env, const BlockDesign& design, const CostCoefficients& coeffs) {
  return wait_time(env, design) + io_time(env, design, coeffs) + cpu_time(env, design, coeffs);
}

FittedLatencyModel fit_linear_coeffs(std::span<const LatencySample> samples) {
  if (samples.size() < 2) throw DataError("latency fit needs at least 2 samples");

  // Two passes over centered data.
  const double n = static_cast<double>(samples.size());
  double mean_x = 0.0;
  double mean_y = 0.0;
  for (const auto& s : samples) {
    mean_x += static_cast<double>(s.design.batch_size);
    mean_y += s.measured_latency - wait_time(s.env, s.design);
  }
  mean_x /= n;
  mean_y /= n;

  double sxx = 0.0;
  double sxy = 0.0;
  for (const auto& s : samples) {
    const double dx = static_cast<double>(s.design.batch_size) - mean_x;
    const double dy = s.measured_latency - wait_time(s.env, s.design) - mean_y;
    sxx += dx * dx;
    sxy += dx * dy;
  }
  if (sxx == 0.0) throw DataError("latency fit needs at least 2 distinct block sizes");

  FittedLatencyModel m;
  m.c0 = sxy / sxx;
  m.c1 = mean_y - m.c0 * mean_x;

  double sse = 0.0;
  for (const auto& s : samples) {
    const double r = s.measured_latency - expected_latency(s.env, s.design, m);
    sse += r * r;
  }
  m.rmse = std::sqrt(sse / n);
  return m;
}

SaturationDiagnostic saturation_check(const EnvironmentParams& env, const BlockDesign& design, double bp_rate) {
  if (!(bp_rate > 0.0)) throw ConfigError("bp_rate must be > 0");
  const double capacity = static_cast<double>(design.batch_size) * bp_rate;
  return {env.arrival_rate > capacity, env.arrival_rate / capacity};
}

std::vector<LatencySample> read_measurements(std::istream& in) {
  static constexpr const char* kColumns[] = {"bs", "bto_seconds", "arrival_rate", "measured_latency_seconds"};

  std::string line;
  std::size_t line_no = 0;
  std::map<std::string, std::size_t> index;
  std::vector<std::size_t> cols(4);
  std::vector<LatencySample> out;

  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    auto fields = text::split(line, ',');
    if (index.empty()) {
      for (std::size_t i = 0; i < fields.size(); ++i) index[fields[i]] = i;
      for (std::size_t c = 0; c < 4; ++c) {
        const auto it = index.find(kColumns[c]);
        if (it == index.end()) {
          throw DataError("line " + std::to_string(line_no) + ": missing column '" + kColumns[c] + "'");
        }
        cols[c] = it->second;
      }
      continue;
    }
    if (fields.size() != index.size()) {
      throw DataError("line " + std::to_string(line_no) + ": expected " + std::to_string(index.size()) +
                      " fields, got " + std::to_string(fields.size()));
    }
    try {
      LatencySample s;
      s.design.batch_size = static_cast<std::size_t>(text::parse_uint(fields[cols[0]]));
      s.design.batch_timeout = text::parse_double(fields[cols[1]]);
      s.env.arrival_rate = text::parse_double(fields[cols[2]]);
      s.measured_latency = text::parse_double(fields[cols[3]]);
      s.design.validate();
      s.env.validate();
      if (!std::isfinite(s.measured_latency)) throw std::invalid_argument("latency is not finite");
      out.push_back(std::move(s));
    } catch (const std::invalid_argument& e) {
      throw DataError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (index.empty()) throw DataError("line 1: measurement file is empty");
  if (out.empty()) throw DataError("line " + std::to_string(line_no) + ": no measurement rows");
  return out;
}

}  // namespace blockcalc
