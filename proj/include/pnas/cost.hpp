#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "pnas/arch.hpp"
#include "pnas/plugin.hpp"

namespace pnas {

enum class CostSource { Analytic, Measured, Tabular };

struct CostSample {
  double latency_ms = 0.0;
  std::int64_t peak_memory_bytes = 0;
  int repeats = 1;
  CostSource source = CostSource::Analytic;
};

struct CostQuery {
  ArchConfig config;
  int seq_len = 192;
  int batch = 1;
  int bytes_per_param = 4;
};

struct DeviceProfile {
  std::string name = "default";
  double throughput_flops_per_ms = 1e9;
  int bytes_per_activation = 4;
  double memory_overhead_factor = 1.0;
};

// Forward-pass FLOPs for one token batch of the given sequence length,
// summed over decoder layers:
//   8*seq*d_model^2  (QKV + output projections)
// + 4*seq^2*d_model  (attention scores and weighted sum)
// + 4*seq*d_model*d_inner_i  (the two FFN matmuls)
std::int64_t flops_forward(const ArchConfig& c, int seq_len);

// latency = flops / throughput; peak memory = weights + activations:
//   decoder_total*bytes_per_param
// + batch*seq*(4*d_model + max d_inner + max n_head*seq)*bytes_per_activation,
// the whole sum scaled by memory_overhead_factor.
CostSample estimate_cost(const CostQuery& q, const DeviceProfile& profile);

// On-device measurement through the plugin protocol. The plugin receives the
// full query as {"config":..., "seq_len":..., "batch":..., "bytes_per_param":...}
// and must reply {"latency_ms": number, "peak_memory_bytes": int, "repeats": int?}.
// Throws MeasurementFailure on any protocol or validation error.
CostSample measure_cost(const CostQuery& q, const PluginCommand& plugin);

// Pre-measured costs keyed by config_key. CSV columns: config_key, latency_ms,
// peak_memory_bytes, and optionally true_ppl (blank cells allowed).
class CostTable {
 public:
  struct Row {
    std::string config_key;
    double latency_ms = 0.0;
    std::int64_t peak_memory_bytes = 0;
    bool has_true_ppl = false;
    double true_ppl = 0.0;
  };

  static CostTable load(const std::string& path);
  static CostTable from_rows(std::vector<Row> rows);

  // Throws MissingEntry when the key is absent.
  const Row& at(const std::string& config_key) const;
  bool contains(const std::string& config_key) const;
  const std::vector<Row>& rows() const { return rows_; }

 private:
  std::vector<Row> rows_;                            // file order
  std::unordered_map<std::string, std::size_t> by_key_;
};

CostSample lookup_cost(const CostQuery& q, const CostTable& table);

}  // namespace pnas
