#include "pnas/cost.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "pnas/csv.hpp"
#include "pnas/errors.hpp"
#include "pnas/param_count.hpp"

namespace pnas {

namespace {

void validate_query(const CostQuery& q) {
  if (q.seq_len < 1) throw Error("cost query invalid: seq_len must be >= 1");
  if (q.batch < 1) throw Error("cost query invalid: batch must be >= 1");
  if (q.bytes_per_param < 1) throw Error("cost query invalid: bytes_per_param must be >= 1");
  if (q.config.backbone.include_positional_embedding &&
      q.seq_len > q.config.backbone.max_positions) {
    throw Error("cost query invalid: seq_len " + std::to_string(q.seq_len) +
                " exceeds max_positions " + std::to_string(q.config.backbone.max_positions));
  }
}

}  // namespace

std::int64_t flops_forward(const ArchConfig& c, int seq_len) {
  const std::int64_t s = seq_len;
  const std::int64_t dm = c.d_model;
  std::int64_t total = 0;
  for (int i = 0; i < c.n_layer; ++i) {
    const std::int64_t di = c.d_inner.at(static_cast<std::size_t>(i));
    total += 8 * s * dm * dm + 4 * s * s * dm + 4 * s * dm * di;
  }
  return total;
}

CostSample estimate_cost(const CostQuery& q, const DeviceProfile& profile) {
  validate_query(q);
  if (profile.throughput_flops_per_ms <= 0.0) {
    throw Error("device profile invalid: throughput must be positive");
  }
  const ArchConfig& c = q.config;
  const std::int64_t flops = flops_forward(c, q.seq_len);

  std::int64_t max_inner = 0;
  for (int v : c.d_inner) max_inner = std::max<std::int64_t>(max_inner, v);
  std::int64_t max_head = 0;
  for (int v : c.n_head) max_head = std::max<std::int64_t>(max_head, v);

  const std::int64_t weights =
      count_decoder(c).decoder_total * static_cast<std::int64_t>(q.bytes_per_param);
  const std::int64_t per_position =
      4 * static_cast<std::int64_t>(c.d_model) + max_inner + max_head * q.seq_len;
  const std::int64_t activations = static_cast<std::int64_t>(q.batch) * q.seq_len *
                                   per_position * profile.bytes_per_activation;

  CostSample out;
  out.latency_ms = static_cast<double>(flops) / profile.throughput_flops_per_ms;
  out.peak_memory_bytes = static_cast<std::int64_t>(
      std::llround(static_cast<double>(weights + activations) * profile.memory_overhead_factor));
  out.repeats = 1;
  out.source = CostSource::Analytic;
  return out;
}

CostSample measure_cost(const CostQuery& q, const PluginCommand& plugin) {
  validate_query(q);
  nlohmann::json input{
      {"config", q.config},
      {"seq_len", q.seq_len},
      {"batch", q.batch},
      {"bytes_per_param", q.bytes_per_param},
  };
  nlohmann::json reply;
  try {
    reply = call_plugin(plugin, input);
  } catch (const PluginFailure& e) {
    throw MeasurementFailure(e.what());
  }
  if (!reply.contains("latency_ms") || !reply["latency_ms"].is_number()) {
    throw MeasurementFailure("measurement reply missing numeric latency_ms: " + reply.dump());
  }
  if (!reply.contains("peak_memory_bytes") || !reply["peak_memory_bytes"].is_number()) {
    throw MeasurementFailure("measurement reply missing numeric peak_memory_bytes: " + reply.dump());
  }
  CostSample out;
  out.latency_ms = reply["latency_ms"].get<double>();
  out.peak_memory_bytes = std::llround(reply["peak_memory_bytes"].get<double>());
  out.repeats = 10;
  if (reply.contains("repeats")) {
    if (!reply["repeats"].is_number_integer() || reply["repeats"].get<std::int64_t>() < 1) {
      throw MeasurementFailure("measurement reply has invalid repeats: " + reply.dump());
    }
    out.repeats = static_cast<int>(reply["repeats"].get<std::int64_t>());
  }
  if (out.latency_ms < 0.0 || out.peak_memory_bytes < 0) {
    throw MeasurementFailure("measurement reply has negative cost: " + reply.dump());
  }
  out.source = CostSource::Measured;
  return out;
}

CostTable CostTable::load(const std::string& path) {
  CsvTable csv = read_csv_file(path);
  const std::size_t key_col = csv.column("config_key");
  const std::size_t lat_col = csv.column("latency_ms");
  const std::size_t mem_col = csv.column("peak_memory_bytes");
  std::size_t ppl_col = 0;
  bool has_ppl_col = false;
  for (std::size_t i = 0; i < csv.header.size(); ++i) {
    if (csv.header[i] == "true_ppl") {
      ppl_col = i;
      has_ppl_col = true;
    }
  }
  std::vector<Row> rows;
  rows.reserve(csv.rows.size());
  for (const auto& r : csv.rows) {
    Row row;
    row.config_key = r[key_col];
    try {
      row.latency_ms = std::stod(r[lat_col]);
      row.peak_memory_bytes = std::stoll(r[mem_col]);
      if (has_ppl_col && !r[ppl_col].empty()) {
        row.true_ppl = std::stod(r[ppl_col]);
        row.has_true_ppl = true;
      }
    } catch (const std::exception&) {
      throw ParseError("cost table " + path + ": non-numeric cell in row for key " +
                       row.config_key);
    }
    rows.push_back(std::move(row));
  }
  try {
    return from_rows(std::move(rows));
  } catch (const ParseError& e) {
    throw ParseError("cost table " + path + ": " + e.what());
  }
}

CostTable CostTable::from_rows(std::vector<Row> rows) {
  CostTable t;
  t.rows_ = std::move(rows);
  for (std::size_t i = 0; i < t.rows_.size(); ++i) {
    auto [it, inserted] = t.by_key_.emplace(t.rows_[i].config_key, i);
    if (!inserted) throw ParseError("duplicate config_key " + t.rows_[i].config_key);
  }
  return t;
}

const CostTable::Row& CostTable::at(const std::string& config_key) const {
  auto it = by_key_.find(config_key);
  if (it == by_key_.end()) {
    throw MissingEntry("no cost entry for config_key " + config_key);
  }
  return rows_[it->second];
}

bool CostTable::contains(const std::string& config_key) const {
  return by_key_.find(config_key) != by_key_.end();
}

CostSample lookup_cost(const CostQuery& q, const CostTable& table) {
  const CostTable::Row& row = table.at(config_key(q.config));
  CostSample out;
  out.latency_ms = row.latency_ms;
  out.peak_memory_bytes = row.peak_memory_bytes;
  out.repeats = 1;
  out.source = CostSource::Tabular;
  return out;
}

}  // namespace pnas
