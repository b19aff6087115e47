#include "pnas/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "golden_corpus_data.h"
#include "pnas/csv.hpp"
#include "pnas/errors.hpp"
#include "pnas/param_count.hpp"
#include "pnas/rng.hpp"
#include "pnas/sha256.hpp"

namespace pnas {

namespace {

std::vector<int> parse_int_list(const std::string& field) {
  std::vector<int> out;
  std::istringstream is(field);
  int v = 0;
  while (is >> v) out.push_back(v);
  if (out.empty()) throw ParseError("golden corpus: empty integer list field");
  return out;
}

int parse_int(const std::string& field) {
  try {
    std::size_t pos = 0;
    int v = std::stoi(field, &pos);
    if (pos != field.size()) throw ParseError("");
    return v;
  } catch (const std::exception&) {
    throw ParseError("golden corpus: bad integer '" + field + "'");
  }
}

double parse_double(const std::string& field) {
  try {
    std::size_t pos = 0;
    double v = std::stod(field, &pos);
    if (pos != field.size()) throw ParseError("");
    return v;
  } catch (const std::exception&) {
    throw ParseError("golden corpus: bad number '" + field + "'");
  }
}

}  // namespace

const std::string& golden_csv_text() {
  static const std::string text(detail::kGoldenCorpusCsv, detail::kGoldenCorpusCsvSize);
  return text;
}

std::string golden_csv_sha256() { return sha256_hex(golden_csv_text()); }

std::vector<GoldenRow> golden_rows_from_csv(const std::string& csv_text) {
  std::istringstream is(csv_text);
  CsvTable t = read_csv(is);
  const std::size_t c_table = t.column("table_id");
  const std::size_t c_row = t.column("row_id");
  const std::size_t c_backbone = t.column("backbone");
  const std::size_t c_layers = t.column("n_layer");
  const std::size_t c_dm = t.column("d_model");
  const std::size_t c_heads = t.column("n_head_list");
  const std::size_t c_inners = t.column("d_inner_list");
  const std::size_t c_m = t.column("reported_decoder_params_M");

  std::vector<GoldenRow> rows;
  rows.reserve(t.rows.size());
  for (const auto& r : t.rows) {
    GoldenRow g;
    g.table_id = r[c_table];
    g.row_id = r[c_row];
    const BackboneTag tag = backbone_tag_from_string(r[c_backbone]);
    g.config.backbone = Backbone::defaults_for(tag);
    g.config.vocab_size = default_vocab_size(tag);
    g.config.n_layer = parse_int(r[c_layers]);
    g.config.d_model = parse_int(r[c_dm]);
    g.config.d_embed = g.config.d_model;
    g.config.k_factor = 1;
    g.config.n_head = parse_int_list(r[c_heads]);
    g.config.d_inner = parse_int_list(r[c_inners]);
    g.reported_M = parse_double(r[c_m]);
    if (static_cast<int>(g.config.n_head.size()) != g.config.n_layer ||
        static_cast<int>(g.config.d_inner.size()) != g.config.n_layer) {
      throw ParseError("golden corpus: list length mismatch in " + g.table_id + "/" + g.row_id);
    }
    rows.push_back(std::move(g));
  }
  return rows;
}

std::vector<GoldenRow> golden_rows() { return golden_rows_from_csv(golden_csv_text()); }

const std::vector<AllowlistEntry>& known_discrepancies() {
  static const std::vector<AllowlistEntry> empty;
  return empty;
}

TableReport verify_tables() { return verify_tables(golden_rows()); }

TableReport verify_tables(const std::vector<GoldenRow>& rows) {
  TableReport report;
  report.checks.reserve(rows.size());
  bool all_misses_allowlisted = true;
  for (const GoldenRow& g : rows) {
    TableCheck c;
    c.table_id = g.table_id;
    c.row_id = g.row_id;
    c.computed_params = count_decoder(g.config).decoder_total;
    c.computed_M = static_cast<double>(c.computed_params) / 1e6;
    c.reported_M = g.reported_M;
    c.exact = std::llround(c.computed_M * 10.0) == std::llround(c.reported_M * 10.0);
    c.deviation_M = std::fabs(c.computed_M - c.reported_M);
    c.allowlisted = std::any_of(known_discrepancies().begin(), known_discrepancies().end(),
                                [&](const AllowlistEntry& e) {
                                  return e.table_id == c.table_id && e.row_id == c.row_id;
                                });
    if (c.exact) ++report.exact_count;
    if (!c.exact && !c.allowlisted) all_misses_allowlisted = false;
    report.max_deviation_M = std::max(report.max_deviation_M, c.deviation_M);
    report.checks.push_back(std::move(c));
  }
  report.exact_fraction =
      rows.empty() ? 0.0
                   : static_cast<double>(report.exact_count) / static_cast<double>(rows.size());
  report.pass = !rows.empty() && report.exact_fraction >= 0.99 &&
                report.max_deviation_M <= 0.1 + 1e-9 && all_misses_allowlisted;
  return report;
}

SearchSpace default_synth_space() {
  SearchSpace s;
  s.n_layer_range = {2, 16, 1};
  s.d_model_range = {320, 704, 128};
  s.d_inner_range = {1408, 2688, 64};
  s.n_head_choices = {2};
  s.homogeneous = true;
  s.fixed_k = 1;
  s.backbone = BackboneTag::Gpt2;
  return s;
}

SyntheticSpec::SyntheticSpec() : space(default_synth_space()) {}

std::vector<ArchConfig> enumerate_space(const SearchSpace& space) {
  if (!space.homogeneous) {
    throw Error("enumerate_space: only homogeneous spaces are enumerable");
  }
  const std::vector<int> dms = feasible_d_models(space);
  std::vector<int> embeds = space.d_embed_choices;
  std::vector<int> ks;
  if (space.fixed_k) {
    ks = {*space.fixed_k};
  } else if (space.k_choices.empty()) {
    ks = {1};
  } else {
    ks = space.k_choices;
  }

  std::int64_t total = 0;
  for (int dm : dms) {
    total += static_cast<std::int64_t>(dividing_heads(space, dm).size()) *
             static_cast<std::int64_t>(feasible_d_inners(space, dm).size());
  }
  total *= grid_count(space.n_layer_range);
  total *= static_cast<std::int64_t>(embeds.empty() ? 1 : embeds.size());
  total *= static_cast<std::int64_t>(ks.size());
  constexpr std::int64_t kEnumerationLimit = 200000;
  if (total > kEnumerationLimit) {
    throw Error("enumerate_space: " + std::to_string(total) + " configs exceed the " +
                std::to_string(kEnumerationLimit) + " limit");
  }

  std::vector<ArchConfig> out;
  out.reserve(static_cast<std::size_t>(total));
  const Backbone backbone = Backbone::defaults_for(space.backbone);
  const int vocab = default_vocab_size(space.backbone);
  for (int li = 0; li < grid_count(space.n_layer_range); ++li) {
    const int n_layer = grid_value(space.n_layer_range, li);
    for (int dm : dms) {
      const std::vector<int> heads = dividing_heads(space, dm);
      const std::vector<int> inners = feasible_d_inners(space, dm);
      const std::vector<int> row_embeds = embeds.empty() ? std::vector<int>{dm} : embeds;
      for (int head : heads) {
        for (int inner : inners) {
          for (int de : row_embeds) {
            for (int k : ks) {
              ArchConfig c;
              c.backbone = backbone;
              c.vocab_size = vocab;
              c.n_layer = n_layer;
              c.d_model = dm;
              c.d_embed = de;
              c.k_factor = k;
              c.n_head.assign(static_cast<std::size_t>(n_layer), head);
              c.d_inner.assign(static_cast<std::size_t>(n_layer), inner);
              out.push_back(std::move(c));
            }
          }
        }
      }
    }
  }
  return out;
}

std::vector<SyntheticRow> make_synthetic_benchmark(const SyntheticSpec& spec) {
  if (spec.amplitude <= 0.0) throw Error("synthetic benchmark: amplitude must be positive");
  if (spec.noise_sigma < 0.0) throw Error("synthetic benchmark: noise_sigma must be >= 0");
  std::vector<ArchConfig> configs = enumerate_space(spec.space);
  Rng rng(spec.seed);
  if (spec.max_rows > 0 && static_cast<std::size_t>(spec.max_rows) < configs.size()) {
    std::vector<std::size_t> idx(configs.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = 0; i + 1 < idx.size(); ++i) {
      std::swap(idx[i], idx[i + rng.index(idx.size() - i)]);
    }
    idx.resize(static_cast<std::size_t>(spec.max_rows));
    std::sort(idx.begin(), idx.end());
    std::vector<ArchConfig> kept;
    kept.reserve(idx.size());
    for (std::size_t i : idx) kept.push_back(std::move(configs[i]));
    configs = std::move(kept);
  }

  std::vector<SyntheticRow> rows;
  rows.reserve(configs.size());
  for (ArchConfig& c : configs) {
    SyntheticRow row;
    row.decoder_params = count_decoder(c).decoder_total;
    CostQuery q;
    q.config = c;
    q.seq_len = spec.seq_len;
    q.batch = spec.batch;
    row.cost = estimate_cost(q, spec.profile);
    const double noise = spec.noise_sigma > 0.0 ? rng.normal(0.0, spec.noise_sigma) : 0.0;
    row.true_ppl = spec.amplitude *
                   std::pow(static_cast<double>(row.decoder_params), -spec.alpha) *
                   std::exp(noise);
    row.key = config_key(c);
    row.config = std::move(c);
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_cost_table_csv(const std::vector<SyntheticRow>& rows, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path + " for writing");
  write_csv_row(f, {"config_key", "latency_ms", "peak_memory_bytes", "true_ppl"});
  for (const SyntheticRow& r : rows) {
    write_csv_row(f, {r.key, format_double(r.cost.latency_ms),
                      std::to_string(r.cost.peak_memory_bytes), format_double(r.true_ppl)});
  }
}

void write_configs_json(const std::vector<SyntheticRow>& rows, const std::string& path) {
  nlohmann::json arr = nlohmann::json::array();
  for (const SyntheticRow& r : rows) {
    arr.push_back(nlohmann::json{{"config_key", r.key}, {"config", r.config}});
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path + " for writing");
  f << arr.dump() << '\n';
}

void write_rank_csv(const std::vector<SyntheticRow>& rows, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path + " for writing");
  write_csv_row(f, {"id", "truth_quality", "proxy_score"});
  for (const SyntheticRow& r : rows) {
    write_csv_row(f, {r.key, format_double(r.true_ppl),
                      format_double(static_cast<double>(r.decoder_params))});
  }
}

}  // namespace pnas
