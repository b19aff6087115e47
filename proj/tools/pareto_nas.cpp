// Command-line front end: parameter counting, evolutionary search, proxy
// ranking, frontier extraction, golden-table verification, and synthetic
// benchmark generation. JSON results go to stdout, diagnostics to stderr.
// Exit codes: 0 success, 1 runtime failure, 2 bad input, 3 search space
// exhausted before the iteration budget.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pnas/arch.hpp"
#include "pnas/cost.hpp"
#include "pnas/csv.hpp"
#include "pnas/errors.hpp"
#include "pnas/evolution.hpp"
#include "pnas/fixtures.hpp"
#include "pnas/io.hpp"
#include "pnas/metrics.hpp"
#include "pnas/param_count.hpp"
#include "pnas/pareto.hpp"
#include "pnas/plugin.hpp"
#include "pnas/proxies.hpp"

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;
constexpr int kExitExhausted = 3;

json read_json_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw pnas::ParseError("cannot open " + path);
  json j = json::parse(f, nullptr, false);
  if (j.is_discarded()) throw pnas::ParseError(path + " is not valid JSON");
  return j;
}

pnas::DeviceProfile resolve_profile(const std::string& arg) {
  pnas::DeviceProfile p;
  if (arg.empty() || arg == "default") return p;
  if (arg == "server_gpu") {
    p.name = "server_gpu";
    p.throughput_flops_per_ms = 1e10;
    return p;
  }
  if (arg == "mobile_cpu") {
    p.name = "mobile_cpu";
    p.throughput_flops_per_ms = 1e8;
    return p;
  }
  if (fs::exists(arg)) {
    json j = read_json_file(arg);
    p.name = j.value("name", fs::path(arg).stem().string());
    p.throughput_flops_per_ms = j.value("throughput_flops_per_ms", p.throughput_flops_per_ms);
    p.bytes_per_activation = j.value("bytes_per_activation", p.bytes_per_activation);
    p.memory_overhead_factor = j.value("memory_overhead_factor", p.memory_overhead_factor);
    return p;
  }
  throw pnas::ParseError("unknown device profile '" + arg +
                         "' (expected default, server_gpu, mobile_cpu, or a JSON file)");
}

pnas::SearchSpace space_preset(const std::string& name, pnas::BackboneTag tag) {
  if (name == "small_heterogeneous") return pnas::SearchSpace::small_heterogeneous(tag);
  if (name == "wide_homogeneous") return pnas::SearchSpace::wide_homogeneous();
  throw pnas::ParseError("unknown space preset '" + name + "'");
}

pnas::SearchSpace parse_space(const json& j) {
  if (j.is_string()) return space_preset(j.get<std::string>(), pnas::BackboneTag::Gpt2);
  if (j.is_object() && j.contains("preset")) {
    pnas::BackboneTag tag = pnas::BackboneTag::Gpt2;
    if (j.contains("backbone")) {
      tag = pnas::backbone_tag_from_string(j["backbone"].get<std::string>());
    }
    return space_preset(j["preset"].get<std::string>(), tag);
  }
  return j.get<pnas::SearchSpace>();
}

std::vector<std::string> string_list(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) throw pnas::ParseError(what + " must be a non-empty array");
  std::vector<std::string> out;
  for (const auto& e : j) out.push_back(e.get<std::string>());
  return out;
}

// Configs file: array of {config_key, config}, the shape synth writes.
std::unordered_map<std::string, pnas::ArchConfig> load_configs(const std::string& path) {
  json j = read_json_file(path);
  if (!j.is_array()) throw pnas::ParseError(path + ": expected a JSON array");
  std::unordered_map<std::string, pnas::ArchConfig> out;
  for (const auto& e : j) {
    auto cfg = e.at("config").get<pnas::ArchConfig>();
    std::string key =
        e.contains("config_key") ? e["config_key"].get<std::string>() : pnas::config_key(cfg);
    if (!out.emplace(std::move(key), std::move(cfg)).second) {
      throw pnas::ParseError(path + ": duplicate config_key");
    }
  }
  return out;
}

std::string join_argv(int argc, char** argv) {
  std::ostringstream os;
  for (int i = 0; i < argc; ++i) {
    if (i) os << ' ';
    os << argv[i];
  }
  return os.str();
}

void emit(const json& j) { std::cout << j.dump(2) << std::endl; }

// ---- count ----------------------------------------------------------------

struct CountOpts {
  std::string config_path;
  std::string embedding_spec_path;
};

int run_count(const CountOpts& o) {
  const json j = read_json_file(o.config_path);
  const auto config = j.get<pnas::ArchConfig>();
  pnas::AdaptiveEmbeddingSpec spec = pnas::AdaptiveEmbeddingSpec::default_for(config);
  if (!o.embedding_spec_path.empty()) {
    const json js = read_json_file(o.embedding_spec_path);
    if (js.contains("cutoffs")) spec.cutoffs = js["cutoffs"].get<std::vector<int>>();
    spec.d_embed = js.value("d_embed", spec.d_embed);
    spec.k_factor = js.value("k_factor", spec.k_factor);
    spec.tied_softmax = js.value("tied_softmax", spec.tied_softmax);
  }
  const pnas::ParamBreakdown b = pnas::count_total(config, spec);
  emit(json{{"config_key", pnas::config_key(config)},
            {"per_layer", b.per_layer},
            {"decoder_total", b.decoder_total},
            {"embedding_total", b.embedding_total},
            {"grand_total", b.grand_total}});
  return kExitOk;
}

// ---- search ---------------------------------------------------------------

struct SearchOpts {
  std::string run_config_path;
  std::optional<std::string> output_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> frontier_mode;
  std::optional<double> latency_cap_ms;
  std::optional<std::int64_t> memory_cap_bytes;
  std::optional<std::string> device_profile;
  int jobs = 1;
};

struct CostSetup {
  pnas::CostFn fn;
  bool parallel_ok = true;
};

pnas::CostQuery query_template(const json& jc) {
  pnas::CostQuery q;
  q.seq_len = jc.value("seq_len", q.seq_len);
  q.batch = jc.value("batch", q.batch);
  q.bytes_per_param = jc.value("bytes_per_param", q.bytes_per_param);
  return q;
}

CostSetup make_cost(const json& jcost, const std::optional<std::string>& profile_flag) {
  CostSetup setup;
  if (jcost.is_null() || jcost.contains("analytic")) {
    const json ja = jcost.is_null() ? json::object() : jcost["analytic"];
    pnas::DeviceProfile profile;
    if (profile_flag) {
      profile = resolve_profile(*profile_flag);
    } else if (ja.contains("profile")) {
      if (ja["profile"].is_string()) {
        profile = resolve_profile(ja["profile"].get<std::string>());
      } else {
        const json& jp = ja["profile"];
        profile.name = jp.value("name", profile.name);
        profile.throughput_flops_per_ms =
            jp.value("throughput_flops_per_ms", profile.throughput_flops_per_ms);
        profile.bytes_per_activation =
            jp.value("bytes_per_activation", profile.bytes_per_activation);
        profile.memory_overhead_factor =
            jp.value("memory_overhead_factor", profile.memory_overhead_factor);
      }
    }
    const pnas::CostQuery base = query_template(ja);
    setup.fn = [profile, base](const pnas::ArchConfig& c) {
      pnas::CostQuery q = base;
      q.config = c;
      return pnas::estimate_cost(q, profile);
    };
    return setup;
  }
  if (jcost.contains("measure")) {
    const json& jm = jcost["measure"];
    pnas::PluginCommand cmd;
    cmd.argv = string_list(jm.at("command"), "cost.measure.command");
    cmd.timeout_ms = jm.value("timeout_ms", 0);
    const pnas::CostQuery base = query_template(jm);
    setup.parallel_ok = jm.value("parallel", false);
    setup.fn = [cmd, base](const pnas::ArchConfig& c) {
      pnas::CostQuery q = base;
      q.config = c;
      return pnas::measure_cost(q, cmd);
    };
    return setup;
  }
  if (jcost.contains("tabular")) {
    auto table = std::make_shared<pnas::CostTable>(
        pnas::CostTable::load(jcost["tabular"].at("path").get<std::string>()));
    const pnas::CostQuery base = query_template(jcost["tabular"]);
    setup.fn = [table, base](const pnas::ArchConfig& c) {
      pnas::CostQuery q = base;
      q.config = c;
      return pnas::lookup_cost(q, *table);
    };
    return setup;
  }
  throw pnas::ParseError("cost config must be analytic, measure, or tabular");
}

pnas::ProxyFn make_proxy(const json& jproxy) {
  if (jproxy.is_null()) {
    return [](const pnas::ArchConfig& c) { return pnas::score_decoder_params(c); };
  }
  if (jproxy.contains("plugin")) {
    pnas::PluginCommand cmd;
    cmd.argv = string_list(jproxy["plugin"], "proxy.plugin");
    cmd.timeout_ms = jproxy.value("timeout_ms", 0);
    return [cmd](const pnas::ArchConfig& c) { return pnas::score_external(c, cmd); };
  }
  const std::string name = jproxy.value("name", "decoder_params");
  if (name == "decoder_params") {
    return [](const pnas::ArchConfig& c) { return pnas::score_decoder_params(c); };
  }
  if (name == "total_params") {
    return [](const pnas::ArchConfig& c) { return pnas::score_total_params(c); };
  }
  throw pnas::ParseError("unknown proxy '" + name + "'");
}

int run_search_cmd(const SearchOpts& o, const std::string& command_line) {
  const json cfg = read_json_file(o.run_config_path);
  if (!cfg.contains("space")) throw pnas::ParseError("run config needs a space");
  const pnas::SearchSpace space = parse_space(cfg["space"]);

  pnas::SearchSettings settings;
  if (cfg.contains("settings")) settings = cfg["settings"].get<pnas::SearchSettings>();
  if (o.seed) settings.rng_seed = *o.seed;
  if (o.frontier_mode) settings.frontier_mode = pnas::frontier_mode_from_string(*o.frontier_mode);
  if (o.latency_cap_ms) settings.latency_cap_ms = *o.latency_cap_ms;
  if (o.memory_cap_bytes) settings.memory_cap_bytes = *o.memory_cap_bytes;

  const pnas::ProxyFn proxy_fn =
      make_proxy(cfg.contains("proxy") ? cfg["proxy"] : json(nullptr));
  const CostSetup cost = make_cost(cfg.contains("cost") ? cfg["cost"] : json(nullptr),
                                   o.device_profile);

  std::string out_dir = o.output_dir.value_or(cfg.value("output_dir", "pareto_nas_run"));
  fs::create_directories(out_dir);

  const bool parallel = o.jobs > 1 && cost.parallel_ok;
  const auto t0 = std::chrono::steady_clock::now();
  const pnas::SearchResult result =
      pnas::run_search(space, settings, proxy_fn, cost.fn, o.jobs, parallel);
  const auto wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - t0)
                           .count();

  pnas::Frontier frontier;
  frontier.mode = settings.frontier_mode;
  frontier.points = result.frontier;

  const auto out_path = [&](const char* name) { return (fs::path(out_dir) / name).string(); };
  pnas::write_frontier_csv(frontier, out_path("frontier.csv"));
  pnas::write_frontier_json(frontier, result, out_path("frontier.json"));
  pnas::write_archive_csv(result, out_path("archive.csv"));
  pnas::write_search_log_jsonl(result.log, out_path("search_log.jsonl"));

  json results{{"iterations", result.log.size()},
               {"evaluated_total", result.evaluated_total},
               {"discarded_total", result.discarded_total},
               {"archive_size", result.archive.size()},
               {"frontier_size", result.frontier.size()},
               {"frontier_mode",
                settings.frontier_mode == pnas::FrontierMode::NonDominated ? "nd" : "hull"},
               {"hypervolume", result.log.empty() ? 0.0 : result.log.back().hypervolume},
               {"exhausted", result.exhausted},
               {"seed", settings.rng_seed},
               {"output_dir", out_dir}};
  {
    std::ofstream f(out_path("results.json"), std::ios::binary);
    if (!f) throw pnas::Error("cannot open results.json for writing");
    f << results.dump(2) << '\n';
  }

  pnas::RunManifest manifest;
  manifest.command = command_line;
  manifest.config_path = o.run_config_path;
  manifest.seed = settings.rng_seed;
  manifest.build_id = pnas::build_id();
  manifest.wall_time_ms = wall_ms;
  for (const char* name :
       {"frontier.csv", "frontier.json", "archive.csv", "search_log.jsonl", "results.json"}) {
    manifest.outputs.push_back({name, pnas::file_sha256(out_path(name))});
  }
  pnas::write_manifest_atomic(manifest, out_path("manifest.json"));

  for (const std::string& err : result.eval_errors) {
    std::cerr << "eval failure: " << err << '\n';
  }
  std::cerr << "archive " << result.archive.size() << " candidates, frontier "
            << result.frontier.size() << ", outputs in " << out_dir << '\n';
  emit(results);
  return result.exhausted ? kExitExhausted : kExitOk;
}

// ---- rank -----------------------------------------------------------------

struct RankOpts {
  std::string table_path;
  std::string proxy = "csv";
  std::vector<std::string> plugin_cmd;
  std::string configs_path;
  std::vector<double> topk = {10.0, 30.0, 50.0, 100.0};
};

std::size_t id_column(const pnas::CsvTable& t) {
  for (std::size_t i = 0; i < t.header.size(); ++i) {
    if (t.header[i] == "config_key" || t.header[i] == "id") return i;
  }
  throw pnas::ParseError("table needs an id or config_key column");
}

int run_rank(const RankOpts& o) {
  const pnas::CsvTable t = pnas::read_csv_file(o.table_path);
  const std::size_t c_id = id_column(t);
  const std::size_t c_truth = t.column("truth_quality");

  std::vector<std::pair<std::string, double>> truth_by_id;
  for (const auto& r : t.rows) truth_by_id.emplace_back(r[c_id], std::stod(r[c_truth]));

  std::vector<std::pair<std::string, double>> proxy_by_id;
  std::string proxy_name = o.proxy;
  if (o.proxy == "csv") {
    const std::size_t c_proxy = t.column("proxy_score");
    for (const auto& r : t.rows) proxy_by_id.emplace_back(r[c_id], std::stod(r[c_proxy]));
  } else {
    if (o.configs_path.empty()) {
      throw pnas::ParseError("--configs is required for proxy '" + o.proxy + "'");
    }
    const auto configs = load_configs(o.configs_path);
    auto config_for = [&](const std::string& id) -> const pnas::ArchConfig& {
      auto it = configs.find(id);
      if (it == configs.end()) throw pnas::IdMismatch("no config for id " + id);
      return it->second;
    };
    if (o.proxy == "decoder_params") {
      for (const auto& [id, q] : truth_by_id) {
        proxy_by_id.emplace_back(id, pnas::score_decoder_params(config_for(id)).value);
      }
    } else if (o.proxy == "total_params") {
      for (const auto& [id, q] : truth_by_id) {
        proxy_by_id.emplace_back(id, pnas::score_total_params(config_for(id)).value);
      }
    } else if (o.proxy == "plugin") {
      if (o.plugin_cmd.empty()) throw pnas::ParseError("--plugin-cmd is required");
      pnas::PluginCommand cmd;
      cmd.argv = o.plugin_cmd;
      for (const auto& [id, q] : truth_by_id) {
        proxy_by_id.emplace_back(id, pnas::score_external(config_for(id), cmd).value);
      }
      proxy_name = "external:" + o.plugin_cmd.front();
    } else {
      throw pnas::ParseError("unknown proxy '" + o.proxy +
                             "' (expected csv, decoder_params, total_params, plugin)");
    }
  }

  std::vector<double> proxy_vals;
  std::vector<double> neg_truth;
  for (std::size_t i = 0; i < truth_by_id.size(); ++i) {
    proxy_vals.push_back(proxy_by_id[i].second);
    neg_truth.push_back(-truth_by_id[i].second);
  }
  const double src = pnas::spearman(proxy_vals, neg_truth);

  json crs = json::array();
  for (double pct : o.topk) {
    crs.push_back(json{{"top_percent", pct},
                       {"value", pnas::common_ratio(truth_by_id, proxy_by_id, pct)}});
  }
  std::cerr << "n=" << truth_by_id.size() << " proxy=" << proxy_name << " src=" << src << '\n';
  emit(json{{"n", truth_by_id.size()},
            {"proxy", proxy_name},
            {"src", src},
            {"common_ratio", crs}});
  return kExitOk;
}

// ---- pareto ---------------------------------------------------------------

struct ParetoOpts {
  std::string points_path;
  std::string mode = "nd";
  double eps = 0.0;
  std::string out_path;
  std::string truth_path;
};

int run_pareto(const ParetoOpts& o) {
  const pnas::CsvTable t = pnas::read_csv_file(o.points_path);
  const std::size_t c_id = id_column(t);
  const std::size_t c_score = t.column("score");
  const std::size_t c_lat = t.column("latency_ms");
  const std::size_t c_mem = t.column("peak_memory_bytes");

  std::vector<pnas::ObjectivePoint> pts;
  for (const auto& r : t.rows) {
    pnas::ObjectivePoint p;
    p.payload = r[c_id];
    p.score = std::stod(r[c_score]);
    p.latency_ms = std::stod(r[c_lat]);
    p.peak_memory_bytes = std::stod(r[c_mem]);
    pts.push_back(std::move(p));
  }

  const pnas::FrontierMode mode = pnas::frontier_mode_from_string(o.mode);
  if (o.eps != 0.0 && mode != pnas::FrontierMode::NonDominated) {
    throw pnas::ParseError("--eps only applies to the nd mode");
  }
  pnas::Frontier frontier;
  frontier.mode = mode;
  frontier.points = (mode == pnas::FrontierMode::NonDominated)
                        ? pnas::non_dominated(pts, o.eps)
                        : pnas::lower_convex_hull(pts);

  if (!o.out_path.empty()) pnas::write_frontier_csv(frontier, o.out_path);

  json result{{"n_points", pts.size()},
              {"frontier_size", frontier.points.size()},
              {"mode", o.mode}};

  if (!o.truth_path.empty()) {
    const pnas::CsvTable tt = pnas::read_csv_file(o.truth_path);
    const std::size_t tc_id = id_column(tt);
    const std::size_t tc_lat = tt.column("latency_ms");
    const std::size_t tc_ppl = tt.column("true_ppl");
    std::unordered_map<std::string, double> ppl_by_id;
    std::vector<pnas::ObjectivePoint> truth_pts;
    for (const auto& r : tt.rows) {
      ppl_by_id[r[tc_id]] = std::stod(r[tc_ppl]);
      pnas::ObjectivePoint p;
      p.payload = r[tc_id];
      p.score = -std::stod(r[tc_ppl]);
      p.latency_ms = std::stod(r[tc_lat]);
      p.peak_memory_bytes = 0.0;
      truth_pts.push_back(std::move(p));
    }
    std::vector<pnas::QualityPoint> reference;
    for (const auto& p : pnas::non_dominated(truth_pts)) {
      reference.push_back({p.latency_ms, -p.score});
    }
    std::vector<pnas::QualityPoint> candidate;
    for (const auto& p : frontier.points) {
      auto it = ppl_by_id.find(p.payload);
      if (it == ppl_by_id.end()) {
        throw pnas::IdMismatch("truth table has no entry for " + p.payload);
      }
      candidate.push_back({p.latency_ms, it->second});
    }
    result["d_avg"] = pnas::mean_frontier_distance(candidate, reference);
  }
  emit(result);
  return kExitOk;
}

// ---- verify-tables --------------------------------------------------------

struct VerifyOpts {
  std::string csv_path;
};

int run_verify(const VerifyOpts& o) {
  pnas::TableReport report;
  if (o.csv_path.empty()) {
    report = pnas::verify_tables();
  } else {
    std::ifstream f(o.csv_path, std::ios::binary);
    if (!f) throw pnas::ParseError("cannot open " + o.csv_path);
    std::ostringstream buf;
    buf << f.rdbuf();
    report = pnas::verify_tables(pnas::golden_rows_from_csv(buf.str()));
  }

  json failures = json::array();
  for (const auto& c : report.checks) {
    if (c.exact) continue;
    failures.push_back(json{{"table_id", c.table_id},
                            {"row_id", c.row_id},
                            {"computed_M", c.computed_M},
                            {"reported_M", c.reported_M},
                            {"deviation_M", c.deviation_M},
                            {"allowlisted", c.allowlisted}});
    std::cerr << "mismatch " << c.table_id << "/" << c.row_id << ": computed " << c.computed_M
              << "M vs reported " << c.reported_M << "M\n";
  }
  std::cerr << "verified " << report.checks.size() << " rows, " << report.exact_count
            << " exact, max deviation " << report.max_deviation_M << "M\n";
  emit(json{{"rows", report.checks.size()},
            {"exact", report.exact_count},
            {"exact_fraction", report.exact_fraction},
            {"max_deviation_M", report.max_deviation_M},
            {"pass", report.pass},
            {"failures", failures}});
  return report.pass ? kExitOk : kExitRuntime;
}

// ---- synth ----------------------------------------------------------------

struct SynthOpts {
  std::string out_prefix = "synth";
  int rows = 0;
  double noise = 0.0;
  std::uint64_t seed = 0;
  int seq_len = 192;
  int batch = 1;
  double amplitude = 150.0;
  double alpha = 0.032;
  std::optional<std::string> device_profile;
  std::string space_path;
};

int run_synth(const SynthOpts& o) {
  pnas::SyntheticSpec spec;
  if (!o.space_path.empty()) spec.space = parse_space(read_json_file(o.space_path));
  spec.max_rows = o.rows;
  spec.noise_sigma = o.noise;
  spec.seed = o.seed;
  spec.seq_len = o.seq_len;
  spec.batch = o.batch;
  spec.amplitude = o.amplitude;
  spec.alpha = o.alpha;
  if (o.device_profile) spec.profile = resolve_profile(*o.device_profile);

  const auto rows = pnas::make_synthetic_benchmark(spec);
  const std::string costs = o.out_prefix + "_costs.csv";
  const std::string configs = o.out_prefix + "_configs.json";
  const std::string rank = o.out_prefix + "_rank.csv";
  const fs::path parent = fs::path(o.out_prefix).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
  pnas::write_cost_table_csv(rows, costs);
  pnas::write_configs_json(rows, configs);
  pnas::write_rank_csv(rows, rank);
  std::cerr << "wrote " << rows.size() << " benchmark rows\n";
  emit(json{{"rows", rows.size()}, {"files", {costs, configs, rank}}});
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hardware-aware architecture search over decoder parameter counts"};
  app.require_subcommand(1);

  CountOpts count_opts;
  CLI::App* count = app.add_subcommand("count", "Exact parameter breakdown of one config");
  count->add_option("config", count_opts.config_path, "ArchConfig JSON file")->required();
  count->add_option("--embedding-spec", count_opts.embedding_spec_path,
                    "Adaptive embedding spec JSON");

  SearchOpts search_opts;
  CLI::App* search = app.add_subcommand("search", "Evolutionary Pareto-frontier search");
  search->add_option("run_config", search_opts.run_config_path, "Run config JSON file")
      ->required();
  search->add_option("--output-dir", search_opts.output_dir, "Output directory");
  search->add_option("--seed", search_opts.seed, "Override settings.rng_seed");
  search->add_option("--frontier-mode", search_opts.frontier_mode, "nd or hull");
  search->add_option("--latency-cap-ms", search_opts.latency_cap_ms, "Discard slower candidates");
  search->add_option("--memory-cap-bytes", search_opts.memory_cap_bytes,
                     "Discard larger candidates");
  search->add_option("--device-profile", search_opts.device_profile,
                     "Analytic cost profile (name or JSON file)");
  search->add_option("--jobs", search_opts.jobs, "Worker threads for plugin evaluation")
      ->check(CLI::PositiveNumber);

  RankOpts rank_opts;
  CLI::App* rank = app.add_subcommand("rank", "Proxy rank correlation against a benchmark");
  rank->add_option("table", rank_opts.table_path, "CSV with id, truth_quality[, proxy_score]")
      ->required();
  rank->add_option("--proxy", rank_opts.proxy, "csv, decoder_params, total_params, or plugin");
  rank->add_option("--plugin-cmd", rank_opts.plugin_cmd, "Proxy plugin argv")
      ->expected(-1);
  rank->add_option("--configs", rank_opts.configs_path, "Configs JSON for computed proxies");
  rank->add_option("--topk", rank_opts.topk, "Common-ratio percentages")->delimiter(',');

  ParetoOpts pareto_opts;
  CLI::App* pareto = app.add_subcommand("pareto", "Extract a frontier from scored points");
  pareto->add_option("points", pareto_opts.points_path,
                     "CSV with id, score, latency_ms, peak_memory_bytes")
      ->required();
  pareto->add_option("--mode", pareto_opts.mode, "nd or hull");
  pareto->add_option("--eps", pareto_opts.eps, "Dominance slack (nd only)");
  pareto->add_option("--out", pareto_opts.out_path, "Write the frontier CSV here");
  pareto->add_option("--truth", pareto_opts.truth_path,
                     "CSV with id, latency_ms, true_ppl for the d_avg gap");

  VerifyOpts verify_opts;
  CLI::App* verify =
      app.add_subcommand("verify-tables", "Recount the published reference architectures");
  verify->add_option("--csv", verify_opts.csv_path, "External corpus CSV (default: embedded)");

  SynthOpts synth_opts;
  CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic quality benchmark");
  synth->add_option("--out-prefix", synth_opts.out_prefix, "Output file prefix");
  synth->add_option("--rows", synth_opts.rows, "Keep only this many configs (0 = all)");
  synth->add_option("--noise", synth_opts.noise, "Log-quality noise sigma");
  synth->add_option("--seed", synth_opts.seed, "RNG seed");
  synth->add_option("--seq-len", synth_opts.seq_len, "Cost model sequence length");
  synth->add_option("--batch", synth_opts.batch, "Cost model batch size");
  synth->add_option("--amplitude", synth_opts.amplitude, "Power-law amplitude");
  synth->add_option("--alpha", synth_opts.alpha, "Power-law exponent");
  synth->add_option("--device-profile", synth_opts.device_profile, "Cost profile");
  synth->add_option("--space", synth_opts.space_path, "Space JSON (default: built-in)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (count->parsed()) return run_count(count_opts);
    if (search->parsed()) return run_search_cmd(search_opts, join_argv(argc, argv));
    if (rank->parsed()) return run_rank(rank_opts);
    if (pareto->parsed()) return run_pareto(pareto_opts);
    if (verify->parsed()) return run_verify(verify_opts);
    if (synth->parsed()) return run_synth(synth_opts);
  } catch (const pnas::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const pnas::CutoffError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const pnas::DivisibilityError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const pnas::EmptyFeasibleSet& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const pnas::IdMismatch& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const pnas::LengthMismatch& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}
