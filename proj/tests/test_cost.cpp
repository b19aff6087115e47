#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <unistd.h>
#include <string>
#include <vector>

#include "pnas/arch.hpp"
#include "pnas/cost.hpp"
#include "pnas/csv.hpp"
#include "pnas/errors.hpp"
#include "pnas/plugin.hpp"
#include "pnas/proxies.hpp"
#include "pnas/param_count.hpp"
#include "pnas/rng.hpp"

using namespace pnas;

namespace {

std::string plugin_path(const char* name) {
  return std::string(PNAS_PLUGIN_DIR) + "/" + name;
}

PluginCommand py(const char* name, std::vector<std::string> extra = {},
                 int timeout_ms = 20000) {
  PluginCommand cmd;
  cmd.argv = {"python3", plugin_path(name)};
  for (auto& a : extra) cmd.argv.push_back(std::move(a));
  cmd.timeout_ms = timeout_ms;
  return cmd;
}

ArchConfig tiny_cfg() {
  ArchConfig c;
  c.backbone = Backbone::gpt2();
  c.n_layer = 2;
  c.d_model = 128;
  c.d_embed = 128;
  c.k_factor = 1;
  c.n_head = {2, 2};
  c.d_inner = {256, 256};
  c.vocab_size = 50257;
  return c;
}

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("pnas_cost_test_" + std::to_string(::getpid()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_CASE("flops formula on a tiny case") {
  // One layer, seq 20, d_model 8, d_inner 16:
  // 8*20*64 + 4*400*8 + 4*20*8*16 = 10240 + 12800 + 10240 = 33280.
  ArchConfig c = tiny_cfg();
  c.n_layer = 1;
  c.d_model = 8;
  c.n_head = {2};
  c.d_inner = {16};
  CHECK(flops_forward(c, 20) == 33280);
}

TEST_CASE("flops matches a refactored oracle") {
  // s*dm*(8*dm + 4*s + 4*di) per layer is the same polynomial grouped
  // differently.
  Rng rng(301);
  const SearchSpace space = SearchSpace::small_heterogeneous(BackboneTag::Gpt2);
  for (int i = 0; i < 300; ++i) {
    const ArchConfig c = sample_with(space, rng);
    const int s = 1 + static_cast<int>(rng.index(512));
    std::int64_t expect = 0;
    for (int l = 0; l < c.n_layer; ++l) {
      const std::int64_t dm = c.d_model;
      const std::int64_t di = c.d_inner[static_cast<std::size_t>(l)];
      expect += s * dm * (8 * dm + 4 * s + 4 * di);
    }
    CHECK(flops_forward(c, s) == expect);
  }
}

TEST_CASE("analytic latency is flops over throughput") {
  const ArchConfig c = tiny_cfg();
  CostQuery q;
  q.config = c;
  q.seq_len = 64;
  DeviceProfile p;
  p.throughput_flops_per_ms = 2e6;
  const CostSample s = estimate_cost(q, p);
  CHECK(s.latency_ms ==
        doctest::Approx(static_cast<double>(flops_forward(c, 64)) / 2e6).epsilon(1e-12));
  CHECK(s.source == CostSource::Analytic);
  CHECK(s.repeats == 1);
}

TEST_CASE("analytic memory adds weights and activations") {
  const ArchConfig c = tiny_cfg();
  CostQuery q;
  q.config = c;
  q.seq_len = 10;
  q.batch = 3;
  q.bytes_per_param = 2;
  DeviceProfile p;
  p.bytes_per_activation = 4;
  p.memory_overhead_factor = 1.0;
  const std::int64_t weights = count_decoder(c).decoder_total * 2;
  // per position: 4*128 + 256 + 2*10 = 788; activations: 3*10*788*4.
  const std::int64_t acts = 3LL * 10 * (4 * 128 + 256 + 2 * 10) * 4;
  const CostSample s = estimate_cost(q, p);
  CHECK(s.peak_memory_bytes == weights + acts);

  DeviceProfile doubled = p;
  doubled.memory_overhead_factor = 1.5;
  const CostSample s2 = estimate_cost(q, doubled);
  CHECK(s2.peak_memory_bytes ==
        std::llround(static_cast<double>(weights + acts) * 1.5));
}

TEST_CASE("query validation") {
  CostQuery q;
  q.config = tiny_cfg();
  DeviceProfile p;

  CostQuery bad = q;
  bad.seq_len = 0;
  CHECK_THROWS_AS(estimate_cost(bad, p), Error);
  bad = q;
  bad.batch = 0;
  CHECK_THROWS_AS(estimate_cost(bad, p), Error);
  bad = q;
  bad.bytes_per_param = 0;
  CHECK_THROWS_AS(estimate_cost(bad, p), Error);

  // Positional-embedding backbones bound the sequence length.
  bad = q;
  bad.config.backbone = Backbone::opt_style();
  bad.seq_len = 2049;
  CHECK_THROWS_AS(estimate_cost(bad, p), Error);
  bad.seq_len = 2048;
  CHECK_NOTHROW(estimate_cost(bad, p));

  DeviceProfile zero;
  zero.throughput_flops_per_ms = 0.0;
  CHECK_THROWS_AS(estimate_cost(q, zero), Error);
}

TEST_CASE("plugin round trip echoes input") {
  const nlohmann::json input{{"alpha", 1}, {"beta", "two"}};
  const nlohmann::json reply = call_plugin(py("echo.py"), input);
  REQUIRE(reply.contains("echo"));
  CHECK(reply["echo"] == input);
}

TEST_CASE("plugin failures carry context") {
  const nlohmann::json input{{"x", 1}};

  CHECK_THROWS_WITH_AS(call_plugin(PluginCommand{}, input),
                       doctest::Contains("command is empty"), PluginFailure);

  try {
    call_plugin(py("fail.py"), input);
    FAIL("expected PluginFailure");
  } catch (const PluginFailure& e) {
    const std::string msg = e.what();
    CHECK(msg.find("exit") != std::string::npos);
    CHECK(msg.find("widget caught fire") != std::string::npos);
    CHECK(msg.find("fail.py") != std::string::npos);
  }

  CHECK_THROWS_AS(call_plugin(py("malformed.py"), input), PluginFailure);
  CHECK_THROWS_AS(call_plugin(py("malformed.py", {"array"}), input), PluginFailure);
  CHECK_THROWS_AS(call_plugin(py("malformed.py", {"empty"}), input), PluginFailure);

  try {
    call_plugin(py("slow.py", {}, 300), input);
    FAIL("expected timeout");
  } catch (const PluginFailure& e) {
    CHECK(std::string(e.what()).find("timed out") != std::string::npos);
  }
}

TEST_CASE("external proxy cross checks the closed form") {
  Rng rng(302);
  const SearchSpace space = SearchSpace::small_heterogeneous(BackboneTag::TransformerXl);
  const SearchSpace wide = SearchSpace::wide_homogeneous();
  const PluginCommand oracle = py("count_params.py");
  for (int i = 0; i < 25; ++i) {
    for (const SearchSpace* s : {&space, &wide}) {
      const ArchConfig c = sample_with(*s, rng);
      const ProxyScore ours = score_decoder_params(c);
      const ProxyScore theirs = score_external(c, oracle);
      CHECK(ours.value == theirs.value);
    }
  }
}

TEST_CASE("proxy metadata") {
  const ArchConfig c = tiny_cfg();
  const ProxyScore dec = score_decoder_params(c);
  CHECK(dec.proxy_name == "decoder_params");
  CHECK(dec.cost_flops == 0);
  CHECK(dec.value == static_cast<double>(count_decoder(c).decoder_total));

  const ProxyScore tot = score_total_params(c);
  CHECK(tot.proxy_name == "total_params");
  CHECK(tot.value ==
        static_cast<double>(count_decoder(c).decoder_total +
                            count_embedding(c, AdaptiveEmbeddingSpec::default_for(c))));
  CHECK(tot.value > dec.value);

  const ProxyScore ext = score_external(c, py("count_params.py"));
  CHECK(ext.proxy_name == "external:python3");
  CHECK(ext.cost_flops == 0);
  const ProxyScore ext2 = score_external(c, py("count_params.py", {"--flops"}));
  CHECK(ext2.cost_flops == 12345);
  CHECK(ext2.value == ext.value);
}

TEST_CASE("measured cost parses the reply") {
  CostQuery q;
  q.config = tiny_cfg();
  q.seq_len = 100;
  q.batch = 2;
  q.bytes_per_param = 4;
  const CostSample s = measure_cost(q, py("measure.py"));
  // measure.py: latency = n_layer*seq/1000, mem = d_model*1000*batch*bpp.
  CHECK(s.latency_ms == doctest::Approx(0.2));
  CHECK(s.peak_memory_bytes == 128LL * 1000 * 2 * 4);
  CHECK(s.repeats == 5);
  CHECK(s.source == CostSource::Measured);

  const CostSample s2 = measure_cost(q, py("measure.py", {"norepeat"}));
  CHECK(s2.repeats == 10);  // protocol default
}

TEST_CASE("measured cost rejects bad replies") {
  CostQuery q;
  q.config = tiny_cfg();
  CHECK_THROWS_AS(measure_cost(q, py("measure.py", {"neg"})), MeasurementFailure);
  CHECK_THROWS_AS(measure_cost(q, py("measure.py", {"badrepeat"})), MeasurementFailure);
  CHECK_THROWS_AS(measure_cost(q, py("measure.py", {"missing"})), MeasurementFailure);
  CHECK_THROWS_AS(measure_cost(q, py("fail.py")), MeasurementFailure);
  CHECK_THROWS_AS(measure_cost(q, py("malformed.py")), MeasurementFailure);
}

TEST_CASE("cost table load and lookup") {
  TempDir tmp;
  const std::string path = (tmp.path / "costs.csv").string();
  {
    std::ofstream out(path, std::ios::binary);
    out << "config_key,latency_ms,peak_memory_bytes,true_ppl\r\n"
        << "k1,1.5,1000,20.25\r\n"
        << "k2,2.5,2000,\r\n"
        << "k3,0.25,4096,19\r\n";
  }
  const CostTable t = CostTable::load(path);
  REQUIRE(t.rows().size() == 3);
  CHECK(t.contains("k1"));
  CHECK_FALSE(t.contains("k9"));
  CHECK(t.at("k1").latency_ms == doctest::Approx(1.5));
  CHECK(t.at("k1").peak_memory_bytes == 1000);
  CHECK(t.at("k1").has_true_ppl);
  CHECK(t.at("k1").true_ppl == doctest::Approx(20.25));
  CHECK_FALSE(t.at("k2").has_true_ppl);
  CHECK_THROWS_AS(t.at("missing"), MissingEntry);
}

TEST_CASE("cost table without the optional column") {
  TempDir tmp;
  const std::string path = (tmp.path / "costs.csv").string();
  {
    std::ofstream out(path, std::ios::binary);
    out << "config_key,latency_ms,peak_memory_bytes\n"
        << "a,1,2\n";
  }
  const CostTable t = CostTable::load(path);
  CHECK_FALSE(t.at("a").has_true_ppl);
}

TEST_CASE("cost table rejects bad files") {
  TempDir tmp;
  const std::string dup = (tmp.path / "dup.csv").string();
  {
    std::ofstream out(dup, std::ios::binary);
    out << "config_key,latency_ms,peak_memory_bytes\n"
        << "a,1,2\n"
        << "a,3,4\n";
  }
  CHECK_THROWS_AS(CostTable::load(dup), ParseError);

  const std::string bad = (tmp.path / "bad.csv").string();
  {
    std::ofstream out(bad, std::ios::binary);
    out << "config_key,latency_ms,peak_memory_bytes\n"
        << "a,fast,2\n";
  }
  CHECK_THROWS_AS(CostTable::load(bad), ParseError);

  const std::string missing_col = (tmp.path / "cols.csv").string();
  {
    std::ofstream out(missing_col, std::ios::binary);
    out << "config_key,latency_ms\n"
        << "a,1\n";
  }
  CHECK_THROWS_AS(CostTable::load(missing_col), Error);
}

TEST_CASE("tabular lookup keys on the canonical config") {
  const ArchConfig c = tiny_cfg();
  CostTable::Row row;
  row.config_key = config_key(c);
  row.latency_ms = 7.25;
  row.peak_memory_bytes = 123456;
  const CostTable t = CostTable::from_rows({row});

  CostQuery q;
  q.config = c;
  const CostSample s = lookup_cost(q, t);
  CHECK(s.latency_ms == doctest::Approx(7.25));
  CHECK(s.peak_memory_bytes == 123456);
  CHECK(s.source == CostSource::Tabular);
  CHECK(s.repeats == 1);

  ArchConfig other = c;
  other.d_model = 256;
  other.d_embed = 256;
  CostQuery q2;
  q2.config = other;
  CHECK_THROWS_AS(lookup_cost(q2, t), MissingEntry);
}

TEST_CASE("default plugin timeout honors the environment") {
  // The suite runs with the variable unset; the built-in default applies.
  // Setting it in-process must take effect on the next read.
  CHECK(default_plugin_timeout_ms() == 60000);
  setenv("PARETO_NAS_PLUGIN_TIMEOUT_MS", "1234", 1);
  CHECK(default_plugin_timeout_ms() == 1234);
  unsetenv("PARETO_NAS_PLUGIN_TIMEOUT_MS");
  CHECK(default_plugin_timeout_ms() == 60000);
}
