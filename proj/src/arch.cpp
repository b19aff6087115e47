#include "pnas/arch.hpp"

#include <algorithm>
#include <sstream>

#include "pnas/errors.hpp"
#include "pnas/sha256.hpp"

namespace pnas {

Backbone Backbone::gpt2() {
  return {BackboneTag::Gpt2, true, false, 0, BiasConvention::AttnBiased};
}

Backbone Backbone::transformer_xl() {
  return {BackboneTag::TransformerXl, false, false, 0, BiasConvention::AttnUnbiased};
}

Backbone Backbone::opt_style() {
  return {BackboneTag::OptStyle, true, true, 2048, BiasConvention::AttnBiased};
}

Backbone Backbone::defaults_for(BackboneTag tag) {
  switch (tag) {
    case BackboneTag::Gpt2: return gpt2();
    case BackboneTag::TransformerXl: return transformer_xl();
    case BackboneTag::OptStyle: return opt_style();
  }
  throw Error("unknown backbone tag");
}

int default_vocab_size(BackboneTag tag) {
  // BPE vocabulary for the GPT-2 family, word-level WikiText-103 vocabulary
  // for the relative-attention backbone.
  return tag == BackboneTag::TransformerXl ? 267735 : 50257;
}

int grid_count(const Range& r) { return (r.max - r.min) / r.step + 1; }

int grid_value(const Range& r, int idx) { return r.min + idx * r.step; }

bool on_grid(const Range& r, int v) {
  return v >= r.min && v <= r.max && (v - r.min) % r.step == 0;
}

std::optional<int> snap_up(const Range& r, int floor) {
  if (floor <= r.min) return r.min;
  int steps = (floor - r.min + r.step - 1) / r.step;
  int v = r.min + steps * r.step;
  if (v > r.max) return std::nullopt;
  return v;
}

SearchSpace SearchSpace::small_heterogeneous(BackboneTag tag) {
  SearchSpace s;
  s.n_layer_range = {2, 16, 1};
  s.d_model_range = {128, 1024, 64};
  s.d_inner_range = {256, 4096, 64};
  s.n_head_choices = {2, 4, 8};
  s.d_embed_choices = {128, 256, 512};
  s.k_choices = {1, 2, 4};
  s.homogeneous = false;
  s.backbone = tag;
  return s;
}

SearchSpace SearchSpace::wide_homogeneous() {
  SearchSpace s;
  s.n_layer_range = {3, 29, 1};
  s.d_model_range = {512, 1472, 64};
  s.d_inner_range = {512, 6080, 64};
  s.n_head_choices = {2, 4, 8, 16};
  s.homogeneous = true;
  s.fixed_k = 1;
  s.backbone = BackboneTag::OptStyle;
  return s;
}

std::vector<int> dividing_heads(const SearchSpace& space, int d_model) {
  std::vector<int> out;
  for (int h : space.n_head_choices)
    if (h >= 1 && d_model % h == 0) out.push_back(h);
  return out;
}

std::vector<int> feasible_d_inners(const SearchSpace& space, int d_model) {
  std::vector<int> out;
  auto lo = snap_up(space.d_inner_range, 2 * d_model);
  if (!lo) return out;
  for (int v = *lo; v <= space.d_inner_range.max; v += space.d_inner_range.step)
    out.push_back(v);
  return out;
}

std::vector<int> feasible_d_models(const SearchSpace& space) {
  std::vector<int> out;
  for (int i = 0; i < grid_count(space.d_model_range); ++i) {
    int dm = grid_value(space.d_model_range, i);
    if (dividing_heads(space, dm).empty()) continue;
    if (feasible_d_inners(space, dm).empty()) continue;
    out.push_back(dm);
  }
  return out;
}

ArchConfig sample_with(const SearchSpace& space, Rng& rng) {
  auto dms = feasible_d_models(space);
  if (dms.empty()) {
    bool any_heads = false;
    for (int i = 0; i < grid_count(space.d_model_range); ++i)
      if (!dividing_heads(space, grid_value(space.d_model_range, i)).empty())
        any_heads = true;
    throw EmptyFeasibleSet(
        any_heads
            ? "sample: no d_model grid point admits d_inner >= 2*d_model"
            : "sample: no head choice divides any d_model grid point");
  }

  ArchConfig c;
  c.backbone = Backbone::defaults_for(space.backbone);
  c.vocab_size = default_vocab_size(space.backbone);
  c.n_layer = grid_value(space.n_layer_range,
                         static_cast<int>(rng.index(grid_count(space.n_layer_range))));
  c.d_model = rng.pick(dms);

  auto heads = dividing_heads(space, c.d_model);
  auto inners = feasible_d_inners(space, c.d_model);
  if (space.homogeneous) {
    c.n_head.assign(c.n_layer, rng.pick(heads));
    c.d_inner.assign(c.n_layer, rng.pick(inners));
  } else {
    c.n_head.reserve(c.n_layer);
    for (int i = 0; i < c.n_layer; ++i) c.n_head.push_back(rng.pick(heads));
    c.d_inner.reserve(c.n_layer);
    for (int i = 0; i < c.n_layer; ++i) c.d_inner.push_back(rng.pick(inners));
  }

  c.d_embed = space.d_embed_choices.empty() ? c.d_model : rng.pick(space.d_embed_choices);
  if (space.fixed_k)
    c.k_factor = *space.fixed_k;
  else
    c.k_factor = space.k_choices.empty() ? 1 : rng.pick(space.k_choices);
  return c;
}

ArchConfig sample(const SearchSpace& space, std::uint64_t rng_seed) {
  Rng rng(rng_seed);
  return sample_with(space, rng);
}

std::vector<Violation> validate(const ArchConfig& c, const SearchSpace& space) {
  std::vector<Violation> out;
  auto add = [&](std::string field, std::string message) {
    out.push_back({std::move(field), std::move(message)});
  };
  auto field_at = [](const char* name, int i) {
    std::ostringstream os;
    os << name << '[' << i << ']';
    return os.str();
  };

  if (c.n_layer < 1) add("n_layer", "must be >= 1");
  if (c.d_model < 1) add("d_model", "must be >= 1");
  if (c.d_embed < 1) add("d_embed", "must be >= 1");
  if (c.k_factor < 1) add("k_factor", "must be >= 1");
  if (c.vocab_size < 1) add("vocab_size", "must be >= 1");
  if (c.backbone.include_positional_embedding && c.backbone.max_positions < 1)
    add("backbone.max_positions", "must be >= 1 when positional embedding is on");
  if (c.backbone.tag != space.backbone)
    add("backbone.tag", "does not match the search space backbone");

  if (static_cast<int>(c.n_head.size()) != c.n_layer)
    add("n_head", "list length must equal n_layer");
  if (static_cast<int>(c.d_inner.size()) != c.n_layer)
    add("d_inner", "list length must equal n_layer");

  for (std::size_t i = 0; i < c.n_head.size(); ++i) {
    if (c.n_head[i] < 1) {
      add(field_at("n_head", i), "must be >= 1");
      continue;
    }
    if (c.d_model >= 1 && c.d_model % c.n_head[i] != 0)
      add(field_at("n_head", i), "does not divide d_model");
    if (!std::count(space.n_head_choices.begin(), space.n_head_choices.end(), c.n_head[i]))
      add(field_at("n_head", i), "not in the space's head choices");
  }
  for (std::size_t i = 0; i < c.d_inner.size(); ++i) {
    if (c.d_inner[i] < 2 * c.d_model)
      add(field_at("d_inner", i), "below the 2*d_model floor");
    if (!on_grid(space.d_inner_range, c.d_inner[i]))
      add(field_at("d_inner", i), "not on the space's d_inner grid");
  }

  if (!on_grid(space.n_layer_range, c.n_layer))
    add("n_layer", "not on the space's n_layer grid");
  if (!on_grid(space.d_model_range, c.d_model))
    add("d_model", "not on the space's d_model grid");

  if (space.d_embed_choices.empty()) {
    if (c.d_embed != c.d_model)
      add("d_embed", "must equal d_model in this space");
  } else if (!std::count(space.d_embed_choices.begin(), space.d_embed_choices.end(),
                         c.d_embed)) {
    add("d_embed", "not in the space's d_embed choices");
  }

  if (space.fixed_k) {
    if (c.k_factor != *space.fixed_k) add("k_factor", "space fixes k to another value");
  } else if (space.k_choices.empty()) {
    if (c.k_factor != 1) add("k_factor", "must be 1 in this space");
  } else if (!std::count(space.k_choices.begin(), space.k_choices.end(), c.k_factor)) {
    add("k_factor", "not in the space's k choices");
  }

  if (space.homogeneous) {
    if (std::adjacent_find(c.n_head.begin(), c.n_head.end(), std::not_equal_to<>()) !=
        c.n_head.end())
      add("n_head", "homogeneous space requires one repeated value");
    if (std::adjacent_find(c.d_inner.begin(), c.d_inner.end(), std::not_equal_to<>()) !=
        c.d_inner.end())
      add("d_inner", "homogeneous space requires one repeated value");
  }
  return out;
}

double aspect_ratio(const ArchConfig& c) {
  return static_cast<double>(c.d_model) / static_cast<double>(c.n_layer);
}

std::string canonical_json(const ArchConfig& c) {
  // nlohmann objects keep keys in std::map order, so dump() is already the
  // canonical sorted compact form; the config holds no floating point, so
  // the text is identical on every platform.
  nlohmann::json j = c;
  return j.dump();
}

std::string config_key(const ArchConfig& c) { return sha256_hex(canonical_json(c)); }

const char* to_string(BackboneTag tag) {
  switch (tag) {
    case BackboneTag::Gpt2: return "Gpt2";
    case BackboneTag::TransformerXl: return "TransformerXl";
    case BackboneTag::OptStyle: return "OptStyle";
  }
  return "?";
}

const char* to_string(BiasConvention c) {
  return c == BiasConvention::AttnBiased ? "AttnBiased" : "AttnUnbiased";
}

BackboneTag backbone_tag_from_string(const std::string& s) {
  if (s == "Gpt2") return BackboneTag::Gpt2;
  if (s == "TransformerXl") return BackboneTag::TransformerXl;
  if (s == "OptStyle") return BackboneTag::OptStyle;
  throw ParseError("unknown backbone tag '" + s + "'");
}

BiasConvention bias_convention_from_string(const std::string& s) {
  if (s == "AttnBiased") return BiasConvention::AttnBiased;
  if (s == "AttnUnbiased") return BiasConvention::AttnUnbiased;
  throw ParseError("unknown bias convention '" + s + "'");
}

void to_json(nlohmann::json& j, const Backbone& b) {
  j = nlohmann::json{{"tag", to_string(b.tag)},
                     {"include_final_layernorm", b.include_final_layernorm},
                     {"include_positional_embedding", b.include_positional_embedding},
                     {"max_positions", b.max_positions},
                     {"bias_convention", to_string(b.bias_convention)}};
}

void from_json(const nlohmann::json& j, Backbone& b) {
  b.tag = backbone_tag_from_string(j.at("tag").get<std::string>());
  Backbone defaults = Backbone::defaults_for(b.tag);
  b.include_final_layernorm =
      j.value("include_final_layernorm", defaults.include_final_layernorm);
  b.include_positional_embedding =
      j.value("include_positional_embedding", defaults.include_positional_embedding);
  b.max_positions = j.value("max_positions", defaults.max_positions);
  b.bias_convention = j.contains("bias_convention")
                          ? bias_convention_from_string(j.at("bias_convention"))
                          : defaults.bias_convention;
}

void to_json(nlohmann::json& j, const ArchConfig& c) {
  j = nlohmann::json{{"backbone", c.backbone}, {"n_layer", c.n_layer},
                     {"d_model", c.d_model},   {"d_embed", c.d_embed},
                     {"k_factor", c.k_factor}, {"n_head", c.n_head},
                     {"d_inner", c.d_inner},   {"vocab_size", c.vocab_size}};
}

namespace {

// n_head and d_inner accept either a full list or a scalar shorthand that
// repeats across all layers.
std::vector<int> int_list(const nlohmann::json& j, int n_layer) {
  if (j.is_number_integer()) return std::vector<int>(n_layer, j.get<int>());
  return j.get<std::vector<int>>();
}

}  // namespace

void from_json(const nlohmann::json& j, ArchConfig& c) {
  const auto& bj = j.at("backbone");
  if (bj.is_string())
    c.backbone = Backbone::defaults_for(backbone_tag_from_string(bj.get<std::string>()));
  else
    c.backbone = bj.get<Backbone>();
  c.n_layer = j.at("n_layer").get<int>();
  c.d_model = j.at("d_model").get<int>();
  c.d_embed = j.value("d_embed", c.d_model);
  c.k_factor = j.value("k_factor", 1);
  c.n_head = int_list(j.at("n_head"), c.n_layer);
  c.d_inner = int_list(j.at("d_inner"), c.n_layer);
  c.vocab_size = j.value("vocab_size", default_vocab_size(c.backbone.tag));
}

void to_json(nlohmann::json& j, const Range& r) {
  j = nlohmann::json{{"min", r.min}, {"max", r.max}, {"step", r.step}};
}

void from_json(const nlohmann::json& j, Range& r) {
  r.min = j.at("min").get<int>();
  r.max = j.at("max").get<int>();
  r.step = j.value("step", 1);
}

void to_json(nlohmann::json& j, const SearchSpace& s) {
  j = nlohmann::json{{"n_layer_range", s.n_layer_range},
                     {"d_model_range", s.d_model_range},
                     {"d_inner_range", s.d_inner_range},
                     {"n_head_choices", s.n_head_choices},
                     {"d_embed_choices", s.d_embed_choices},
                     {"k_choices", s.k_choices},
                     {"homogeneous", s.homogeneous},
                     {"backbone", to_string(s.backbone)}};
  if (s.fixed_k)
    j["fixed_k"] = *s.fixed_k;
  else
    j["fixed_k"] = nullptr;
}

void from_json(const nlohmann::json& j, SearchSpace& s) {
  s.n_layer_range = j.at("n_layer_range").get<Range>();
  s.d_model_range = j.at("d_model_range").get<Range>();
  s.d_inner_range = j.at("d_inner_range").get<Range>();
  s.n_head_choices = j.at("n_head_choices").get<std::vector<int>>();
  s.d_embed_choices = j.value("d_embed_choices", std::vector<int>{});
  s.k_choices = j.value("k_choices", std::vector<int>{});
  s.homogeneous = j.value("homogeneous", false);
  s.fixed_k = std::nullopt;
  if (j.contains("fixed_k") && !j.at("fixed_k").is_null())
    s.fixed_k = j.at("fixed_k").get<int>();
  s.backbone = j.contains("backbone")
                   ? backbone_tag_from_string(j.at("backbone").get<std::string>())
                   : BackboneTag::Gpt2;
}

}  // namespace pnas
