#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pnas/rng.hpp"

namespace pnas {

enum class BackboneTag { Gpt2, TransformerXl, OptStyle };

// AttnBiased: four biased square attention projections (QKV fused or not,
// the count is the same). AttnUnbiased: five unbiased square projections
// (separate Q/K/V/R/out) plus two global content/position bias vectors.
enum class BiasConvention { AttnBiased, AttnUnbiased };

struct Backbone {
  BackboneTag tag = BackboneTag::Gpt2;
  bool include_final_layernorm = true;
  bool include_positional_embedding = false;
  int max_positions = 0;  // learned positions, only when the flag above is set
  BiasConvention bias_convention = BiasConvention::AttnBiased;

  static Backbone gpt2();
  static Backbone transformer_xl();
  static Backbone opt_style();
  static Backbone defaults_for(BackboneTag tag);

  bool operator==(const Backbone&) const = default;
};

int default_vocab_size(BackboneTag tag);

// One decoder stack. Per-layer lists always have n_layer entries, also in
// homogeneous mode where every entry repeats the same value.
struct ArchConfig {
  Backbone backbone;
  int n_layer = 0;
  int d_model = 0;
  int d_embed = 0;
  int k_factor = 1;  // adaptive-embedding band shrink factor
  std::vector<int> n_head;
  std::vector<int> d_inner;
  int vocab_size = 0;

  bool operator==(const ArchConfig&) const = default;
};

// Inclusive integer grid {min, min+step, ..., max}; max is assumed to be on
// the grid.
struct Range {
  int min = 0;
  int max = 0;
  int step = 1;

  bool operator==(const Range&) const = default;
};

int grid_count(const Range& r);
int grid_value(const Range& r, int idx);
bool on_grid(const Range& r, int v);
// Smallest grid value >= floor, or nullopt when the grid tops out below it.
std::optional<int> snap_up(const Range& r, int floor);

struct SearchSpace {
  Range n_layer_range;
  Range d_model_range;
  Range d_inner_range;
  std::vector<int> n_head_choices;
  // Empty means d_embed is tied to d_model (the wide-model spaces use this).
  std::vector<int> d_embed_choices;
  std::vector<int> k_choices;  // empty with no fixed_k means k = 1
  bool homogeneous = false;
  std::optional<int> fixed_k;
  BackboneTag backbone = BackboneTag::Gpt2;

  // The small heterogeneous space: 2-16 layers, widths 128-1024.
  static SearchSpace small_heterogeneous(BackboneTag tag);
  // The wide space used with the positional-embedding backbone: 3-29 layers,
  // widths 512-1472, d_embed tied, k fixed at 1.
  static SearchSpace wide_homogeneous();

  bool operator==(const SearchSpace&) const = default;
};

struct Violation {
  std::string field;
  std::string message;
};

// Checks both the config's internal invariants (list lengths, divisibility,
// width floors) and membership in the space's grids and choice sets.
// Empty result means valid.
std::vector<Violation> validate(const ArchConfig& config, const SearchSpace& space);

// Draws one valid config. Pure function of (space, seed): gene order is
// fixed as n_layer, d_model, per-layer n_head, per-layer d_inner, d_embed,
// k. Throws EmptyFeasibleSet when constraints rule out every grid point.
ArchConfig sample(const SearchSpace& space, std::uint64_t rng_seed);
// Same draw fed from a live generator; run_search threads one rng through
// all its sampling.
ArchConfig sample_with(const SearchSpace& space, Rng& rng);

// Width-to-depth ratio d_model / n_layer as an IEEE double.
double aspect_ratio(const ArchConfig& config);

// Canonical serialization (alphabetically sorted keys, no whitespace) and
// its SHA-256. The key is the identity used for deduplication and for cost
// table rows.
std::string canonical_json(const ArchConfig& config);
std::string config_key(const ArchConfig& config);

// Sampling building blocks, shared with mutation/crossover repair.
// d_model grid points with at least one dividing head choice and a
// satisfiable d_inner floor.
std::vector<int> feasible_d_models(const SearchSpace& space);
// Head choices dividing the given width.
std::vector<int> dividing_heads(const SearchSpace& space, int d_model);
// The d_inner grid restricted to values >= max(2*d_model, grid min).
std::vector<int> feasible_d_inners(const SearchSpace& space, int d_model);

const char* to_string(BackboneTag tag);
const char* to_string(BiasConvention c);
BackboneTag backbone_tag_from_string(const std::string& s);
BiasConvention bias_convention_from_string(const std::string& s);

void to_json(nlohmann::json& j, const Backbone& b);
void from_json(const nlohmann::json& j, Backbone& b);
void to_json(nlohmann::json& j, const ArchConfig& c);
void from_json(const nlohmann::json& j, ArchConfig& c);
void to_json(nlohmann::json& j, const Range& r);
void from_json(const nlohmann::json& j, Range& r);
void to_json(nlohmann::json& j, const SearchSpace& s);
void from_json(const nlohmann::json& j, SearchSpace& s);

}  // namespace pnas
