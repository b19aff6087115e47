#pragma once

#include <cstdint>
#include <vector>

#include "pnas/arch.hpp"

namespace pnas {

struct ParamBreakdown {
  std::vector<std::int64_t> per_layer;
  std::int64_t decoder_total = 0;
  std::int64_t embedding_total = 0;
  std::int64_t grand_total = 0;
};

// Exact weight count of one decoder layer. Head count only enters the
// divisibility check: splitting d_model across heads never changes the
// number of projection weights. Throws DivisibilityError when d_model is
// not a multiple of n_head_i.
//
// AttnBiased:   4*(d_model^2 + d_model)            attention projections
//             + 2*d_model*d_inner_i + d_inner_i + d_model   feed-forward
//             + 4*d_model                           two LayerNorms
// AttnUnbiased: 5*d_model^2 + 2*d_model             projections + r biases
//             + same feed-forward and LayerNorm terms
std::int64_t count_layer(const Backbone& backbone, int d_model, int n_head_i,
                         int d_inner_i);

// Per-layer counts plus the backbone extras (final LayerNorm, learned
// positional table). Embedding fields are zero here.
ParamBreakdown count_decoder(const ArchConfig& config);

// Banded embedding: vocabulary split at the cutoffs, band j embedded at
// width max(1, d_embed / k^j) with a projection to d_model whenever the
// width differs from d_model.
struct AdaptiveEmbeddingSpec {
  std::vector<int> cutoffs;  // strictly increasing, last entry == vocab_size
  int d_embed = 0;
  int k_factor = 1;
  bool tied_softmax = true;  // untied doubles the whole embedding count

  // Cutoffs {20000, 40000, vocab} (clipped for small vocabularies), width
  // and factor taken from the config, tied.
  static AdaptiveEmbeddingSpec default_for(const ArchConfig& config);
};

// Throws CutoffError on an empty, non-increasing, or wrong-tailed cutoff
// list. For k = 1 with a single band this reduces to a plain embedding
// matrix: vocab_size * d_embed, plus d_embed * d_model only when the two
// widths differ.
std::int64_t count_embedding(const ArchConfig& config,
                             const AdaptiveEmbeddingSpec& spec);

// Full breakdown: decoder plus embedding, grand_total their exact sum.
ParamBreakdown count_total(const ArchConfig& config,
                           const AdaptiveEmbeddingSpec& spec);

}  // namespace pnas
