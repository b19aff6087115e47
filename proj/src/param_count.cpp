#include "pnas/param_count.hpp"

#include <algorithm>
#include <sstream>

#include "pnas/errors.hpp"

namespace pnas {

std::int64_t count_layer(const Backbone& backbone, int d_model, int n_head_i,
                         int d_inner_i) {
  if (n_head_i < 1 || d_model % n_head_i != 0) {
    std::ostringstream msg;
    msg << "count_layer: d_model " << d_model << " not divisible by n_head "
        << n_head_i;
    throw DivisibilityError(msg.str());
  }
  const std::int64_t dm = d_model;
  const std::int64_t di = d_inner_i;
  std::int64_t attn;
  if (backbone.bias_convention == BiasConvention::AttnBiased)
    attn = 4 * (dm * dm + dm);
  else
    attn = 5 * dm * dm + 2 * dm;
  const std::int64_t ffn = 2 * dm * di + di + dm;
  const std::int64_t norms = 4 * dm;
  return attn + ffn + norms;
}

ParamBreakdown count_decoder(const ArchConfig& c) {
  ParamBreakdown b;
  b.per_layer.reserve(c.d_inner.size());
  for (std::size_t i = 0; i < c.d_inner.size(); ++i) {
    int head = i < c.n_head.size() ? c.n_head[i] : 1;
    b.per_layer.push_back(count_layer(c.backbone, c.d_model, head, c.d_inner[i]));
    b.decoder_total += b.per_layer.back();
  }
  if (c.backbone.include_final_layernorm) b.decoder_total += 2 * std::int64_t(c.d_model);
  if (c.backbone.include_positional_embedding)
    b.decoder_total += std::int64_t(c.backbone.max_positions) * c.d_model;
  b.grand_total = b.decoder_total;
  return b;
}

AdaptiveEmbeddingSpec AdaptiveEmbeddingSpec::default_for(const ArchConfig& c) {
  AdaptiveEmbeddingSpec spec;
  for (int cut : {20000, 40000})
    if (cut < c.vocab_size) spec.cutoffs.push_back(cut);
  spec.cutoffs.push_back(c.vocab_size);
  spec.d_embed = c.d_embed;
  spec.k_factor = c.k_factor;
  spec.tied_softmax = true;
  return spec;
}

std::int64_t count_embedding(const ArchConfig& c, const AdaptiveEmbeddingSpec& spec) {
  if (spec.cutoffs.empty()) throw CutoffError("count_embedding: empty cutoff list");
  if (spec.cutoffs.front() < 1)
    throw CutoffError("count_embedding: first cutoff must be positive");
  for (std::size_t j = 1; j < spec.cutoffs.size(); ++j)
    if (spec.cutoffs[j] <= spec.cutoffs[j - 1])
      throw CutoffError("count_embedding: cutoffs must be strictly increasing");
  if (spec.cutoffs.back() != c.vocab_size)
    throw CutoffError("count_embedding: last cutoff must equal vocab_size");
  if (spec.d_embed < 1 || spec.k_factor < 1)
    throw CutoffError("count_embedding: d_embed and k_factor must be >= 1");

  std::int64_t total = 0;
  std::int64_t divisor = 1;  // k^j, saturated once it exceeds d_embed
  for (std::size_t j = 0; j < spec.cutoffs.size(); ++j) {
    if (j > 0 && divisor <= spec.d_embed) divisor *= spec.k_factor;
    std::int64_t width = std::max<std::int64_t>(1, spec.d_embed / divisor);
    std::int64_t band = spec.cutoffs[j] - (j ? spec.cutoffs[j - 1] : 0);
    total += band * width;
    if (width != c.d_model) total += width * c.d_model;
  }
  if (!spec.tied_softmax) total *= 2;
  return total;
}

ParamBreakdown count_total(const ArchConfig& c, const AdaptiveEmbeddingSpec& spec) {
  ParamBreakdown b = count_decoder(c);
  b.embedding_total = count_embedding(c, spec);
  b.grand_total = b.decoder_total + b.embedding_total;
  return b;
}

}  // namespace pnas
