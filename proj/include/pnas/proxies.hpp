#pragma once

#include <optional>
#include <string>

#include "pnas/arch.hpp"
#include "pnas/param_count.hpp"
#include "pnas/plugin.hpp"

namespace pnas {

// Higher value means "predicted better quality". cost_flops is the work the
// proxy itself spent; closed-form parameter counts report 0.
struct ProxyScore {
  double value = 0.0;
  std::int64_t cost_flops = 0;
  std::string proxy_name;
};

ProxyScore score_decoder_params(const ArchConfig& c);

// Decoder plus adaptive embedding parameters; spec defaults to the standard
// cutoffs for the config's vocabulary when absent.
ProxyScore score_total_params(const ArchConfig& c,
                              const std::optional<AdaptiveEmbeddingSpec>& spec = std::nullopt);

// Plugin receives the config JSON and replies {"value": number, "cost_flops": int?}.
ProxyScore score_external(const ArchConfig& c, const PluginCommand& plugin);

}  // namespace pnas
