#include "pnas/proxies.hpp"

#include <cmath>

#include "pnas/errors.hpp"

namespace pnas {

ProxyScore score_decoder_params(const ArchConfig& c) {
  ProxyScore s;
  s.value = static_cast<double>(count_decoder(c).decoder_total);
  s.cost_flops = 0;
  s.proxy_name = "decoder_params";
  return s;
}

ProxyScore score_total_params(const ArchConfig& c,
                              const std::optional<AdaptiveEmbeddingSpec>& spec) {
  const AdaptiveEmbeddingSpec emb = spec ? *spec : AdaptiveEmbeddingSpec::default_for(c);
  ProxyScore s;
  s.value = static_cast<double>(count_decoder(c).decoder_total + count_embedding(c, emb));
  s.cost_flops = 0;
  s.proxy_name = "total_params";
  return s;
}

ProxyScore score_external(const ArchConfig& c, const PluginCommand& plugin) {
  nlohmann::json reply = call_plugin(plugin, nlohmann::json(c));
  if (!reply.contains("value") || !reply["value"].is_number()) {
    throw PluginFailure("proxy reply missing numeric value: " + reply.dump());
  }
  ProxyScore s;
  s.value = reply["value"].get<double>();
  if (reply.contains("cost_flops")) {
    if (!reply["cost_flops"].is_number()) {
      throw PluginFailure("proxy reply has non-numeric cost_flops: " + reply.dump());
    }
    s.cost_flops = std::llround(reply["cost_flops"].get<double>());
  }
  s.proxy_name = plugin.argv.empty() ? "external" : "external:" + plugin.argv.front();
  return s;
}

}  // namespace pnas
