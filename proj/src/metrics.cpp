#include "pnas/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "pnas/errors.hpp"

namespace pnas {

RankedSeries rank_series(const std::vector<double>& values) {
  RankedSeries out;
  out.values = values;
  out.ranks.resize(values.size());
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    // positions i..j (0-based) share the average of ranks i+1..j+1
    double rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) out.ranks[order[k]] = rank;
    i = j + 1;
  }
  return out;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw LengthMismatch("spearman: series must have equal length >= 2");
  RankedSeries rx = rank_series(x);
  RankedSeries ry = rank_series(y);

  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += rx.ranks[i];
    my += ry.ranks[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double dx = rx.ranks[i] - mx;
    double dy = ry.ranks[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0)
    throw DegenerateSeries("spearman: constant series has no rank ordering");
  return sxy / std::sqrt(sxx * syy);
}

double common_ratio(const std::vector<std::pair<std::string, double>>& truth_by_id,
                    const std::vector<std::pair<std::string, double>>& proxy_by_id,
                    double top_percent) {
  if (!(top_percent > 0.0 && top_percent <= 100.0))
    throw Error("common_ratio: top_percent must be in (0, 100]");
  if (truth_by_id.size() != proxy_by_id.size())
    throw IdMismatch("common_ratio: inputs have different sizes");
  if (truth_by_id.empty()) throw IdMismatch("common_ratio: empty input");

  std::set<std::string> truth_ids, proxy_ids;
  for (const auto& [id, q] : truth_by_id) truth_ids.insert(id);
  for (const auto& [id, s] : proxy_by_id) proxy_ids.insert(id);
  if (truth_ids.size() != truth_by_id.size() || truth_ids != proxy_ids)
    throw IdMismatch("common_ratio: id sets differ");

  const std::size_t n = truth_by_id.size();
  const std::size_t m = static_cast<std::size_t>(
      std::ceil(top_percent / 100.0 * static_cast<double>(n)));

  auto top_ids = [m](std::vector<std::pair<std::string, double>> rows, bool low_is_best) {
    std::sort(rows.begin(), rows.end(), [&](const auto& a, const auto& b) {
      if (a.second != b.second)
        return low_is_best ? a.second < b.second : a.second > b.second;
      return a.first < b.first;
    });
    std::set<std::string> ids;
    for (std::size_t i = 0; i < m; ++i) ids.insert(rows[i].first);
    return ids;
  };

  std::set<std::string> truth_top = top_ids(truth_by_id, true);
  std::set<std::string> proxy_top = top_ids(proxy_by_id, false);
  std::size_t common = 0;
  for (const auto& id : truth_top) common += proxy_top.count(id);
  return static_cast<double>(common) / static_cast<double>(m);
}

double perplexity(double cross_entropy_bits) { return std::exp2(cross_entropy_bits); }

std::vector<BinReport> src_by_bins(const std::vector<BinSample>& samples,
                                   const std::vector<double>& edges) {
  if (edges.size() < 2) throw Error("src_by_bins: need at least two bin edges");
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (!(edges[i] > edges[i - 1]))
      throw Error("src_by_bins: edges must be strictly increasing");
  }
  const std::size_t n_bins = edges.size() - 1;
  std::vector<std::vector<const BinSample*>> bins(n_bins);
  for (const BinSample& s : samples) {
    if (s.axis_value < edges.front() || s.axis_value > edges.back()) continue;
    // upper_bound - 1 maps edge values to the bin they open; the top edge
    // closes the last bin instead of opening a new one.
    std::size_t b = static_cast<std::size_t>(
        std::upper_bound(edges.begin(), edges.end(), s.axis_value) - edges.begin());
    b = (b == 0) ? 0 : b - 1;
    if (b >= n_bins) b = n_bins - 1;
    bins[b].push_back(&s);
  }
  std::vector<BinReport> out;
  out.reserve(n_bins);
  for (std::size_t b = 0; b < n_bins; ++b) {
    if (bins[b].size() < 2) {
      throw EmptyBin("src_by_bins: bin [" + std::to_string(edges[b]) + ", " +
                     std::to_string(edges[b + 1]) + "] holds " +
                     std::to_string(bins[b].size()) + " samples, need >= 2");
    }
    std::vector<double> proxy;
    std::vector<double> neg_truth;
    proxy.reserve(bins[b].size());
    neg_truth.reserve(bins[b].size());
    for (const BinSample* s : bins[b]) {
      proxy.push_back(s->proxy_score);
      neg_truth.push_back(-s->truth_quality);
    }
    BinReport rep;
    rep.lo = edges[b];
    rep.hi = edges[b + 1];
    rep.count = static_cast<int>(bins[b].size());
    rep.src = spearman(proxy, neg_truth);
    out.push_back(rep);
  }
  return out;
}

}  // namespace pnas
