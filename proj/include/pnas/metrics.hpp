#pragma once

#include <string>
#include <utility>
#include <vector>

namespace pnas {

struct RankedSeries {
  std::vector<double> values;
  std::vector<double> ranks;  // 1-based, ties share the average rank
};

RankedSeries rank_series(const std::vector<double>& values);

// Spearman rank correlation: Pearson correlation of the tie-averaged ranks.
// Throws LengthMismatch for unequal or sub-2 lengths, DegenerateSeries when
// either series is constant.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

// Overlap fraction between the true top m and the proxy top m, where
// m = ceil(top_percent/100 * n). Truth qualities rank low-to-high (think
// perplexity), proxy scores high-to-low; ties broken by id so the result
// never depends on input order. Throws IdMismatch when the two id sets
// differ (duplicates count as a mismatch).
double common_ratio(const std::vector<std::pair<std::string, double>>& truth_by_id,
                    const std::vector<std::pair<std::string, double>>& proxy_by_id,
                    double top_percent);

// 2^cross_entropy_bits.
double perplexity(double cross_entropy_bits);

// One benchmark entry bucketed along some axis (usually latency or
// parameter count) for per-regime rank-correlation reporting.
struct BinSample {
  double axis_value = 0.0;
  double truth_quality = 0.0;  // lower is better
  double proxy_score = 0.0;    // higher is better
};

struct BinReport {
  double lo = 0.0;
  double hi = 0.0;
  int count = 0;
  double src = 0.0;
};

// Splits samples into [edges[i], edges[i+1]) bins (the last bin includes its
// upper edge) and reports the Spearman correlation between proxy score and
// negated truth quality inside each. Samples outside [edges.front(),
// edges.back()] are ignored. Edges must be strictly increasing with at
// least two entries. Throws EmptyBin when a bin holds fewer than two
// samples.
std::vector<BinReport> src_by_bins(const std::vector<BinSample>& samples,
                                   const std::vector<double>& edges);

}  // namespace pnas
