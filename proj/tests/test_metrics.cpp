#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "pnas/errors.hpp"
#include "pnas/metrics.hpp"
#include "pnas/rng.hpp"

using namespace pnas;

namespace {

// O(n^2) tie-averaged ranks: for each element, count strictly smaller ones
// and equal ones, rank = smaller + (equal + 1) / 2. No sorting shared with
// the library implementation.
std::vector<double> slow_ranks(const std::vector<double>& v) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    int smaller = 0;
    int equal = 0;
    for (double u : v) {
      if (u < v[i]) ++smaller;
      if (u == v[i]) ++equal;
    }
    out[i] = smaller + (equal + 1) / 2.0;
  }
  return out;
}

double slow_pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  double ma = 0.0;
  double mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double cov = 0.0;
  double va = 0.0;
  double vb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    cov += (a[i] - ma) * (b[i] - mb);
    va += (a[i] - ma) * (a[i] - ma);
    vb += (b[i] - mb) * (b[i] - mb);
  }
  return cov / std::sqrt(va * vb);
}

double slow_spearman(const std::vector<double>& x, const std::vector<double>& y) {
  return slow_pearson(slow_ranks(x), slow_ranks(y));
}

}  // namespace

TEST_CASE("rank series averages ties") {
  const RankedSeries r = rank_series({10.0, 20.0, 20.0, 30.0});
  CHECK(r.ranks == std::vector<double>{1.0, 2.5, 2.5, 4.0});
  const RankedSeries all_tied = rank_series({5.0, 5.0, 5.0});
  CHECK(all_tied.ranks == std::vector<double>{2.0, 2.0, 2.0});
  const RankedSeries single = rank_series({7.0});
  CHECK(single.ranks == std::vector<double>{1.0});
}

TEST_CASE("spearman hand cases") {
  CHECK(spearman({1, 2, 3, 4, 5}, {10, 20, 30, 40, 50}) == doctest::Approx(1.0));
  CHECK(spearman({1, 2, 3, 4, 5}, {50, 40, 30, 20, 10}) == doctest::Approx(-1.0));
  // Ranks of x: 1 2 3 4; y: 1 3 4 2. d = 0,-1,-1,2; sum d^2 = 6.
  // rho = 1 - 6*6/(4*15) = 0.4.
  CHECK(spearman({1, 2, 3, 4}, {1, 3, 4, 2}) == doctest::Approx(0.4));
  // x = [1,2,2,3] has tied ranks 1, 2.5, 2.5, 4. Against y = [1,2,3,4]
  // the Pearson of ranks is 3/sqrt(10).
  CHECK(spearman({1, 2, 2, 3}, {1, 2, 3, 4}) ==
        doctest::Approx(0.9486832980505138).epsilon(1e-12));
  // Permutation-invariant: shuffling the pairs together changes nothing.
  CHECK(spearman({3, 1, 2, 5, 4}, {30, 10, 20, 50, 40}) == doctest::Approx(1.0));
}

TEST_CASE("spearman input validation") {
  CHECK_THROWS_AS(spearman({1, 2}, {1, 2, 3}), LengthMismatch);
  CHECK_THROWS_AS(spearman({}, {}), LengthMismatch);
  CHECK_THROWS_AS(spearman({1}, {1}), LengthMismatch);
  CHECK_THROWS_AS(spearman({1, 1, 1}, {1, 2, 3}), DegenerateSeries);
  CHECK_THROWS_AS(spearman({1, 2, 3}, {4, 4, 4}), DegenerateSeries);
}

TEST_CASE("spearman matches a brute force oracle") {
  Rng rng(101);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + static_cast<int>(rng.index(40));
    std::vector<double> x(n);
    std::vector<double> y(n);
    bool x_const = true;
    bool y_const = true;
    for (int i = 0; i < n; ++i) {
      // Small integer ranges force heavy ties.
      x[i] = static_cast<double>(rng.index(6));
      y[i] = static_cast<double>(rng.index(6));
      if (x[i] != x[0]) x_const = false;
      if (y[i] != y[0]) y_const = false;
    }
    if (x_const || y_const) {
      CHECK_THROWS_AS(spearman(x, y), DegenerateSeries);
      continue;
    }
    CHECK(spearman(x, y) == doctest::Approx(slow_spearman(x, y)).epsilon(1e-12));
  }
}

TEST_CASE("common ratio hand cases") {
  using Entry = std::pair<std::string, double>;
  // Truth low-is-good, proxy high-is-good. ids a..e.
  const std::vector<Entry> truth{{"a", 1.0}, {"b", 2.0}, {"c", 3.0}, {"d", 4.0}, {"e", 5.0}};
  const std::vector<Entry> agree{{"a", 50.0}, {"b", 40.0}, {"c", 30.0}, {"d", 20.0}, {"e", 10.0}};
  CHECK(common_ratio(truth, agree, 20.0) == doctest::Approx(1.0));
  CHECK(common_ratio(truth, agree, 100.0) == doctest::Approx(1.0));

  const std::vector<Entry> disagree{{"a", 10.0}, {"b", 20.0}, {"c", 30.0}, {"d", 40.0}, {"e", 50.0}};
  // top 20% = 1 entry: truth picks a, proxy picks e.
  CHECK(common_ratio(truth, disagree, 20.0) == doctest::Approx(0.0));
  // top 40% = 2 entries: {a,b} vs {e,d} still disjoint.
  CHECK(common_ratio(truth, disagree, 40.0) == doctest::Approx(0.0));
  // top 60% = 3: {a,b,c} vs {e,d,c} share c.
  CHECK(common_ratio(truth, disagree, 60.0) == doctest::Approx(1.0 / 3.0));

  const std::vector<Entry> partial{{"a", 40.0}, {"b", 50.0}, {"c", 10.0}, {"d", 30.0}, {"e", 20.0}};
  // proxy order: b a d e c. top 40% = 2: truth {a,b}, proxy {b,a}.
  CHECK(common_ratio(truth, partial, 40.0) == doctest::Approx(1.0));
  // top 60% = 3: truth {a,b,c}, proxy {b,a,d} -> 2/3.
  CHECK(common_ratio(truth, partial, 60.0) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("common ratio rounds the cut upward") {
  using Entry = std::pair<std::string, double>;
  std::vector<Entry> truth;
  std::vector<Entry> proxy;
  for (int i = 0; i < 7; ++i) {
    const std::string id(1, static_cast<char>('a' + i));
    truth.push_back({id, static_cast<double>(i)});
    proxy.push_back({id, static_cast<double>(-i)});
  }
  // ceil(0.10 * 7) = 1, ceil(0.30 * 7) = 3, ceil(0.50 * 7) = 4.
  CHECK(common_ratio(truth, proxy, 10.0) == doctest::Approx(1.0));
  CHECK(common_ratio(truth, proxy, 30.0) == doctest::Approx(1.0));
  CHECK(common_ratio(truth, proxy, 50.0) == doctest::Approx(1.0));
}

TEST_CASE("common ratio breaks ties by id") {
  using Entry = std::pair<std::string, double>;
  // All truth values equal: the top-1 pick must be the smallest id
  // regardless of input order.
  const std::vector<Entry> t1{{"b", 1.0}, {"a", 1.0}, {"c", 1.0}};
  const std::vector<Entry> t2{{"c", 1.0}, {"b", 1.0}, {"a", 1.0}};
  const std::vector<Entry> p{{"a", 9.0}, {"b", 5.0}, {"c", 1.0}};
  CHECK(common_ratio(t1, p, 33.0) == common_ratio(t2, p, 33.0));
  // Tied proxy too: everything is deterministic on ids alone.
  const std::vector<Entry> p_tied{{"c", 2.0}, {"a", 2.0}, {"b", 2.0}};
  CHECK(common_ratio(t1, p_tied, 33.0) == doctest::Approx(1.0));
}

TEST_CASE("common ratio rejects mismatched id sets") {
  using Entry = std::pair<std::string, double>;
  const std::vector<Entry> truth{{"a", 1.0}, {"b", 2.0}};
  CHECK_THROWS_AS(common_ratio(truth, {{"a", 1.0}, {"c", 2.0}}, 50.0), IdMismatch);
  CHECK_THROWS_AS(common_ratio(truth, {{"a", 1.0}}, 50.0), IdMismatch);
  CHECK_THROWS_AS(common_ratio(truth, {{"a", 1.0}, {"a", 2.0}}, 50.0), IdMismatch);
  CHECK_THROWS_AS(
      common_ratio({{"a", 1.0}, {"a", 2.0}}, {{"a", 1.0}, {"a", 2.0}}, 50.0),
      IdMismatch);
}

TEST_CASE("perplexity is two to the bits") {
  CHECK(perplexity(10.0) == doctest::Approx(1024.0).epsilon(1e-12));
  CHECK(perplexity(0.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(perplexity(std::log2(50257.0)) == doctest::Approx(50257.0).epsilon(1e-9));
  CHECK(perplexity(-1.0) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("src by bins three bin hand case") {
  std::vector<BinSample> samples;
  // Bin [0,10): proxy tracks negated truth perfectly.
  samples.push_back({1.0, 5.0, 1.0});
  samples.push_back({2.0, 4.0, 2.0});
  samples.push_back({3.0, 3.0, 3.0});
  // Bin [10,20): perfectly anti-correlated.
  samples.push_back({11.0, 1.0, 1.0});
  samples.push_back({12.0, 2.0, 2.0});
  samples.push_back({13.0, 3.0, 3.0});
  // Bin [20,30]: mixed, rho computed by the oracle below.
  samples.push_back({21.0, 1.0, 3.0});
  samples.push_back({25.0, 2.0, 1.0});
  samples.push_back({30.0, 3.0, 2.0});  // upper edge included
  // Outside the edges: ignored.
  samples.push_back({-1.0, 0.0, 0.0});
  samples.push_back({31.0, 0.0, 0.0});

  const auto reports = src_by_bins(samples, {0.0, 10.0, 20.0, 30.0});
  REQUIRE(reports.size() == 3);
  CHECK(reports[0].lo == 0.0);
  CHECK(reports[0].hi == 10.0);
  CHECK(reports[0].count == 3);
  CHECK(reports[0].src == doctest::Approx(1.0));
  CHECK(reports[1].count == 3);
  CHECK(reports[1].src == doctest::Approx(-1.0));
  CHECK(reports[2].count == 3);
  CHECK(reports[2].src ==
        doctest::Approx(slow_spearman({3.0, 1.0, 2.0}, {-1.0, -2.0, -3.0})));
}

TEST_CASE("src by bins edge validation") {
  const std::vector<BinSample> samples{{1.0, 1.0, 2.0}, {2.0, 2.0, 1.0}};
  CHECK_THROWS_AS(src_by_bins(samples, {0.0}), Error);
  CHECK_THROWS_AS(src_by_bins(samples, {}), Error);
  CHECK_THROWS_AS(src_by_bins(samples, {0.0, 0.0}), Error);
  CHECK_THROWS_AS(src_by_bins(samples, {5.0, 1.0}), Error);
}

TEST_CASE("src by bins rejects starved bins") {
  const std::vector<BinSample> samples{
      {1.0, 1.0, 2.0}, {2.0, 2.0, 1.0}, {12.0, 1.0, 1.0}};
  // Second bin has one sample.
  CHECK_THROWS_AS(src_by_bins(samples, {0.0, 10.0, 20.0}), EmptyBin);
  // Empty bin as well.
  CHECK_THROWS_AS(src_by_bins(samples, {0.0, 10.0, 11.0}), EmptyBin);
}

TEST_CASE("src by bins matches whole series spearman on one bin") {
  Rng rng(55);
  std::vector<BinSample> samples;
  std::vector<double> proxy;
  std::vector<double> neg_truth;
  for (int i = 0; i < 60; ++i) {
    BinSample s;
    s.axis_value = static_cast<double>(rng.index(100));
    s.truth_quality = static_cast<double>(rng.index(30));
    s.proxy_score = static_cast<double>(rng.index(30));
    samples.push_back(s);
    proxy.push_back(s.proxy_score);
    neg_truth.push_back(-s.truth_quality);
  }
  const auto reports = src_by_bins(samples, {0.0, 99.0});
  REQUIRE(reports.size() == 1);
  CHECK(reports[0].count == 60);
  CHECK(reports[0].src == doctest::Approx(spearman(proxy, neg_truth)).epsilon(1e-12));
}
