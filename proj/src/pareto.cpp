#include "pnas/pareto.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "pnas/errors.hpp"

namespace pnas {

bool dominates(const ObjectivePoint& a, const ObjectivePoint& b, double eps) {
  bool no_worse = a.score >= b.score - eps && a.latency_ms <= b.latency_ms + eps &&
                  a.peak_memory_bytes <= b.peak_memory_bytes + eps;
  bool strictly_better = a.score > b.score || a.latency_ms < b.latency_ms ||
                         a.peak_memory_bytes < b.peak_memory_bytes;
  return no_worse && strictly_better;
}

namespace {

// Minimal (latency, memory) pairs seen so far, sorted by latency ascending
// with memory strictly descending. Supports "is the query weakly covered"
// and inserting a new pair.
class Staircase {
 public:
  bool covers(double lat, double mem) const {
    // Entries with latency <= lat have their smallest memory at the
    // rightmost such entry.
    auto it = std::upper_bound(steps_.begin(), steps_.end(), lat,
                               [](double v, const Step& s) { return v < s.lat; });
    if (it == steps_.begin()) return false;
    return std::prev(it)->mem <= mem;
  }

  void insert(double lat, double mem) {
    if (covers(lat, mem)) return;
    auto it = std::lower_bound(steps_.begin(), steps_.end(), lat,
                               [](const Step& s, double v) { return s.lat < v; });
    auto last = it;
    while (last != steps_.end() && last->mem >= mem) ++last;
    it = steps_.erase(it, last);
    steps_.insert(it, {lat, mem});
  }

 private:
  struct Step {
    double lat, mem;
  };
  std::vector<Step> steps_;
};

std::vector<char> dominated_flags_sweep(const std::vector<ObjectivePoint>& pts) {
  const std::size_t n = pts.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (pts[a].score != pts[b].score) return pts[a].score > pts[b].score;
    if (pts[a].latency_ms != pts[b].latency_ms)
      return pts[a].latency_ms < pts[b].latency_ms;
    return pts[a].peak_memory_bytes < pts[b].peak_memory_bytes;
  });

  std::vector<char> dominated(n, 0);
  Staircase stair;
  std::size_t g = 0;
  while (g < n) {
    std::size_t ge = g;
    while (ge + 1 < n && pts[order[ge + 1]].score == pts[order[g]].score) ++ge;
    // Strictly higher-scoring points dominate on a weak (lat, mem) cover.
    for (std::size_t k = g; k <= ge; ++k) {
      const auto& p = pts[order[k]];
      if (stair.covers(p.latency_ms, p.peak_memory_bytes)) dominated[order[k]] = 1;
    }
    // Equal scores dominate only with a strict (lat, mem) improvement.
    for (std::size_t k = g; k <= ge; ++k) {
      if (dominated[order[k]]) continue;
      const auto& p = pts[order[k]];
      for (std::size_t l = g; l <= ge; ++l) {
        if (l == k) continue;
        const auto& q = pts[order[l]];
        if (q.latency_ms <= p.latency_ms &&
            q.peak_memory_bytes <= p.peak_memory_bytes &&
            (q.latency_ms < p.latency_ms ||
             q.peak_memory_bytes < p.peak_memory_bytes)) {
          dominated[order[k]] = 1;
          break;
        }
      }
    }
    // Survivors subsume any dominated group member for later cover checks.
    for (std::size_t k = g; k <= ge; ++k)
      if (!dominated[order[k]])
        stair.insert(pts[order[k]].latency_ms, pts[order[k]].peak_memory_bytes);
    g = ge + 1;
  }
  return dominated;
}

}  // namespace

std::vector<ObjectivePoint> non_dominated(const std::vector<ObjectivePoint>& points,
                                          double eps) {
  std::vector<char> dominated;
  if (eps == 0.0) {
    dominated = dominated_flags_sweep(points);
  } else {
    dominated.assign(points.size(), 0);
    for (std::size_t i = 0; i < points.size(); ++i)
      for (std::size_t j = 0; j < points.size(); ++j)
        if (i != j && dominates(points[j], points[i], eps)) {
          dominated[i] = 1;
          break;
        }
  }
  std::vector<ObjectivePoint> out;
  for (std::size_t i = 0; i < points.size(); ++i)
    if (!dominated[i]) out.push_back(points[i]);
  return out;
}

namespace {

using Vec3 = std::array<double, 3>;

constexpr double kGeomTol = 1e-9;  // on unit-box-rescaled coordinates

double dot(const Vec3& a, const Vec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

Vec3 sub(const Vec3& a, const Vec3& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

// Monotone lower chain over a strict 2-D antichain (x ascending, y
// descending): pops interior collinear points, keeps endpoints.
std::vector<std::size_t> chain_over_antichain(const std::vector<std::array<double, 2>>& p,
                                              const std::vector<std::size_t>& order) {
  auto cross = [&](std::size_t o, std::size_t a, std::size_t b) {
    return (p[a][0] - p[o][0]) * (p[b][1] - p[o][1]) -
           (p[a][1] - p[o][1]) * (p[b][0] - p[o][0]);
  };
  std::vector<std::size_t> hull;
  for (std::size_t idx : order) {
    while (hull.size() >= 2 &&
           cross(hull[hull.size() - 2], hull[hull.size() - 1], idx) <= 0)
      hull.pop_back();
    hull.push_back(idx);
  }
  return hull;
}

// Is some w >= 0 on the weight simplex nonnegative against every
// difference vector? Decided by clipping the simplex (in (w0, w1)
// coordinates, w2 = 1 - w0 - w1) against all half-planes.
bool supported_by_nonnegative_weight(const Vec3& p, const std::vector<Vec3>& others) {
  std::vector<std::array<double, 2>> poly = {{0, 0}, {1, 0}, {0, 1}};
  for (const Vec3& q : others) {
    Vec3 d = sub(q, p);
    double a = d[0] - d[2], b = d[1] - d[2], c = d[2];
    double s = std::max({std::fabs(a), std::fabs(b), std::fabs(c)});
    if (s < 1e-300) continue;
    a /= s;
    b /= s;
    c /= s;
    std::vector<std::array<double, 2>> clipped;
    const double tol = 1e-12;
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const auto& v0 = poly[i];
      const auto& v1 = poly[(i + 1) % poly.size()];
      double f0 = a * v0[0] + b * v0[1] + c;
      double f1 = a * v1[0] + b * v1[1] + c;
      bool in0 = f0 >= -tol, in1 = f1 >= -tol;
      if (in0) clipped.push_back(v0);
      if (in0 != in1) {
        double t = f0 / (f0 - f1);
        clipped.push_back({v0[0] + t * (v1[0] - v0[0]), v0[1] + t * (v1[1] - v0[1])});
      }
    }
    poly = std::move(clipped);
    if (poly.empty()) return false;
  }
  return true;
}

// Distance from p to the convex hull of the others, via Wolfe's min-norm
// point algorithm on the translated set. Close-to-zero means p is inside
// or on the hull, i.e. not an extreme point.
double hull_distance(const Vec3& p, const std::vector<Vec3>& others) {
  std::vector<Vec3> d;
  d.reserve(others.size());
  for (const Vec3& q : others) d.push_back(sub(q, p));

  std::vector<std::size_t> corral = {0};
  for (std::size_t i = 1; i < d.size(); ++i)
    if (dot(d[i], d[i]) < dot(d[corral[0]], d[corral[0]])) corral[0] = i;
  std::vector<double> lambda = {1.0};
  Vec3 x = d[corral[0]];

  // Affine min-norm over the corral via the KKT system
  //   [ G  1 ] [alpha]   [0]
  //   [ 1' 0 ] [ mu  ] = [1]
  auto affine_min_norm = [&](const std::vector<std::size_t>& set) {
    const std::size_t m = set.size();
    std::vector<std::vector<double>> A(m + 1, std::vector<double>(m + 2, 0.0));
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) A[i][j] = dot(d[set[i]], d[set[j]]);
      A[i][i] += 1e-12;
      A[i][m] = 1.0;
      A[i][m + 1] = 0.0;
    }
    for (std::size_t j = 0; j < m; ++j) A[m][j] = 1.0;
    A[m][m + 1] = 1.0;
    // Gaussian elimination with partial pivoting on the (m+1) system.
    for (std::size_t col = 0; col <= m; ++col) {
      std::size_t piv = col;
      for (std::size_t r = col + 1; r <= m; ++r)
        if (std::fabs(A[r][col]) > std::fabs(A[piv][col])) piv = r;
      std::swap(A[col], A[piv]);
      if (std::fabs(A[col][col]) < 1e-300) return std::vector<double>{};
      for (std::size_t r = 0; r <= m; ++r) {
        if (r == col) continue;
        double f = A[r][col] / A[col][col];
        for (std::size_t cc = col; cc <= m + 1; ++cc) A[r][cc] -= f * A[col][cc];
      }
    }
    std::vector<double> alpha(m);
    for (std::size_t i = 0; i < m; ++i) alpha[i] = A[i][m + 1] / A[i][i];
    return alpha;
  };

  for (int iter = 0; iter < 200; ++iter) {
    // Support step: most opposed direction to x.
    std::size_t best = 0;
    double best_val = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < d.size(); ++i) {
      double v = dot(d[i], x);
      if (v < best_val) {
        best_val = v;
        best = i;
      }
    }
    double xx = dot(x, x);
    if (best_val >= xx - kGeomTol * (1.0 + xx)) break;
    if (std::find(corral.begin(), corral.end(), best) == corral.end()) {
      corral.push_back(best);
      lambda.push_back(0.0);
    }

    for (int minor = 0; minor < 50; ++minor) {
      std::vector<double> alpha = affine_min_norm(corral);
      if (alpha.empty()) break;
      bool feasible = true;
      for (double a : alpha)
        if (a < -1e-12) feasible = false;
      if (feasible) {
        lambda = alpha;
        break;
      }
      // Step toward alpha until the first coefficient hits zero, drop it.
      double theta = 1.0;
      for (std::size_t i = 0; i < corral.size(); ++i)
        if (alpha[i] < lambda[i])
          theta = std::min(theta, lambda[i] / (lambda[i] - alpha[i]));
      for (std::size_t i = 0; i < corral.size(); ++i)
        lambda[i] = (1.0 - theta) * lambda[i] + theta * alpha[i];
      for (std::size_t i = corral.size(); i-- > 0;) {
        if (lambda[i] <= 1e-12) {
          corral.erase(corral.begin() + i);
          lambda.erase(lambda.begin() + i);
        }
      }
    }

    x = {0, 0, 0};
    for (std::size_t i = 0; i < corral.size(); ++i) {
      x[0] += lambda[i] * d[corral[i]][0];
      x[1] += lambda[i] * d[corral[i]][1];
      x[2] += lambda[i] * d[corral[i]][2];
    }
  }
  return std::sqrt(dot(x, x));
}

}  // namespace

std::vector<std::size_t> lower_hull_2d(const std::vector<std::array<double, 2>>& pts) {
  if (pts.empty()) return {};
  // Reduce to the strict 2-D minima antichain first; dominated points can
  // never sit on the lower-left chain.
  std::vector<std::size_t> order(pts.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (pts[a][0] != pts[b][0]) return pts[a][0] < pts[b][0];
    return pts[a][1] < pts[b][1];
  });
  std::vector<std::size_t> antichain;
  double best_y = std::numeric_limits<double>::infinity();
  for (std::size_t idx : order) {
    if (!antichain.empty() && pts[idx][0] == pts[antichain.back()][0]) continue;
    if (pts[idx][1] >= best_y) continue;
    antichain.push_back(idx);
    best_y = pts[idx][1];
  }
  std::vector<std::size_t> chain = chain_over_antichain(pts, antichain);

  // Every copy of a chain location is part of the answer.
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t c : chain)
      if (pts[i] == pts[c]) {
        out.push_back(i);
        break;
      }
  return out;
}

std::vector<ObjectivePoint> lower_convex_hull(const std::vector<ObjectivePoint>& points) {
  std::vector<ObjectivePoint> nd = non_dominated(points);
  if (nd.size() <= 1) return nd;

  // Minimization coordinates, deduplicated by exact location.
  std::map<Vec3, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < nd.size(); ++i)
    groups[{nd[i].latency_ms, nd[i].peak_memory_bytes, -nd[i].score}].push_back(i);
  std::vector<Vec3> locs;
  locs.reserve(groups.size());
  for (const auto& [loc, idxs] : groups) locs.push_back(loc);

  std::vector<char> keep_loc(locs.size(), 0);
  if (locs.size() == 1) {
    keep_loc[0] = 1;
  } else {
    // Rescale to the unit box; positive per-axis scaling changes neither
    // dominance, extremeness, nor nonnegative-weight support.
    Vec3 lo = locs[0], hi = locs[0];
    for (const Vec3& v : locs)
      for (int a = 0; a < 3; ++a) {
        lo[a] = std::min(lo[a], v[a]);
        hi[a] = std::max(hi[a], v[a]);
      }
    int const_axis = -1;
    int n_const = 0;
    for (int a = 0; a < 3; ++a)
      if (hi[a] - lo[a] <= 0.0) {
        const_axis = a;
        ++n_const;
      }
    std::vector<Vec3> scaled(locs.size());
    for (std::size_t i = 0; i < locs.size(); ++i)
      for (int a = 0; a < 3; ++a)
        scaled[i][a] = hi[a] > lo[a] ? (locs[i][a] - lo[a]) / (hi[a] - lo[a]) : 0.0;

    if (n_const >= 2) {
      // Two constant objectives and no duplicates would mean a chain of
      // one-axis improvements, impossible within a non-dominated set of
      // more than one location; keep everything defensively.
      std::fill(keep_loc.begin(), keep_loc.end(), 1);
    } else if (n_const == 1) {
      // Constant objective drops out: classic 2-D lower chain.
      std::vector<std::array<double, 2>> flat(locs.size());
      int u = const_axis == 0 ? 1 : 0;
      int v = const_axis == 2 ? 1 : 2;
      for (std::size_t i = 0; i < locs.size(); ++i) flat[i] = {locs[i][u], locs[i][v]};
      for (std::size_t idx : lower_hull_2d(flat)) keep_loc[idx] = 1;
    } else {
      // Affine dimension via Gram-Schmidt on the rescaled differences.
      std::vector<Vec3> basis;
      for (std::size_t i = 1; i < scaled.size() && basis.size() < 3; ++i) {
        Vec3 r = sub(scaled[i], scaled[0]);
        for (const Vec3& b : basis) {
          double c = dot(r, b);
          for (int a = 0; a < 3; ++a) r[a] -= c * b[a];
        }
        double len = std::sqrt(dot(r, r));
        if (len > kGeomTol) {
          for (int a = 0; a < 3; ++a) r[a] /= len;
          basis.push_back(r);
        }
      }

      if (basis.size() <= 1) {
        // Collinear: the two parameter extremes are the extreme points.
        std::size_t lo_i = 0, hi_i = 0;
        for (std::size_t i = 1; i < scaled.size(); ++i) {
          double t = dot(sub(scaled[i], scaled[0]), basis.empty() ? Vec3{1, 0, 0}
                                                                  : basis[0]);
          double tl = dot(sub(scaled[lo_i], scaled[0]),
                          basis.empty() ? Vec3{1, 0, 0} : basis[0]);
          double th = dot(sub(scaled[hi_i], scaled[0]),
                          basis.empty() ? Vec3{1, 0, 0} : basis[0]);
          if (t < tl) lo_i = i;
          if (t > th) hi_i = i;
        }
        keep_loc[lo_i] = keep_loc[hi_i] = 1;
      } else if (basis.size() == 2) {
        // Coplanar but not axis-aligned: keep every vertex of the flat
        // polygon (both chains of the in-plane hull).
        std::vector<std::array<double, 2>> flat(scaled.size());
        for (std::size_t i = 0; i < scaled.size(); ++i) {
          Vec3 r = sub(scaled[i], scaled[0]);
          flat[i] = {dot(r, basis[0]), dot(r, basis[1])};
        }
        std::vector<std::size_t> order(flat.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
          if (flat[a][0] != flat[b][0]) return flat[a][0] < flat[b][0];
          return flat[a][1] < flat[b][1];
        });
        auto cross = [&](std::size_t o, std::size_t a, std::size_t b) {
          return (flat[a][0] - flat[o][0]) * (flat[b][1] - flat[o][1]) -
                 (flat[a][1] - flat[o][1]) * (flat[b][0] - flat[o][0]);
        };
        auto build = [&](bool upper) {
          std::vector<std::size_t> hull;
          for (std::size_t oi = 0; oi < order.size(); ++oi) {
            std::size_t idx = order[upper ? order.size() - 1 - oi : oi];
            while (hull.size() >= 2 &&
                   cross(hull[hull.size() - 2], hull[hull.size() - 1], idx) <= 0)
              hull.pop_back();
            hull.push_back(idx);
          }
          return hull;
        };
        for (std::size_t idx : build(false)) keep_loc[idx] = 1;
        for (std::size_t idx : build(true)) keep_loc[idx] = 1;
      } else {
        // Full-dimensional: keep vertices whose normal cone meets the
        // nonnegative weight simplex.
        for (std::size_t i = 0; i < scaled.size(); ++i) {
          std::vector<Vec3> others;
          others.reserve(scaled.size() - 1);
          for (std::size_t j = 0; j < scaled.size(); ++j)
            if (j != i) others.push_back(scaled[j]);
          if (!supported_by_nonnegative_weight(scaled[i], others)) continue;
          if (hull_distance(scaled[i], others) <= 1e-7) continue;
          keep_loc[i] = 1;
        }
      }
    }
  }

  std::vector<char> keep_nd(nd.size(), 0);
  std::size_t li = 0;
  for (const auto& [loc, idxs] : groups) {
    if (keep_loc[li])
      for (std::size_t idx : idxs) keep_nd[idx] = 1;
    ++li;
  }
  std::vector<ObjectivePoint> out;
  for (std::size_t i = 0; i < nd.size(); ++i)
    if (keep_nd[i]) out.push_back(nd[i]);
  return out;
}

Frontier extract_frontier(const std::vector<ObjectivePoint>& points, FrontierMode mode) {
  Frontier f;
  f.mode = mode;
  f.points = mode == FrontierMode::NonDominated ? non_dominated(points)
                                                : lower_convex_hull(points);
  return f;
}

double hypervolume(const std::vector<ObjectivePoint>& points,
                   const ObjectivePoint& reference) {
  if (points.empty()) return 0.0;
  for (const auto& p : points) {
    if (!(p.score >= reference.score && p.latency_ms <= reference.latency_ms &&
          p.peak_memory_bytes <= reference.peak_memory_bytes)) {
      std::ostringstream msg;
      msg << "hypervolume: point (" << p.score << ", " << p.latency_ms << ", "
          << p.peak_memory_bytes << ") does not dominate the reference";
      throw BadReference(msg.str());
    }
  }
  std::vector<ObjectivePoint> nd = non_dominated(points);

  struct P3 {
    double x, y, z;
  };
  std::vector<P3> pts;
  pts.reserve(nd.size());
  for (const auto& p : nd) pts.push_back({p.latency_ms, p.peak_memory_bytes, -p.score});
  const double X = reference.latency_ms;
  const double Y = reference.peak_memory_bytes;
  const double Z = -reference.score;
  std::sort(pts.begin(), pts.end(), [](const P3& a, const P3& b) { return a.z < b.z; });

  // Area of the union of [x_i, X] x [y_i, Y] over a prefix of points.
  auto prefix_area = [&](std::size_t count) {
    std::vector<std::array<double, 2>> xy(count);
    for (std::size_t i = 0; i < count; ++i) xy[i] = {pts[i].x, pts[i].y};
    std::sort(xy.begin(), xy.end());
    double area = 0.0, cur_y = Y;
    for (const auto& [x, y] : xy) {
      if (y < cur_y) {
        area += (X - x) * (cur_y - y);
        cur_y = y;
      }
    }
    return area;
  };

  double volume = 0.0;
  std::size_t i = 0;
  while (i < pts.size()) {
    std::size_t j = i;
    while (j + 1 < pts.size() && pts[j + 1].z == pts[i].z) ++j;
    double z_next = j + 1 < pts.size() ? pts[j + 1].z : Z;
    volume += prefix_area(j + 1) * (z_next - pts[i].z);
    i = j + 1;
  }
  return volume;
}

double mean_frontier_distance(const std::vector<QualityPoint>& candidate,
                              const std::vector<QualityPoint>& reference) {
  if (candidate.empty() || reference.empty())
    throw EmptyFrontier("mean_frontier_distance: empty frontier");
  for (const auto& r : reference)
    if (!(r.quality > 0.0))
      throw Error("mean_frontier_distance: reference quality must be positive");

  double sum = 0.0;
  for (const auto& c : candidate) {
    const QualityPoint* best = &reference.front();
    double best_gap = std::fabs(reference.front().latency_ms - c.latency_ms);
    for (const auto& r : reference) {
      double gap = std::fabs(r.latency_ms - c.latency_ms);
      if (gap < best_gap || (gap == best_gap && r.quality < best->quality)) {
        best_gap = gap;
        best = &r;
      }
    }
    sum += std::fabs(c.quality - best->quality) / best->quality;
  }
  return sum / static_cast<double>(candidate.size());
}

}  // namespace pnas
