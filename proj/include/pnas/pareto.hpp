#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

namespace pnas {

// One candidate in objective space: score is maximized (bigger proxy value
// is better), latency and memory are minimized. The payload is an opaque
// identity (config key) carried through untouched.
struct ObjectivePoint {
  double score = 0.0;
  double latency_ms = 0.0;
  double peak_memory_bytes = 0.0;
  std::string payload;
};

enum class FrontierMode { NonDominated, LowerConvexHull };

struct Frontier {
  FrontierMode mode = FrontierMode::NonDominated;
  std::vector<ObjectivePoint> points;
};

// a dominates b: no objective worse, at least one strictly better.
// Comparisons are exact IEEE. eps > 0 loosens only the "no worse" side by
// an additive margin (for noisy measured costs); strictness stays exact.
bool dominates(const ObjectivePoint& a, const ObjectivePoint& b, double eps = 0.0);

// Maximal points under the dominance order, in input order. Exact
// duplicates never dominate each other, so they are all retained. The
// eps = 0 path runs a sort-and-staircase sweep; eps-dominance is not
// transitive, so eps != 0 falls back to the pairwise definition.
std::vector<ObjectivePoint> non_dominated(const std::vector<ObjectivePoint>& points,
                                          double eps = 0.0);

// Lower convex hull in (latency, memory, -score) space, i.e. the subset of
// the non-dominated points that is also extreme for the convexified
// problem. Computed over the non-dominated set, so the subset property
// holds by construction. Degenerate inputs keep their extreme points only:
// a single location, segment endpoints, or planar hull vertices; when one
// objective is constant the problem reduces to the classic 2-D lower
// chain. Full 3-D inputs keep the hull vertices that minimize some
// nonnegative nonzero weighting of the objectives (normal-cone test, which
// also catches vertices whose incident facets all have mixed-sign
// normals). Geometry runs on unit-box-rescaled coordinates with small
// documented tolerances; exactly coincident locations share one fate.
std::vector<ObjectivePoint> lower_convex_hull(const std::vector<ObjectivePoint>& points);

Frontier extract_frontier(const std::vector<ObjectivePoint>& points, FrontierMode mode);

// Lower chain of the 2-D minimization problem (both coordinates smaller is
// better): the maximal convex sequence from the min-x point to the min-y
// point. Returns indices into pts; dominated points and collinear interior
// points are never on the chain, duplicates of a chain vertex all are.
std::vector<std::size_t> lower_hull_2d(const std::vector<std::array<double, 2>>& pts);

// Volume of objective space dominated by the point set and dominating the
// reference. The reference must be weakly dominated by every input point
// (BadReference otherwise). Empty input gives 0. Computed by sweeping
// score levels and accumulating 2-D staircase areas.
double hypervolume(const std::vector<ObjectivePoint>& points,
                   const ObjectivePoint& reference);

// A point on a quality-vs-latency frontier; quality is positive and lower
// is better (perplexity-like).
struct QualityPoint {
  double latency_ms = 0.0;
  double quality = 0.0;
};

// Mean relative quality gap between a candidate frontier and a reference
// frontier: each candidate point is matched to the reference point with
// the nearest latency (ties to the lower reference quality) and the
// |q - q_ref| / q_ref gaps are averaged. Throws EmptyFrontier when either
// input is empty.
double mean_frontier_distance(const std::vector<QualityPoint>& candidate,
                              const std::vector<QualityPoint>& reference);

}  // namespace pnas
