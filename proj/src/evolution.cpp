#include "pnas/evolution.hpp"

#include <algorithm>
#include <atomic>
#include <numeric>
#include <thread>
#include <unordered_set>

#include "pnas/errors.hpp"

namespace pnas {

namespace {

bool contains(const std::vector<int>& v, int x) {
  return std::find(v.begin(), v.end(), x) != v.end();
}

// Clamp an inner width onto the grid at or above the 2*d_model floor.
int repair_inner(const SearchSpace& space, int d_model, int inner) {
  if (inner >= 2 * d_model && on_grid(space.d_inner_range, inner)) return inner;
  auto snapped = snap_up(space.d_inner_range, std::max(2 * d_model, space.d_inner_range.min));
  if (!snapped) {
    throw EmptyFeasibleSet("d_inner grid tops out below 2*d_model = " +
                           std::to_string(2 * d_model));
  }
  return *snapped;
}

Backbone backbone_for(const SearchSpace& space, const ArchConfig& parent) {
  if (parent.backbone.tag == space.backbone) return parent.backbone;
  return Backbone::defaults_for(space.backbone);
}

int vocab_for(const SearchSpace& space, const ArchConfig& parent) {
  if (parent.backbone.tag == space.backbone && parent.vocab_size > 0) return parent.vocab_size;
  return default_vocab_size(space.backbone);
}

}  // namespace

ArchConfig mutate(const ArchConfig& parent, const SearchSpace& space, double prob, Rng& rng) {
  ArchConfig c = parent;
  c.backbone = backbone_for(space, parent);
  c.vocab_size = vocab_for(space, parent);

  if (rng.bernoulli(prob)) {
    c.n_layer = grid_value(space.n_layer_range,
                           static_cast<int>(rng.index(
                               static_cast<std::size_t>(grid_count(space.n_layer_range)))));
  }
  const std::vector<int> dms = feasible_d_models(space);
  if (rng.bernoulli(prob)) c.d_model = rng.pick(dms);
  if (!contains(dms, c.d_model)) c.d_model = rng.pick(dms);

  const std::vector<int> heads = dividing_heads(space, c.d_model);
  const std::vector<int> inners = feasible_d_inners(space, c.d_model);
  const std::size_t n = static_cast<std::size_t>(c.n_layer);

  if (space.homogeneous) {
    int head = parent.n_head.empty() ? heads.front() : parent.n_head.front();
    if (rng.bernoulli(prob)) head = rng.pick(heads);
    if (!contains(heads, head)) head = rng.pick(heads);
    int inner = parent.d_inner.empty() ? inners.front() : parent.d_inner.front();
    if (rng.bernoulli(prob)) inner = rng.pick(inners);
    inner = repair_inner(space, c.d_model, inner);
    c.n_head.assign(n, head);
    c.d_inner.assign(n, inner);
  } else {
    c.n_head.resize(n);
    c.d_inner.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (i < parent.n_head.size()) {
        int h = parent.n_head[i];
        if (rng.bernoulli(prob)) h = rng.pick(heads);
        if (!contains(heads, h)) h = rng.pick(heads);
        c.n_head[i] = h;
      } else {
        c.n_head[i] = rng.pick(heads);
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i < parent.d_inner.size()) {
        int v = parent.d_inner[i];
        if (rng.bernoulli(prob)) v = rng.pick(inners);
        c.d_inner[i] = repair_inner(space, c.d_model, v);
      } else {
        c.d_inner[i] = rng.pick(inners);
      }
    }
  }

  if (space.d_embed_choices.empty()) {
    c.d_embed = c.d_model;
  } else {
    if (rng.bernoulli(prob)) c.d_embed = rng.pick(space.d_embed_choices);
    if (!contains(space.d_embed_choices, c.d_embed)) c.d_embed = rng.pick(space.d_embed_choices);
  }

  if (space.fixed_k) {
    c.k_factor = *space.fixed_k;
  } else if (space.k_choices.empty()) {
    c.k_factor = 1;
  } else {
    if (rng.bernoulli(prob)) c.k_factor = rng.pick(space.k_choices);
    if (!contains(space.k_choices, c.k_factor)) c.k_factor = rng.pick(space.k_choices);
  }
  return c;
}

ArchConfig crossover(const ArchConfig& a, const ArchConfig& b, const SearchSpace& space,
                     Rng& rng) {
  auto take_a = [&rng]() { return rng.index(2) == 0; };

  ArchConfig c;
  c.backbone = backbone_for(space, a);
  c.vocab_size = vocab_for(space, a);
  c.n_layer = take_a() ? a.n_layer : b.n_layer;
  c.d_model = take_a() ? a.d_model : b.d_model;
  const std::vector<int> dms = feasible_d_models(space);
  if (!contains(dms, c.d_model)) c.d_model = rng.pick(dms);

  const std::vector<int> heads = dividing_heads(space, c.d_model);
  const std::vector<int> inners = feasible_d_inners(space, c.d_model);
  const std::size_t n = static_cast<std::size_t>(c.n_layer);

  auto fix_head = [&](int primary, int other) {
    if (contains(heads, primary)) return primary;
    if (contains(heads, other)) return other;
    return rng.pick(heads);
  };
  auto fix_inner = [&](int primary, int other) {
    auto ok = [&](int v) { return v >= 2 * c.d_model && on_grid(space.d_inner_range, v); };
    if (ok(primary)) return primary;
    if (ok(other)) return other;
    return repair_inner(space, c.d_model, primary);
  };

  c.n_head.resize(n);
  c.d_inner.resize(n);
  if (space.homogeneous) {
    const int ha = a.n_head.empty() ? heads.front() : a.n_head.front();
    const int hb = b.n_head.empty() ? heads.front() : b.n_head.front();
    const bool th = take_a();
    const int head = fix_head(th ? ha : hb, th ? hb : ha);
    const int ia = a.d_inner.empty() ? inners.front() : a.d_inner.front();
    const int ib = b.d_inner.empty() ? inners.front() : b.d_inner.front();
    const bool ti = take_a();
    const int inner = fix_inner(ti ? ia : ib, ti ? ib : ia);
    std::fill(c.n_head.begin(), c.n_head.end(), head);
    std::fill(c.d_inner.begin(), c.d_inner.end(), inner);
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      const bool has_a = i < a.n_head.size();
      const bool has_b = i < b.n_head.size();
      int primary;
      int other;
      if (has_a && has_b) {
        const bool t = take_a();
        primary = t ? a.n_head[i] : b.n_head[i];
        other = t ? b.n_head[i] : a.n_head[i];
      } else if (has_a || has_b) {
        primary = other = has_a ? a.n_head[i] : b.n_head[i];
      } else {
        primary = other = heads.front();
      }
      c.n_head[i] = fix_head(primary, other);
    }
    for (std::size_t i = 0; i < n; ++i) {
      const bool has_a = i < a.d_inner.size();
      const bool has_b = i < b.d_inner.size();
      int primary;
      int other;
      if (has_a && has_b) {
        const bool t = take_a();
        primary = t ? a.d_inner[i] : b.d_inner[i];
        other = t ? b.d_inner[i] : a.d_inner[i];
      } else if (has_a || has_b) {
        primary = other = has_a ? a.d_inner[i] : b.d_inner[i];
      } else {
        primary = other = inners.front();
      }
      c.d_inner[i] = fix_inner(primary, other);
    }
  }

  if (space.d_embed_choices.empty()) {
    c.d_embed = c.d_model;
  } else {
    const bool t = take_a();
    const int primary = t ? a.d_embed : b.d_embed;
    const int other = t ? b.d_embed : a.d_embed;
    if (contains(space.d_embed_choices, primary)) {
      c.d_embed = primary;
    } else if (contains(space.d_embed_choices, other)) {
      c.d_embed = other;
    } else {
      c.d_embed = rng.pick(space.d_embed_choices);
    }
  }

  if (space.fixed_k) {
    c.k_factor = *space.fixed_k;
  } else if (space.k_choices.empty()) {
    c.k_factor = 1;
  } else {
    const bool t = take_a();
    const int primary = t ? a.k_factor : b.k_factor;
    const int other = t ? b.k_factor : a.k_factor;
    if (contains(space.k_choices, primary)) {
      c.k_factor = primary;
    } else if (contains(space.k_choices, other)) {
      c.k_factor = other;
    } else {
      c.k_factor = rng.pick(space.k_choices);
    }
  }
  return c;
}

ObjectivePoint to_objective(const EvaluatedCandidate& c) {
  ObjectivePoint p;
  p.score = c.proxy.value;
  p.latency_ms = c.cost.latency_ms;
  p.peak_memory_bytes = static_cast<double>(c.cost.peak_memory_bytes);
  p.payload = c.key;
  return p;
}

const EvaluatedCandidate& SearchResult::by_key(const std::string& key) const {
  auto it = index_by_key.find(key);
  if (it == index_by_key.end()) throw MissingEntry("no archive entry for config_key " + key);
  return archive[it->second];
}

namespace {

void check_settings(const SearchSettings& st) {
  if (st.n_iter < 1) throw Error("search settings invalid: n_iter must be >= 1");
  if (st.population < 1) throw Error("search settings invalid: population must be >= 1");
  if (st.parents < 0 || st.mutated_per_iter < 0 || st.crossover_per_iter < 0) {
    throw Error("search settings invalid: negative budget");
  }
  if (st.parents > st.population) {
    throw Error("search settings invalid: parents exceed population");
  }
  if (!(st.mutation_prob >= 0.0 && st.mutation_prob <= 1.0)) {
    throw Error("search settings invalid: mutation_prob outside [0, 1]");
  }
  if (st.latency_cap_ms && *st.latency_cap_ms <= 0.0) {
    throw Error("search settings invalid: latency cap must be positive");
  }
  if (st.memory_cap_bytes && *st.memory_cap_bytes <= 0) {
    throw Error("search settings invalid: memory cap must be positive");
  }
}

double log_hypervolume(const std::vector<ObjectivePoint>& archive_pts) {
  ObjectivePoint ref;
  ref.score = kLogHvRefScore;
  ref.latency_ms = kLogHvRefLatencyMs;
  ref.peak_memory_bytes = kLogHvRefMemoryBytes;
  std::vector<ObjectivePoint> in_box;
  in_box.reserve(archive_pts.size());
  for (const auto& p : archive_pts) {
    if (p.score >= ref.score && p.latency_ms <= ref.latency_ms &&
        p.peak_memory_bytes <= ref.peak_memory_bytes) {
      in_box.push_back(p);
    }
  }
  if (in_box.empty()) return 0.0;
  return hypervolume(in_box, ref);
}

}  // namespace

SearchResult run_search(const SearchSpace& space, const SearchSettings& settings,
                        const ProxyFn& proxy_fn, const CostFn& cost_fn, int jobs,
                        bool parallel_eval) {
  check_settings(settings);
  if (jobs < 1) throw Error("jobs must be >= 1");

  Rng rng(settings.rng_seed);
  SearchResult res;
  std::vector<ObjectivePoint> archive_pts;
  Frontier frontier;
  frontier.mode = settings.frontier_mode;

  constexpr int kAttemptsPerSlot = 100;

  for (int iter = 0; iter < settings.n_iter; ++iter) {
    std::vector<ArchConfig> batch;
    std::vector<std::string> batch_keys;
    std::unordered_set<std::string> batch_seen;
    auto try_push = [&](const ArchConfig& cfg) {
      std::string key = config_key(cfg);
      if (res.index_by_key.count(key) != 0 || batch_seen.count(key) != 0) return false;
      batch_seen.insert(key);
      batch_keys.push_back(std::move(key));
      batch.push_back(cfg);
      return true;
    };
    auto fill_random = [&](int want) {
      for (int s = 0; s < want; ++s) {
        bool pushed = false;
        for (int t = 0; t < kAttemptsPerSlot && !pushed; ++t) {
          pushed = try_push(sample_with(space, rng));
        }
        if (!pushed) return;  // space is as good as enumerated, stop trying
      }
    };

    int target = settings.population;
    if (iter == 0) {
      fill_random(target);
    } else {
      std::vector<ArchConfig> parent_cfgs;
      const auto& fpts = frontier.points;
      const int pool = static_cast<int>(fpts.size());
      const int n_parents = std::min(settings.parents, pool);
      if (n_parents > 0) {
        std::vector<std::size_t> idx(fpts.size());
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        for (int p = 0; p < n_parents; ++p) {
          const std::size_t j =
              static_cast<std::size_t>(p) + rng.index(idx.size() - static_cast<std::size_t>(p));
          std::swap(idx[static_cast<std::size_t>(p)], idx[j]);
          parent_cfgs.push_back(res.by_key(fpts[idx[static_cast<std::size_t>(p)]].payload).config);
        }
      }
      target = settings.population - n_parents;
      if (!parent_cfgs.empty()) {
        const int n_mut = std::min(settings.mutated_per_iter, target);
        for (int m = 0; m < n_mut; ++m) {
          for (int t = 0; t < kAttemptsPerSlot; ++t) {
            const ArchConfig& parent = parent_cfgs[rng.index(parent_cfgs.size())];
            if (try_push(mutate(parent, space, settings.mutation_prob, rng))) break;
          }
        }
        const int n_x = std::min(settings.crossover_per_iter, target - n_mut);
        for (int x = 0; x < n_x; ++x) {
          for (int t = 0; t < kAttemptsPerSlot; ++t) {
            const ArchConfig& pa = parent_cfgs[rng.index(parent_cfgs.size())];
            const ArchConfig& pb = parent_cfgs[rng.index(parent_cfgs.size())];
            if (try_push(crossover(pa, pb, space, rng))) break;
          }
        }
      }
      fill_random(target - static_cast<int>(batch.size()));
    }

    if (batch.empty()) {
      res.exhausted = true;
      break;
    }

    struct Slot {
      bool ok = false;
      ProxyScore proxy;
      CostSample cost;
      std::string error;
    };
    std::vector<Slot> slots(batch.size());
    auto eval_one = [&](std::size_t i) {
      try {
        slots[i].proxy = proxy_fn(batch[i]);
        slots[i].cost = cost_fn(batch[i]);
        slots[i].ok = true;
      } catch (const std::exception& e) {
        slots[i].error = e.what();
      }
    };
    if (parallel_eval && jobs > 1 && batch.size() > 1) {
      std::atomic<std::size_t> next{0};
      const int n_threads = std::min<int>(jobs, static_cast<int>(batch.size()));
      std::vector<std::thread> pool;
      pool.reserve(static_cast<std::size_t>(n_threads));
      for (int t = 0; t < n_threads; ++t) {
        pool.emplace_back([&] {
          for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= batch.size()) return;
            eval_one(i);
          }
        });
      }
      for (auto& th : pool) th.join();
    } else {
      for (std::size_t i = 0; i < batch.size(); ++i) eval_one(i);
    }

    const int evaluated = static_cast<int>(batch.size());
    int discarded = 0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
      if (!slots[i].ok) {
        ++discarded;
        if (res.eval_errors.size() < 20) res.eval_errors.push_back(slots[i].error);
        continue;
      }
      if (settings.latency_cap_ms && slots[i].cost.latency_ms > *settings.latency_cap_ms) {
        ++discarded;
        continue;
      }
      if (settings.memory_cap_bytes &&
          slots[i].cost.peak_memory_bytes > *settings.memory_cap_bytes) {
        ++discarded;
        continue;
      }
      EvaluatedCandidate ec;
      ec.config = std::move(batch[i]);
      ec.key = batch_keys[i];
      ec.proxy = std::move(slots[i].proxy);
      ec.cost = slots[i].cost;
      ec.iteration_added = iter;
      res.index_by_key.emplace(ec.key, res.archive.size());
      archive_pts.push_back(to_objective(ec));
      res.archive.push_back(std::move(ec));
    }
    res.evaluated_total += evaluated;
    res.discarded_total += discarded;

    frontier = extract_frontier(archive_pts, settings.frontier_mode);
    IterationRecord rec;
    rec.iteration = iter;
    rec.evaluated = evaluated;
    rec.discarded = discarded;
    rec.frontier_size = static_cast<int>(frontier.points.size());
    rec.hypervolume = log_hypervolume(archive_pts);
    res.log.push_back(rec);
  }

  res.frontier = frontier.points;
  return res;
}

void to_json(nlohmann::json& j, const SearchSettings& s) {
  j = nlohmann::json{
      {"n_iter", s.n_iter},
      {"population", s.population},
      {"parents", s.parents},
      {"mutated_per_iter", s.mutated_per_iter},
      {"crossover_per_iter", s.crossover_per_iter},
      {"mutation_prob", s.mutation_prob},
      {"latency_cap_ms", nullptr},
      {"memory_cap_bytes", nullptr},
      {"rng_seed", s.rng_seed},
      {"frontier_mode", s.frontier_mode == FrontierMode::NonDominated ? "nd" : "hull"},
  };
  if (s.latency_cap_ms) j["latency_cap_ms"] = *s.latency_cap_ms;
  if (s.memory_cap_bytes) j["memory_cap_bytes"] = *s.memory_cap_bytes;
}

FrontierMode frontier_mode_from_string(const std::string& s) {
  if (s == "nd" || s == "non_dominated") return FrontierMode::NonDominated;
  if (s == "hull" || s == "lower_convex_hull") return FrontierMode::LowerConvexHull;
  throw ParseError("unknown frontier mode '" + s + "' (expected nd or hull)");
}

void from_json(const nlohmann::json& j, SearchSettings& s) {
  s = SearchSettings{};
  s.n_iter = j.value("n_iter", s.n_iter);
  s.population = j.value("population", s.population);
  s.parents = j.value("parents", s.parents);
  s.mutated_per_iter = j.value("mutated_per_iter", s.mutated_per_iter);
  s.crossover_per_iter = j.value("crossover_per_iter", s.crossover_per_iter);
  s.mutation_prob = j.value("mutation_prob", s.mutation_prob);
  if (j.contains("latency_cap_ms") && !j["latency_cap_ms"].is_null()) {
    s.latency_cap_ms = j["latency_cap_ms"].get<double>();
  }
  if (j.contains("memory_cap_bytes") && !j["memory_cap_bytes"].is_null()) {
    s.memory_cap_bytes = j["memory_cap_bytes"].get<std::int64_t>();
  }
  s.rng_seed = j.value("rng_seed", s.rng_seed);
  if (j.contains("frontier_mode")) {
    s.frontier_mode = frontier_mode_from_string(j["frontier_mode"].get<std::string>());
  }
}

}  // namespace pnas
