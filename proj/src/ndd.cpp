#include "robdoa/ndd.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace robdoa {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

int resolve_workers(int workers) {
#ifdef _OPENMP
  if (workers <= 0) return omp_get_max_threads();
  return workers;
#else
  (void)workers;
  return 1;
#endif
}

// Decrease test for one point whose successor box is [lo, hi].
// Returns {negative_definite, worst_observed_margin}. With sampling the loop
// exits at the first non-decreasing draw; the verdict is unchanged by the
// exit, only the diagnostic margin stops early.
struct PointVerdict {
  bool negative;
  double worst;
};

PointVerdict check_decrease(const Lyapunov& L, std::span<const double> x,
                            std::span<const double> lo,
                            std::span<const double> hi, std::size_t n_succ,
                            std::uint64_t seed, std::uint64_t point_index,
                            double margin, SuccessorCheck check,
                            std::span<double> scratch) {
  const double lx = L(x);
  if (check == SuccessorCheck::interval_endpoints) {
    const double d = std::max(L(lo), L(hi)) - lx;
    return {d < -margin, d};
  }
  double worst = kNegInf;
  for (std::size_t h = 0; h < n_succ; ++h) {
    successor_point(lo, hi, seed, point_index, h, scratch);
    const double d = L(scratch) - lx;
    if (d > worst) worst = d;
    if (d >= -margin) return {false, worst};
  }
  return {true, worst};
}

struct CellTally {
  std::vector<std::uint32_t> count;
  std::vector<std::uint8_t> failed;
  std::vector<double> worst;

  explicit CellTally(std::size_t cells)
      : count(cells, 0), failed(cells, 0), worst(cells, kNegInf) {}

  void absorb(const CellTally& other) {
    for (std::size_t t = 0; t < count.size(); ++t) {
      count[t] += other.count[t];
      failed[t] |= other.failed[t];
      if (other.worst[t] > worst[t]) worst[t] = other.worst[t];
    }
  }
};

// PointFn(v, xu&, lo&, hi&) -> product cell index; must be a pure function
// of v so any worker partitioning produces the same tallies.
template <class PointFn>
CellTally tally_points(std::size_t n_points, std::size_t n_cells, int n,
                       std::size_t xu_dim, const Lyapunov& L,
                       std::size_t n_succ, std::uint64_t seed, double margin,
                       SuccessorCheck check, int workers, PointFn&& point_fn) {
  const int nthreads = resolve_workers(workers);
  if (nthreads == 1) {
    // Serial reference path.
    CellTally tally(n_cells);
    std::vector<double> xu(xu_dim), lo(static_cast<std::size_t>(n)),
        hi(static_cast<std::size_t>(n)), scratch(static_cast<std::size_t>(n));
    for (std::size_t v = 0; v < n_points; ++v) {
      const std::size_t t = point_fn(v, xu, lo, hi);
      const PointVerdict verdict =
          check_decrease(L, std::span<const double>(xu.data(), static_cast<std::size_t>(n)),
                         lo, hi, n_succ, seed, v, margin, check, scratch);
      ++tally.count[t];
      if (!verdict.negative) tally.failed[t] = 1;
      if (verdict.worst > tally.worst[t]) tally.worst[t] = verdict.worst;
    }
    return tally;
  }

#ifdef _OPENMP
  CellTally total(n_cells);
  std::string first_error;
  bool have_error = false;
#pragma omp parallel num_threads(nthreads)
  {
    CellTally local(n_cells);
    std::vector<double> xu(xu_dim), lo(static_cast<std::size_t>(n)),
        hi(static_cast<std::size_t>(n)), scratch(static_cast<std::size_t>(n));
#pragma omp for schedule(static)
    for (std::int64_t vi = 0; vi < static_cast<std::int64_t>(n_points); ++vi) {
      if (have_error) continue;
      const auto v = static_cast<std::size_t>(vi);
      try {
        const std::size_t t = point_fn(v, xu, lo, hi);
        const PointVerdict verdict = check_decrease(
            L, std::span<const double>(xu.data(), static_cast<std::size_t>(n)), lo,
            hi, n_succ, seed, v, margin, check, scratch);
        ++local.count[t];
        if (!verdict.negative) local.failed[t] = 1;
        if (verdict.worst > local.worst[t]) local.worst[t] = verdict.worst;
      } catch (const std::exception& e) {
#pragma omp critical(robdoa_ndd_error)
        {
          if (!have_error) {
            first_error = e.what();
            have_error = true;
          }
        }
      }
    }
#pragma omp critical(robdoa_ndd_merge)
    total.absorb(local);
  }
  if (have_error) throw EvalError(first_error);
  return total;
#else
  throw Error("parallel path requested but OpenMP is unavailable");
#endif
}

NddEstimate finish_estimate(CellTally&& tally, const PlantSet& plant,
                            const Lyapunov& L, const UniformGrid& gx,
                            const UniformGrid& gu, const NddParams& params) {
  const UniformGrid gw = product_grid(gx, gu);
  NddEstimate est;
  est.w_mask = CellMask(gw);
  for (std::size_t t = 0; t < gw.cell_count(); ++t)
    if (!tally.failed[t] && tally.count[t] >= params.min_samples_per_cell)
      est.w_mask.set(t);

  const CellMask projected = project_mask(est.w_mask, gx, gu);
  CellMask fixed = apply_origin_fix(projected);
  CellMask origin_region(gx);
  for (std::size_t c : gx.origin_cells()) origin_region.set(c);
  if (params.fill_origin_gap) {
    OriginGapFill gap = fill_origin_gap(fixed);
    if (gap.enclosed) {
      fixed = std::move(gap.mask);
      origin_region = mask_or(origin_region, gap.filled);
    }
  }
  est.x_mask = std::move(fixed);
  est.origin_region = std::move(origin_region);
  est.cell_counts = std::move(tally.count);
  est.worst_margin = std::move(tally.worst);
  est.plant_hash = plant.definition_hash();
  est.lyapunov = L.describe();
  est.sample = params.sample;
  est.margin = params.margin;
  return est;
}

void validate_inputs(const PlantSet& plant, const Lyapunov& L,
                     const UniformGrid& gx, const UniformGrid& gu,
                     const NddParams& params) {
  params.sample.validate();
  if (gx.dim() != plant.state_dim() || gu.dim() != plant.input_dim())
    throw ValidationError("grid dimensions do not match the plant");
  if (L.dim() != plant.state_dim())
    throw ValidationError("candidate function dimension does not match the plant");
  if (params.check == SuccessorCheck::interval_endpoints && plant.state_dim() != 1)
    throw ValidationError("interval endpoint check requires a 1-D state space");
}

}  // namespace

bool classify_point(const PlantSet& plant, const Lyapunov& L,
                    std::span<const double> x, std::span<const double> u,
                    std::size_t n_succ, std::uint64_t seed,
                    std::uint64_t point_index, double margin,
                    SuccessorCheck check) {
  const auto n = static_cast<std::size_t>(plant.state_dim());
  std::vector<double> lo(n), hi(n), scratch(n);
  plant.successor_box_into(x, u, lo, hi);
  return check_decrease(L, x, lo, hi, n_succ, seed, point_index, margin, check,
                        scratch)
      .negative;
}

PointCache PointCache::build(const PlantSet& plant, const UniformGrid& gx,
                             const UniformGrid& gu, const SampleConfig& cfg,
                             int workers) {
  cfg.validate();
  const UniformGrid gw = product_grid(gx, gu);
  const auto n = static_cast<std::size_t>(plant.state_dim());
  const auto m = static_cast<std::size_t>(plant.input_dim());
  const std::size_t dim = n + m;
  PointCache cache;
  cache.n_ = plant.state_dim();
  cache.m_ = plant.input_dim();
  cache.xu_.resize(cfg.n_xu * dim);
  cache.succ_lo_.resize(cfg.n_xu * n);
  cache.succ_hi_.resize(cfg.n_xu * n);
  cache.cell_.resize(cfg.n_xu);

  const int nthreads = resolve_workers(workers);
  std::string first_error;
  bool have_error = false;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(nthreads)
#endif
  for (std::int64_t vi = 0; vi < static_cast<std::int64_t>(cfg.n_xu); ++vi) {
    if (have_error) continue;
    const auto v = static_cast<std::size_t>(vi);
    try {
      double* xu = cache.xu_.data() + v * dim;
      sample_box_point(gw.box(), cfg.seed,
                       {rng::Domain::state_control_points, 0}, v,
                       std::span<double>(xu, dim));
      const auto cell = gw.locate(std::span<const double>(xu, dim));
      cache.cell_[v] = *cell;  // uniform draws stay inside the box
      plant.successor_box_into(
          std::span<const double>(xu, n), std::span<const double>(xu + n, m),
          std::span<double>(cache.succ_lo_.data() + v * n, n),
          std::span<double>(cache.succ_hi_.data() + v * n, n));
    } catch (const std::exception& e) {
#ifdef _OPENMP
#pragma omp critical(robdoa_cache_error)
#endif
      {
        if (!have_error) {
          first_error = e.what();
          have_error = true;
        }
      }
    }
  }
  if (have_error) throw EvalError(first_error);
  return cache;
}

std::size_t PointCache::bytes_needed(int n, int m, std::size_t n_xu) {
  return n_xu * (static_cast<std::size_t>(n + m) * 8 +
                 static_cast<std::size_t>(n) * 16 + sizeof(std::size_t));
}

NddEstimate estimate_ndd(const PlantSet& plant, const Lyapunov& L,
                         const UniformGrid& gx, const UniformGrid& gu,
                         const NddParams& params) {
  validate_inputs(plant, L, gx, gu, params);
  const UniformGrid gw = product_grid(gx, gu);
  const auto n = static_cast<std::size_t>(plant.state_dim());
  const auto m = static_cast<std::size_t>(plant.input_dim());
  const std::size_t dim = n + m;
  auto point_fn = [&](std::size_t v, std::vector<double>& xu,
                      std::vector<double>& lo, std::vector<double>& hi) {
    sample_box_point(gw.box(), params.sample.seed,
                     {rng::Domain::state_control_points, 0}, v,
                     std::span<double>(xu.data(), dim));
    plant.successor_box_into(std::span<const double>(xu.data(), n),
                             std::span<const double>(xu.data() + n, m), lo, hi);
    return *gw.locate(std::span<const double>(xu.data(), dim));
  };
  CellTally tally = tally_points(params.sample.n_xu, gw.cell_count(),
                                 plant.state_dim(), dim, L, params.sample.n_succ,
                                 params.sample.seed, params.margin, params.check,
                                 params.workers, point_fn);
  return finish_estimate(std::move(tally), plant, L, gx, gu, params);
}

NddEstimate estimate_ndd(const PointCache& cache, const PlantSet& plant,
                         const Lyapunov& L, const UniformGrid& gx,
                         const UniformGrid& gu, const NddParams& params) {
  validate_inputs(plant, L, gx, gu, params);
  if (cache.size() != params.sample.n_xu)
    throw ValidationError("point cache size does not match sample.n_xu");
  const UniformGrid gw = product_grid(gx, gu);
  const auto n = static_cast<std::size_t>(plant.state_dim());
  const auto m = static_cast<std::size_t>(plant.input_dim());
  const std::size_t dim = n + m;
  const double* xu_all = cache.xu().data();
  const double* lo_all = cache.succ_lo().data();
  const double* hi_all = cache.succ_hi().data();
  auto point_fn = [&](std::size_t v, std::vector<double>& xu,
                      std::vector<double>& lo, std::vector<double>& hi) {
    std::copy_n(xu_all + v * dim, dim, xu.data());
    std::copy_n(lo_all + v * n, n, lo.data());
    std::copy_n(hi_all + v * n, n, hi.data());
    return cache.cell()[v];
  };
  CellTally tally = tally_points(params.sample.n_xu, gw.cell_count(),
                                 plant.state_dim(), dim, L, params.sample.n_succ,
                                 params.sample.seed, params.margin, params.check,
                                 params.workers, point_fn);
  return finish_estimate(std::move(tally), plant, L, gx, gu, params);
}

CellMask apply_origin_fix(const CellMask& x_mask) {
  CellMask out = x_mask;
  for (std::size_t c : x_mask.grid().origin_cells()) out.set(c);
  return out;
}

OriginGapFill fill_origin_gap(const CellMask& x_mask) {
  const UniformGrid& g = x_mask.grid();
  OriginGapFill result{x_mask, CellMask(g), false};

  // Flood the unset region reachable from the origin cells through cell
  // faces. Touching the grid boundary means the gap opens into territory the
  // estimate knows nothing about, so nothing is filled.
  std::vector<std::uint8_t> visited(g.cell_count(), 0);
  std::deque<std::size_t> queue;
  for (std::size_t c : g.origin_cells()) {
    visited[c] = 1;  // seed from the origin block without collecting it
    queue.push_back(c);
  }
  std::vector<std::size_t> component;
  bool open = false;
  while (!queue.empty()) {
    const std::size_t cur = queue.front();
    queue.pop_front();
    const auto multi = g.unflatten(cur);
    for (std::size_t dimi = 0; dimi < multi.size(); ++dimi) {
      for (int dir = -1; dir <= 1; dir += 2) {
        const auto coord = static_cast<std::int64_t>(multi[dimi]) + dir;
        if (coord < 0 || coord >= static_cast<std::int64_t>(g.counts()[dimi]))
          continue;
        auto neigh = multi;
        neigh[dimi] = static_cast<std::size_t>(coord);
        const std::size_t idx = g.flatten(neigh);
        if (visited[idx] || x_mask.test(idx)) continue;
        visited[idx] = 1;
        component.push_back(idx);
        if (g.is_boundary_cell(idx)) open = true;
        queue.push_back(idx);
      }
    }
  }
  if (open || component.empty()) return result;
  result.enclosed = true;
  for (std::size_t idx : component) {
    result.mask.set(idx);
    result.filled.set(idx);
  }
  return result;
}

}  // namespace robdoa
