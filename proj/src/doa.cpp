#include "robdoa/doa.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace robdoa {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Exact powers of ten as doubles (exact up to 10^22).
double pow10i(int k) {
  double v = 1.0;
  for (int i = 0; i < k; ++i) v *= 10.0;
  return v;
}

}  // namespace

StateSampleTable StateSampleTable::build(const Lyapunov& L,
                                         const UniformGrid& gx,
                                         std::size_t n_x, std::uint64_t seed,
                                         int workers) {
  if (L.dim() != gx.dim())
    throw ValidationError("state sample table: dimension mismatch");
  if (n_x < 1) throw ValidationError("state sample table: need at least one sample");
  StateSampleTable table;
  table.grid_ = gx;
  const std::size_t cells = gx.cell_count();
  table.cell_max_.assign(cells, kNegInf);
  table.cell_count_.assign(cells, 0);

  const auto dim = static_cast<std::size_t>(gx.dim());
  const rng::Stream stream{rng::Domain::state_points, 0};

#ifdef _OPENMP
  const int nthreads = workers <= 0 ? omp_get_max_threads() : workers;
#else
  const int nthreads = 1;
#endif
  if (nthreads == 1) {
    std::vector<double> x(dim);
    for (std::size_t i = 0; i < n_x; ++i) {
      sample_box_point(gx.box(), seed, stream, i, x);
      const double v = L(x);
      const std::size_t c = *gx.locate(x);
      ++table.cell_count_[c];
      if (v > table.cell_max_[c]) table.cell_max_[c] = v;
    }
  } else {
#ifdef _OPENMP
#pragma omp parallel num_threads(nthreads)
    {
      std::vector<double> local_max(cells, kNegInf);
      std::vector<std::uint32_t> local_count(cells, 0);
      std::vector<double> x(dim);
#pragma omp for schedule(static)
      for (std::int64_t ii = 0; ii < static_cast<std::int64_t>(n_x); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        sample_box_point(gx.box(), seed, stream, i, x);
        const double v = L(x);
        const std::size_t c = *gx.locate(x);
        ++local_count[c];
        if (v > local_max[c]) local_max[c] = v;
      }
#pragma omp critical(robdoa_table_merge)
      {
        for (std::size_t c = 0; c < cells; ++c) {
          table.cell_count_[c] += local_count[c];
          if (local_max[c] > table.cell_max_[c]) table.cell_max_[c] = local_max[c];
        }
      }
    }
#endif
  }
  double smax = kNegInf;
  for (std::size_t c = 0; c < cells; ++c)
    if (table.cell_count_[c] > 0 && table.cell_max_[c] > smax)
      smax = table.cell_max_[c];
  table.sample_max_ = smax;
  return table;
}

CellMask StateSampleTable::mask_at(double alpha) const {
  CellMask mask(grid_);
  for (std::size_t c = 0; c < grid_.cell_count(); ++c)
    if (cell_count_[c] > 0 && cell_max_[c] <= alpha) mask.set(c);
  return mask;
}

LevelSetEstimate estimate_level_set(const StateSampleTable& table, double alpha) {
  if (alpha < 0.0) throw ValidationError("level set: alpha must be nonnegative");
  return {table.mask_at(alpha), alpha};
}

bool contained(const LevelSetEstimate& ls, const CellMask& ndd_x) {
  return mask_eq(mask_and(ls.mask, ndd_x), ls.mask);
}

void AlphaSearchParams::validate() const {
  if (!(eps_init > 0.0) || !(accuracy > 0.0))
    throw ValidationError("alpha search: eps_init and accuracy must be positive");
  if (accuracy > eps_init)
    throw ValidationError("alpha search: accuracy must not exceed eps_init");
  const double ratio = eps_init / accuracy;
  const double lg = std::log10(ratio);
  if (std::fabs(lg - std::nearbyint(lg)) > 1e-9)
    throw ValidationError("alpha search: eps_init/accuracy must be a power of ten");
  if (!(alpha_max > 0.0)) throw ValidationError("alpha search: alpha_max must be positive");
}

AlphaSearchTrace search_alpha_lattice(const std::function<bool(double)>& accept,
                                      const AlphaSearchParams& params) {
  params.validate();
  const int passes = static_cast<int>(
      std::nearbyint(std::log10(params.eps_init / params.accuracy)));

  AlphaSearchTrace trace;
  // alpha = m * eps_init / 10^j, held as the integer m to keep the lattice
  // exact across refinements.
  std::uint64_t m = 1;
  int j = 0;
  bool any_accept = false;
  trace.epsilon_schedule.push_back(params.eps_init);
  while (true) {
    const double eps = params.eps_init / pow10i(j);
    const double alpha = static_cast<double>(m) * params.eps_init / pow10i(j);
    const bool ok = accept(alpha);
    trace.checks.push_back({alpha, ok, eps});
    if (ok) {
      any_accept = true;
      if (alpha >= params.alpha_max) {
        trace.alpha_star = alpha;
        trace.cap_hit = true;
        return trace;
      }
      ++m;
      continue;
    }
    // step back one notch, then refine
    --m;
    if (j == passes) {
      trace.alpha_star = static_cast<double>(m) * params.eps_init / pow10i(j);
      trace.never_contained = !any_accept;
      return trace;
    }
    ++j;
    m = m * 10 + 1;
    trace.epsilon_schedule.push_back(params.eps_init / pow10i(j));
  }
}

AlphaSearchTrace search_alpha_constant(const std::function<bool(double)>& accept,
                                       double eps, double alpha_max) {
  if (!(eps > 0.0)) throw ValidationError("alpha search: eps must be positive");
  AlphaSearchTrace trace;
  trace.epsilon_schedule.push_back(eps);
  std::uint64_t m = 1;
  bool any_accept = false;
  while (true) {
    const double alpha = static_cast<double>(m) * eps;
    const bool ok = accept(alpha);
    trace.checks.push_back({alpha, ok, eps});
    if (!ok) {
      trace.alpha_star = static_cast<double>(m - 1) * eps;
      trace.never_contained = !any_accept;
      return trace;
    }
    any_accept = true;
    if (alpha >= alpha_max) {
      trace.alpha_star = alpha;
      trace.cap_hit = true;
      return trace;
    }
    ++m;
  }
}

AlphaResult search_alpha(const StateSampleTable& table, const CellMask& ndd_x,
                         const AlphaSearchParams& params) {
  if (table.grid() != ndd_x.grid())
    throw Error("alpha search: level-set table and mask grids differ");
  auto accept = [&](double alpha) {
    const CellMask mask = table.mask_at(alpha);
    if (!mask_subset(mask, ndd_x)) return false;
    if (params.reject_boundary_leak && mask_touches_boundary(mask)) return false;
    return true;
  };
  AlphaSearchTrace trace = search_alpha_lattice(accept, params);
  LevelSetEstimate best{table.mask_at(trace.alpha_star), trace.alpha_star};
  if (trace.never_contained) best.mask = CellMask(table.grid());
  return {std::move(trace), std::move(best)};
}

double default_alpha_cap(const Lyapunov& L, const Box& region) {
  double worst = 0.0;
  for (const auto& corner : region.corners())
    worst = std::max(worst, L(corner));
  return worst > 0.0 ? 10.0 * worst : 1e12;
}

}  // namespace robdoa
