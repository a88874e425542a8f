#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "robdoa/grid.hpp"
#include "robdoa/lyapunov.hpp"
#include "robdoa/sampler.hpp"

namespace robdoa {

/// Cells whose every contained state sample satisfies L <= alpha; empty
/// cells are excluded, keeping this an inner estimate.
struct LevelSetEstimate {
  CellMask mask;
  double alpha = 0.0;
};

/// Per-cell maxima of L over one fixed state sample set. Level-set masks for
/// any alpha are then thresholds over this table, which both guarantees mask
/// monotonicity in alpha and makes each verification cheap.
class StateSampleTable {
 public:
  static StateSampleTable build(const Lyapunov& L, const UniformGrid& gx,
                                std::size_t n_x, std::uint64_t seed,
                                int workers = 0);

  CellMask mask_at(double alpha) const;
  const UniformGrid& grid() const { return grid_; }
  const std::vector<double>& cell_max() const { return cell_max_; }
  const std::vector<std::uint32_t>& cell_count() const { return cell_count_; }
  /// Largest candidate value over all samples (mask saturation point).
  double sample_max() const { return sample_max_; }

 private:
  UniformGrid grid_;
  std::vector<double> cell_max_;
  std::vector<std::uint32_t> cell_count_;
  double sample_max_ = 0.0;
};

LevelSetEstimate estimate_level_set(const StateSampleTable& table, double alpha);

/// Cell containment: mask_and(ls.mask, ndd_x) == ls.mask.
bool contained(const LevelSetEstimate& ls, const CellMask& ndd_x);

struct AlphaCheck {
  double alpha;
  bool contained;
  double epsilon;  // step size in force when this check ran
};

struct AlphaSearchTrace {
  double alpha_star = 0.0;
  std::vector<AlphaCheck> checks;
  std::vector<double> epsilon_schedule;
  bool never_contained = false;
  bool cap_hit = false;
  std::size_t check_count() const { return checks.size(); }
};

struct AlphaSearchParams {
  double eps_init = 10.0;   // must be accuracy * 10^k for integer k >= 0
  double accuracy = 1e-3;   // final refinement step
  double alpha_max = 1e12;  // safety cap when containment never fails
  /// Treat a level set reaching the outer cells of the region as a
  /// containment failure: past the boundary there is no data to verify
  /// against, so growth stops at the region edge.
  bool reject_boundary_leak = true;

  void validate() const;
};

/// Decimal refinement search for the largest alpha accepted by `accept`.
/// Starts at eps_init, multiplies the step by 0.1 after each failure, and
/// finishes once the pass at `accuracy` fails (or the cap is reached).
/// Lattice values are computed as integer multiples of the current step, so
/// traces are exactly reproducible.
AlphaSearchTrace search_alpha_lattice(const std::function<bool(double)>& accept,
                                      const AlphaSearchParams& params);

/// Constant-step comparison mode: alpha = eps, 2 eps, ... until rejection.
AlphaSearchTrace search_alpha_constant(const std::function<bool(double)>& accept,
                                       double eps, double alpha_max);

struct AlphaResult {
  AlphaSearchTrace trace;
  LevelSetEstimate level_set;  // at alpha_star
};

/// Full search against an inner decrease-domain mask. `table` must be built
/// from the same grid; one sample set serves every alpha (and every
/// candidate function within an optimization run).
AlphaResult search_alpha(const StateSampleTable& table, const CellMask& ndd_x,
                         const AlphaSearchParams& params);

/// Default cap: 10 x the largest candidate value over the region corners.
double default_alpha_cap(const Lyapunov& L, const Box& region);

}  // namespace robdoa
