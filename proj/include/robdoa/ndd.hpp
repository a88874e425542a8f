#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "robdoa/grid.hpp"
#include "robdoa/lyapunov.hpp"
#include "robdoa/plant.hpp"
#include "robdoa/sampler.hpp"

namespace robdoa {

/// How a point's successor set is tested for the decrease condition.
enum class SuccessorCheck {
  sampled,             // n_succ uniform draws from the successor box
  interval_endpoints,  // exact for 1-D candidates with a single minimum at 0
};

struct NddParams {
  SampleConfig sample;
  double margin = 0.0;
  std::size_t min_samples_per_cell = 1;
  SuccessorCheck check = SuccessorCheck::sampled;
  /// After projection: also set enclosed unset cells around the origin (the
  /// grid-resolution artifact region where no whole control cell can pass).
  bool fill_origin_gap = true;
  /// 1 = serial reference implementation; 0 = library default thread count.
  int workers = 0;
};

/// Cell-level inner approximations of the robust decrease domain.
struct NddEstimate {
  CellMask w_mask;         // over the state x control product grid
  CellMask x_mask;         // over the state grid, after origin handling
  CellMask origin_region;  // cells set by origin handling (exempt downstream)
  std::vector<std::uint32_t> cell_counts;  // samples per product cell
  std::vector<double> worst_margin;        // per product cell; -inf when empty

  std::uint64_t plant_hash = 0;
  std::string lyapunov;
  SampleConfig sample;
  double margin = 0.0;
};

/// True iff every tested successor of (x, u) strictly decreases L by more
/// than `margin`. The stream id is the point index, so the draw sequence is
/// reproducible in isolation.
bool classify_point(const PlantSet& plant, const Lyapunov& L,
                    std::span<const double> x, std::span<const double> u,
                    std::size_t n_succ, std::uint64_t seed,
                    std::uint64_t point_index, double margin,
                    SuccessorCheck check = SuccessorCheck::sampled);

/// L-independent per-point work (points, successor boxes, cells), cached so
/// repeated estimation under different candidate functions skips the
/// expression evaluations. Results are bit-identical to the streaming path.
class PointCache {
 public:
  static PointCache build(const PlantSet& plant, const UniformGrid& gx,
                          const UniformGrid& gu, const SampleConfig& cfg,
                          int workers = 0);

  std::size_t size() const { return cell_.size(); }
  static std::size_t bytes_needed(int n, int m, std::size_t n_xu);

  const std::vector<double>& xu() const { return xu_; }
  const std::vector<double>& succ_lo() const { return succ_lo_; }
  const std::vector<double>& succ_hi() const { return succ_hi_; }
  const std::vector<std::size_t>& cell() const { return cell_; }
  int state_dim() const { return n_; }
  int input_dim() const { return m_; }

 private:
  std::vector<double> xu_;
  std::vector<double> succ_lo_, succ_hi_;
  std::vector<std::size_t> cell_;
  int n_ = 0, m_ = 0;
};

/// Streaming estimator: draws points, classifies them, aggregates cells,
/// projects, and applies the origin modification.
NddEstimate estimate_ndd(const PlantSet& plant, const Lyapunov& L,
                         const UniformGrid& gx, const UniformGrid& gu,
                         const NddParams& params);

/// Cache-backed variant with identical output.
NddEstimate estimate_ndd(const PointCache& cache, const PlantSet& plant,
                         const Lyapunov& L, const UniformGrid& gx,
                         const UniformGrid& gu, const NddParams& params);

/// Sets every cell whose closure contains the origin.
CellMask apply_origin_fix(const CellMask& x_mask);

/// Fills the unset component around the origin cells if it is enclosed by
/// set cells; a component reaching the grid boundary is left untouched.
struct OriginGapFill {
  CellMask mask;    // input with the gap filled (when enclosed)
  CellMask filled;  // exactly the cells that were added
  bool enclosed = false;
};
OriginGapFill fill_origin_gap(const CellMask& x_mask);

}  // namespace robdoa
