#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "robdoa/ndd.hpp"

namespace robdoa {

/// State -> input training pairs; always includes the origin pair (0, 0).
struct TrainingSet {
  std::vector<std::vector<double>> states;
  std::vector<std::vector<double>> inputs;

  std::size_t size() const { return states.size(); }
};

struct GpHyper {
  /// Kernel length scale, expressed in state-grid cell widths per dimension.
  double length_scale_cells = 5.0;
  double signal_variance = 1.0;
  double jitter = 1e-8;

  void validate() const;
};

/// For every stride-th set state cell, picks the control value at the center
/// of the longest contiguous run of set control cells in that cell's column
/// (ties go to the lower control index), then appends (0, 0). State cells
/// with an empty column are skipped; outside the origin region that earns a
/// warning, since the fitted feedback cannot be anchored there.
TrainingSet select_training(const NddEstimate& ndd, const UniformGrid& gx,
                            const UniformGrid& gu, std::size_t stride,
                            std::vector<std::string>* warnings = nullptr);

/// Smooth state feedback fitted by squared-exponential kernel regression
/// over the training set. The prediction is origin-corrected so that
/// mu(0) = 0 holds exactly, not merely up to the regression jitter.
class Controller {
 public:
  static Controller fit(const TrainingSet& ts, const GpHyper& hyper,
                        std::span<const double> cell_widths);

  void eval_into(std::span<const double> x, std::span<double> u) const;
  std::vector<double> operator()(std::span<const double> x) const;

  int state_dim() const { return state_dim_; }
  int input_dim() const { return input_dim_; }
  const TrainingSet& training() const { return training_; }
  const std::vector<double>& length_scales() const { return length_scales_; }
  double signal_variance() const { return signal_variance_; }
  /// Jitter actually used; may exceed the requested value after escalation
  /// on an ill-conditioned kernel matrix.
  double jitter_used() const { return jitter_used_; }

 private:
  double kernel(std::span<const double> a, std::span<const double> b) const;

  TrainingSet training_;
  std::vector<double> length_scales_;
  double signal_variance_ = 1.0;
  double jitter_used_ = 0.0;
  Eigen::MatrixXd weights_;      // N x m
  std::vector<double> origin_raw_;  // uncorrected prediction at x = 0
  int state_dim_ = 0;
  int input_dim_ = 0;
};

struct MembershipViolation {
  std::vector<double> state;
  std::vector<double> input;
};

struct MembershipReport {
  std::size_t probes = 0;
  std::size_t violations = 0;
  double violation_fraction = 0.0;
  std::vector<MembershipViolation> worst;  // first few offenders

  bool clean() const { return violations == 0; }
};

/// Probes every set state cell (center plus `extra_probes` random points
/// spread over the set cells) and checks that (x, mu(x)) lands in a set cell
/// of the decrease-domain mask. Cells in the origin region are exempt: the
/// feedback there is anchored by mu(0) = 0 rather than by cell membership.
MembershipReport verify_membership(const Controller& c, const NddEstimate& ndd,
                                   const UniformGrid& gx, const UniformGrid& gu,
                                   std::size_t extra_probes, std::uint64_t seed);

}  // namespace robdoa
