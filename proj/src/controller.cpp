#include "robdoa/controller.hpp"

#include <algorithm>
#include <cmath>

namespace robdoa {

void GpHyper::validate() const {
  if (!(length_scale_cells > 0.0))
    throw ValidationError("controller.length_scale_cells must be positive");
  if (!(signal_variance > 0.0))
    throw ValidationError("controller.signal_variance must be positive");
  if (!(jitter > 0.0)) throw ValidationError("controller.jitter must be positive");
}

TrainingSet select_training(const NddEstimate& ndd, const UniformGrid& gx,
                            const UniformGrid& gu, std::size_t stride,
                            std::vector<std::string>* warnings) {
  if (stride < 1) throw ValidationError("controller.stride must be at least 1");
  if (ndd.x_mask.none()) throw ValidationError("empty decrease domain: no training cells");
  const std::size_t nu = gu.cell_count();

  TrainingSet ts;
  std::size_t seen = 0;
  for (std::size_t i = 0; i < gx.cell_count(); ++i) {
    if (!ndd.x_mask.test(i)) continue;
    if (seen++ % stride != 0) continue;

    // longest contiguous run of set control cells in this state column
    std::size_t best_start = 0, best_len = 0, cur_start = 0, cur_len = 0;
    for (std::size_t j = 0; j < nu; ++j) {
      if (ndd.w_mask.test(i * nu + j)) {
        if (cur_len == 0) cur_start = j;
        ++cur_len;
        if (cur_len > best_len) {  // strict: ties keep the earlier run
          best_len = cur_len;
          best_start = cur_start;
        }
      } else {
        cur_len = 0;
      }
    }
    if (best_len == 0) {
      if (warnings && !ndd.origin_region.test(i))
        warnings->push_back("state cell " + std::to_string(i) +
                            " has no admissible control cell; skipped");
      continue;
    }
    std::vector<double> ulo(static_cast<std::size_t>(gu.dim()));
    std::vector<double> uhi(static_cast<std::size_t>(gu.dim()));
    gu.cell_bounds(best_start, ulo, uhi);
    std::vector<double> uhi2(static_cast<std::size_t>(gu.dim()));
    gu.cell_bounds(best_start + best_len - 1, uhi2, uhi);
    std::vector<double> u(static_cast<std::size_t>(gu.dim()));
    for (std::size_t k = 0; k < u.size(); ++k) u[k] = 0.5 * (ulo[k] + uhi[k]);
    ts.states.push_back(gx.cell_center(i));
    ts.inputs.push_back(std::move(u));
  }
  ts.states.push_back(std::vector<double>(static_cast<std::size_t>(gx.dim()), 0.0));
  ts.inputs.push_back(std::vector<double>(static_cast<std::size_t>(gu.dim()), 0.0));
  return ts;
}

double Controller::kernel(std::span<const double> a,
                          std::span<const double> b) const {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = (a[k] - b[k]) / length_scales_[k];
    s += d * d;
  }
  return signal_variance_ * std::exp(-0.5 * s);
}

Controller Controller::fit(const TrainingSet& ts, const GpHyper& hyper,
                           std::span<const double> cell_widths) {
  hyper.validate();
  const std::size_t count = ts.size();
  if (count < 2) throw ValidationError("controller fit needs at least 2 training pairs");
  if (ts.inputs.size() != count)
    throw ValidationError("controller fit: states/inputs length mismatch");

  Controller c;
  c.training_ = ts;
  c.state_dim_ = static_cast<int>(ts.states.front().size());
  c.input_dim_ = static_cast<int>(ts.inputs.front().size());
  c.signal_variance_ = hyper.signal_variance;
  c.length_scales_.resize(cell_widths.size());
  for (std::size_t k = 0; k < cell_widths.size(); ++k)
    c.length_scales_[k] = hyper.length_scale_cells * cell_widths[k];

  const auto count_i = static_cast<Eigen::Index>(count);
  Eigen::MatrixXd gram(count_i, count_i);
  for (Eigen::Index i = 0; i < count_i; ++i)
    for (Eigen::Index j = 0; j < count_i; ++j)
      gram(i, j) = c.kernel(ts.states[static_cast<std::size_t>(i)],
                            ts.states[static_cast<std::size_t>(j)]);
  Eigen::MatrixXd targets(count_i, c.input_dim_);
  for (Eigen::Index i = 0; i < count_i; ++i)
    for (int j = 0; j < c.input_dim_; ++j)
      targets(i, j) = ts.inputs[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];

  // x100 jitter escalation, three attempts
  double jitter = hyper.jitter;
  bool solved = false;
  for (int attempt = 0; attempt < 3; ++attempt) {
    Eigen::MatrixXd k = gram;
    k.diagonal().array() += jitter;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(k);
    if (ldlt.info() == Eigen::Success) {
      c.weights_ = ldlt.solve(targets);
      const double residual = (k * c.weights_ - targets).cwiseAbs().maxCoeff();
      if (std::isfinite(residual) && residual < 1e-6 * (1.0 + targets.cwiseAbs().maxCoeff())) {
        solved = true;
        break;
      }
    }
    jitter *= 100.0;
  }
  if (!solved)
    throw PipelineError("controller fit: kernel matrix stayed ill-conditioned after 3 jitter escalations");
  c.jitter_used_ = jitter;

  c.origin_raw_.assign(static_cast<std::size_t>(c.input_dim_), 0.0);
  const std::vector<double> zero(static_cast<std::size_t>(c.state_dim_), 0.0);
  for (std::size_t i = 0; i < count; ++i) {
    const double k0 = c.kernel(zero, ts.states[i]);
    for (int j = 0; j < c.input_dim_; ++j)
      c.origin_raw_[static_cast<std::size_t>(j)] +=
          k0 * c.weights_(static_cast<Eigen::Index>(i), j);
  }
  return c;
}

void Controller::eval_into(std::span<const double> x, std::span<double> u) const {
  for (int j = 0; j < input_dim_; ++j) u[static_cast<std::size_t>(j)] = 0.0;
  for (std::size_t i = 0; i < training_.size(); ++i) {
    const double k = kernel(x, training_.states[i]);
    for (int j = 0; j < input_dim_; ++j)
      u[static_cast<std::size_t>(j)] += k * weights_(static_cast<Eigen::Index>(i), j);
  }
  // Subtract the origin prediction faded by the kernel so mu(0) = 0 exactly
  // while distant predictions are untouched.
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double d = x[k] / length_scales_[k];
    s += d * d;
  }
  const double fade = std::exp(-0.5 * s);
  for (int j = 0; j < input_dim_; ++j)
    u[static_cast<std::size_t>(j)] -= fade * origin_raw_[static_cast<std::size_t>(j)];
}

std::vector<double> Controller::operator()(std::span<const double> x) const {
  std::vector<double> u(static_cast<std::size_t>(input_dim_));
  eval_into(x, u);
  return u;
}

MembershipReport verify_membership(const Controller& c, const NddEstimate& ndd,
                                   const UniformGrid& gx, const UniformGrid& gu,
                                   std::size_t extra_probes, std::uint64_t seed) {
  MembershipReport report;
  const std::size_t nu = gu.cell_count();
  std::vector<double> u(static_cast<std::size_t>(gu.dim()));

  auto probe = [&](std::span<const double> x, std::size_t xcell) {
    ++report.probes;
    c.eval_into(x, u);
    bool ok = false;
    if (const auto ucell = gu.locate(u))
      ok = ndd.w_mask.test(xcell * nu + *ucell);
    if (!ok) {
      ++report.violations;
      if (report.worst.size() < 16)
        report.worst.push_back({std::vector<double>(x.begin(), x.end()), u});
    }
  };

  const auto set_cells = ndd.x_mask.set_indices();
  std::vector<std::size_t> checked;
  checked.reserve(set_cells.size());
  for (std::size_t cell : set_cells)
    if (!ndd.origin_region.test(cell)) checked.push_back(cell);

  for (std::size_t cell : checked) {
    const auto center = gx.cell_center(cell);
    probe(center, cell);
  }
  if (!checked.empty()) {
    std::vector<double> lo(static_cast<std::size_t>(gx.dim()));
    std::vector<double> hi(static_cast<std::size_t>(gx.dim()));
    std::vector<double> x(static_cast<std::size_t>(gx.dim()));
    for (std::size_t k = 0; k < extra_probes; ++k) {
      const rng::Stream stream{rng::Domain::probes, k};
      const std::size_t pick = static_cast<std::size_t>(
          rng::uniform01(seed, stream, 0) * static_cast<double>(checked.size()));
      const std::size_t cell = checked[std::min(pick, checked.size() - 1)];
      gx.cell_bounds(cell, lo, hi);
      for (std::size_t d = 0; d < x.size(); ++d)
        x[d] = rng::uniform(seed, stream, 1 + d, lo[d], hi[d]);
      probe(x, cell);
    }
  }
  report.violation_fraction =
      report.probes ? static_cast<double>(report.violations) /
                          static_cast<double>(report.probes)
                    : 0.0;
  return report;
}

}  // namespace robdoa
