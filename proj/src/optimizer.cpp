#include "robdoa/optimizer.hpp"

#include <algorithm>
#include <cmath>

namespace robdoa {

void PsoConfig::validate() const {
  if (swarm < 2) throw ValidationError("pso.swarm must be at least 2");
  if (iterations < 1) throw ValidationError("pso.iterations must be at least 1");
  if (!(entry_lower < entry_upper))
    throw ValidationError("pso entry bounds must satisfy lower < upper");
  if (!std::isfinite(entry_lower) || !std::isfinite(entry_upper))
    throw ValidationError("pso entry bounds must be finite");
  if (!(velocity_clamp > 0.0))
    throw ValidationError("pso.velocity_clamp must be positive");
}

PsoResult pso_maximize(const std::function<double(std::span<const double>)>& fitness,
                       int dims, const PsoConfig& cfg) {
  cfg.validate();
  if (dims < 1) throw ValidationError("pso: dims must be at least 1");
  const auto d = static_cast<std::size_t>(dims);
  const auto swarm = static_cast<std::size_t>(cfg.swarm);

  std::vector<std::vector<double>> pos(swarm, std::vector<double>(d));
  std::vector<std::vector<double>> vel(swarm, std::vector<double>(d, 0.0));
  std::vector<std::vector<double>> pbest_pos(swarm, std::vector<double>(d));
  std::vector<double> pbest_val(swarm, -std::numeric_limits<double>::infinity());
  std::vector<double> fit(swarm);

  for (std::size_t p = 0; p < swarm; ++p) {
    const rng::Stream stream{rng::Domain::pso_init, p};
    for (std::size_t k = 0; k < d; ++k)
      pos[p][k] = rng::uniform(cfg.seed, stream, k, cfg.entry_lower, cfg.entry_upper);
  }

  PsoResult result;
  result.best_value = -std::numeric_limits<double>::infinity();
  result.best_position.assign(d, 0.0);

  for (int iter = 0; iter < cfg.iterations; ++iter) {
    for (std::size_t p = 0; p < swarm; ++p) {
      fit[p] = fitness(pos[p]);
      ++result.evaluations;
    }
    // Fold bests in particle order so the outcome does not depend on how the
    // fitness calls were scheduled.
    for (std::size_t p = 0; p < swarm; ++p) {
      if (fit[p] > pbest_val[p]) {
        pbest_val[p] = fit[p];
        pbest_pos[p] = pos[p];
      }
      if (fit[p] > result.best_value) {
        result.best_value = fit[p];
        result.best_position = pos[p];
      }
    }
    result.history.push_back(result.best_value);

    for (std::size_t p = 0; p < swarm; ++p) {
      const rng::Stream stream{rng::Domain::pso_step,
                               static_cast<std::uint64_t>(iter) * swarm + p};
      for (std::size_t k = 0; k < d; ++k) {
        const double r1 = rng::uniform01(cfg.seed, stream, 2 * k);
        const double r2 = rng::uniform01(cfg.seed, stream, 2 * k + 1);
        double v = cfg.inertia * vel[p][k] +
                   cfg.cognitive * r1 * (pbest_pos[p][k] - pos[p][k]) +
                   cfg.social * r2 * (result.best_position[k] - pos[p][k]);
        v = std::clamp(v, -cfg.velocity_clamp, cfg.velocity_clamp);
        vel[p][k] = v;
        pos[p][k] = std::clamp(pos[p][k] + v, cfg.entry_lower, cfg.entry_upper);
      }
    }
  }
  return result;
}

VolumeObjective::VolumeObjective(PlantSet plant, UniformGrid gx, UniformGrid gu,
                                 MonomialBasis basis, NddParams ndd_params,
                                 AlphaSearchParams alpha_params, double rank_tol)
    : plant_(std::move(plant)),
      gx_(std::move(gx)),
      gu_(std::move(gu)),
      basis_(std::move(basis)),
      ndd_params_(ndd_params),
      alpha_params_(alpha_params),
      rank_tol_(rank_tol) {
  ndd_params_.sample.validate();
  alpha_params_.validate();
  // Cache per-point state unless it would dominate memory.
  constexpr std::size_t kCacheLimitBytes = std::size_t{1} << 30;
  if (PointCache::bytes_needed(plant_.state_dim(), plant_.input_dim(),
                               ndd_params_.sample.n_xu) <= kCacheLimitBytes) {
    cache_ = std::make_shared<const PointCache>(PointCache::build(
        plant_, gx_, gu_, ndd_params_.sample, ndd_params_.workers));
  }
}

VolumeEval VolumeObjective::evaluate(const Eigen::MatrixXd& q) const {
  VolumeEval out;
  out.level_set = CellMask(gx_);
  if (!q.allFinite()) return out;
  const double norm = q.norm();
  if (!(norm > 0.0)) return out;
  const Eigen::MatrixXd qn = q / norm;
  if (!SosLyapunov::check_full_rank(qn, rank_tol_)) return out;
  out.rank_ok = true;

  const SosLyapunov L(basis_, qn);
  const NddEstimate ndd =
      cache_ ? estimate_ndd(*cache_, plant_, L, gx_, gu_, ndd_params_)
             : estimate_ndd(plant_, L, gx_, gu_, ndd_params_);
  const StateSampleTable table = StateSampleTable::build(
      L, gx_, ndd_params_.sample.n_x, ndd_params_.sample.seed,
      ndd_params_.workers);
  AlphaSearchParams ap = alpha_params_;
  ap.alpha_max = std::min(ap.alpha_max, default_alpha_cap(L, gx_.box()));
  AlphaResult ar = search_alpha(table, ndd.x_mask, ap);
  out.m = ar.level_set.mask.volume();
  out.alpha_star = ar.trace.alpha_star;
  out.level_set = std::move(ar.level_set.mask);
  out.trace = std::move(ar.trace);
  return out;
}

OptimizationResult maximize_volume(const VolumeObjective& objective,
                                   const PsoConfig& cfg) {
  const auto r = static_cast<int>(objective.basis_size());
  const int dims = r * r;
  auto fitness = [&objective, r](std::span<const double> flat) {
    Eigen::MatrixXd q(r, r);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j)
        q(i, j) = flat[static_cast<std::size_t>(i * r + j)];
    return objective.evaluate(q).m;
  };
  const PsoResult pso = pso_maximize(fitness, dims, cfg);

  OptimizationResult result;
  result.q_best = Eigen::MatrixXd(r, r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j)
      result.q_best(i, j) = pso.best_position[static_cast<std::size_t>(i * r + j)];
  const VolumeEval final_eval = objective.evaluate(result.q_best);
  result.m_best = final_eval.m;
  result.alpha_best = final_eval.alpha_star;
  result.level_set = final_eval.level_set;
  result.history = pso.history;
  result.evaluations = pso.evaluations + 1;
  return result;
}

}  // namespace robdoa
