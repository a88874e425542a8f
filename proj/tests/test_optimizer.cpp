#include <doctest.h>

#include <cmath>

#include "robdoa/optimizer.hpp"

using namespace robdoa;

namespace {

UniformGrid line_grid(double lo, double hi, std::size_t cells) {
  return UniformGrid(Box::make({lo}, {hi}), {cells});
}

NddParams desk_params(std::uint64_t seed) {
  NddParams p;
  p.sample.seed = seed;
  p.sample.n_xu = 30000;
  p.sample.n_succ = 20;
  p.sample.n_x = 40000;
  return p;
}

AlphaSearchParams coarse_alpha() {
  AlphaSearchParams a;
  a.eps_init = 10.0;
  a.accuracy = 0.001;
  return a;
}

Eigen::MatrixXd q_star() {
  Eigen::MatrixXd q(2, 2);
  q << 0.3587, 0.9232, 1.0000, 0.8249;
  return q;
}

}  // namespace

TEST_SUITE("optimizer") {

TEST_CASE("swarm converges on a smooth stub objective") {
  // maximize -|q - target|^2 over a 2x2 matrix (4 coordinates)
  const double target[4] = {1.25, -0.5, 0.75, 2.0};
  const auto fitness = [&target](std::span<const double> q) {
    double s = 0.0;
    for (int i = 0; i < 4; ++i) s += (q[i] - target[i]) * (q[i] - target[i]);
    return -s;
  };
  PsoConfig cfg;
  cfg.swarm = 24;
  cfg.iterations = 200;
  cfg.seed = 3;
  const PsoResult result = pso_maximize(fitness, 4, cfg);
  for (int i = 0; i < 4; ++i)
    CHECK(std::fabs(result.best_position[static_cast<std::size_t>(i)] - target[i]) < 1e-2);
  CHECK(result.evaluations == 24u * 200u);
}

TEST_CASE("history is non-decreasing and deterministic") {
  const auto fitness = [](std::span<const double> q) {
    return -(q[0] * q[0]) + std::sin(q[1]);
  };
  PsoConfig cfg;
  cfg.swarm = 8;
  cfg.iterations = 40;
  cfg.seed = 11;
  const PsoResult a = pso_maximize(fitness, 2, cfg);
  const PsoResult b = pso_maximize(fitness, 2, cfg);
  CHECK(a.history == b.history);
  CHECK(a.best_position == b.best_position);
  for (std::size_t i = 1; i < a.history.size(); ++i)
    CHECK(a.history[i] >= a.history[i - 1]);
}

TEST_CASE("rank-deficient matrices score zero without throwing") {
  const VolumeObjective objective(PlantSet::builtin("paper-sec5"),
                                  line_grid(-2, 2, 40), line_grid(-2, 2, 40),
                                  MonomialBasis::make(1, 2), desk_params(5),
                                  coarse_alpha());
  const VolumeEval zero = objective.evaluate(Eigen::MatrixXd::Zero(2, 2));
  CHECK(zero.m == 0.0);
  CHECK(!zero.rank_ok);
  Eigen::MatrixXd singular(2, 2);
  singular << 1.0, 1.0, 1.0, 1.0;
  const VolumeEval s = objective.evaluate(singular);
  CHECK(s.m == 0.0);
  CHECK(!s.rank_ok);
  Eigen::MatrixXd bad = Eigen::MatrixXd::Identity(2, 2);
  bad(1, 1) = std::nan("");
  CHECK(objective.evaluate(bad).m == 0.0);
}

TEST_CASE("evaluation is a pure function of the matrix") {
  const VolumeObjective objective(PlantSet::builtin("paper-sec5"),
                                  line_grid(-2, 2, 40), line_grid(-2, 2, 40),
                                  MonomialBasis::make(1, 2), desk_params(7),
                                  coarse_alpha());
  const VolumeEval a = objective.evaluate(q_star());
  const VolumeEval b = objective.evaluate(q_star());
  CHECK(a.m == b.m);
  CHECK(a.alpha_star == b.alpha_star);
  CHECK(mask_eq(a.level_set, b.level_set));
  CHECK(a.rank_ok);
  CHECK(a.m > 0.0);
}

TEST_CASE("matrix scale does not change the accepted mask") {
  // With one shared sample set, scaling the matrix by c scales every label
  // and every lattice value by c^2; for binary powers this is exact.
  const PlantSet plant = PlantSet::builtin("paper-sec5");
  const UniformGrid gx = line_grid(-2, 2, 40);
  const UniformGrid gu = line_grid(-2, 2, 40);
  const MonomialBasis basis = MonomialBasis::make(1, 2);
  const NddParams np = desk_params(9);

  for (double c : {2.0, 10.0}) {
    CAPTURE(c);
    AlphaSearchParams a1 = coarse_alpha();
    a1.alpha_max = 1e7;
    AlphaSearchParams a2 = a1;
    a2.eps_init *= c * c;
    a2.accuracy *= c * c;
    a2.alpha_max *= c * c;
    // the objective normalizes internally, so compare through raw estimates
    const SosLyapunov l1(basis, q_star());
    const SosLyapunov l2(basis, c * q_star());
    const NddEstimate n1 = estimate_ndd(plant, l1, gx, gu, np);
    const NddEstimate n2 = estimate_ndd(plant, l2, gx, gu, np);
    CHECK(mask_eq(n1.w_mask, n2.w_mask));
    const StateSampleTable t1 =
        StateSampleTable::build(l1, gx, np.sample.n_x, np.sample.seed);
    const StateSampleTable t2 =
        StateSampleTable::build(l2, gx, np.sample.n_x, np.sample.seed);
    const AlphaResult r1 = search_alpha(t1, n1.x_mask, a1);
    const AlphaResult r2 = search_alpha(t2, n2.x_mask, a2);
    CHECK(mask_eq(r1.level_set.mask, r2.level_set.mask));
  }
}

TEST_CASE("full maximization improves on the swarm and recomputes the best") {
  const VolumeObjective objective(PlantSet::builtin("paper-sec5"),
                                  line_grid(-2, 2, 40), line_grid(-2, 2, 40),
                                  MonomialBasis::make(1, 2), desk_params(3),
                                  coarse_alpha());
  PsoConfig cfg;
  cfg.swarm = 6;
  cfg.iterations = 4;  // smoke-scale run
  cfg.seed = 17;
  const OptimizationResult result = maximize_volume(objective, cfg);
  CHECK(result.m_best == objective.evaluate(result.q_best).m);
  CHECK(result.history.size() == 4);
  CHECK(result.m_best >= result.history.front());
  CHECK(result.evaluations == 6u * 4u + 1u);
}

TEST_CASE("pso configuration validation") {
  PsoConfig cfg;
  cfg.swarm = 1;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg.swarm = 4;
  cfg.entry_lower = 2.0;
  cfg.entry_upper = 1.0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
}

}  // TEST_SUITE
