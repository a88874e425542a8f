#include <doctest.h>

#include <cmath>

#include "robdoa/simulator.hpp"

using namespace robdoa;

namespace {

UniformGrid line_grid(double lo, double hi, std::size_t cells) {
  return UniformGrid(Box::make({lo}, {hi}), {cells});
}

// mu(x) = 2.2 x fitted from two anchor pairs: near the origin the benchmark
// nominal map behaves like -2.2 x + u, so this feedback cancels it.
Controller linear_feedback() {
  TrainingSet ts;
  ts.states = {{0.0}, {0.05}, {-0.05}};
  ts.inputs = {{0.0}, {0.11}, {-0.11}};
  GpHyper hyper;
  hyper.length_scale_cells = 5.0;
  const double widths[1] = {0.02};
  return Controller::fit(ts, hyper, widths);
}

}  // namespace

TEST_SUITE("simulator") {

TEST_CASE("the origin is a fixed point of the closed loop") {
  const PlantSet plant = PlantSet::builtin("paper-sec5");
  const Controller mu = linear_feedback();
  const double x0 = 0.0;
  double noise = -1.0;
  const auto next = closed_loop_step(plant, mu, std::span<const double>(&x0, 1),
                                     5, 0, 0, false, std::span<double>(&noise, 1));
  CHECK(next[0] == 0.0);  // exact: nominal, bound, feedback all vanish
  CHECK(noise == 0.0);
}

TEST_CASE("noise never exceeds the state-dependent bound") {
  const PlantSet plant = PlantSet::builtin("paper-sec5");
  const Controller mu = linear_feedback();
  std::vector<double> x{0.04}, u(1), bound(1), noise(1);
  for (std::size_t k = 0; k < 50; ++k) {
    mu.eval_into(x, u);
    plant.error_bound_into(x, u, bound);
    const auto next = closed_loop_step(plant, mu, x, 77, 3, k, false, noise);
    REQUIRE(std::fabs(noise[0]) <= bound[0]);
    x = next;
  }
}

TEST_CASE("batches converge from a small region around the origin") {
  const PlantSet plant = PlantSet::builtin("paper-sec5");
  const Controller mu = linear_feedback();
  const UniformGrid g = line_grid(-2.0, 2.0, 100);  // width 0.04
  CellMask doa(g);
  doa.set(49);  // [-0.04, 0)
  doa.set(50);  // [0, 0.04)
  SimConfig cfg;
  cfg.trajectories = 200;
  cfg.max_steps = 60;
  cfg.radius = 1e-3;
  cfg.seed = 12;
  const TrajectoryBatch batch = simulate(plant, mu, doa, cfg);
  const SimSummary s = summarize(batch);
  CHECK(s.total == 200);
  CHECK(s.fraction == 1.0);
  CHECK(s.aborted == 0);
  CHECK(s.max_excursion < 0.2);

  SUBCASE("zero-noise mode also converges") {
    SimConfig quiet = cfg;
    quiet.zero_noise = true;
    const SimSummary qs = summarize(simulate(plant, mu, doa, quiet));
    CHECK(qs.fraction == 1.0);
    for (const auto& tr : simulate(plant, mu, doa, quiet).trajectories)
      for (const auto& e : tr.noises) CHECK(e[0] == 0.0);
  }
}

TEST_CASE("initial states stay inside the chosen cells") {
  const PlantSet plant = PlantSet::builtin("paper-sec5");
  const Controller mu = linear_feedback();
  const UniformGrid g = line_grid(-2.0, 2.0, 100);
  CellMask doa(g);
  doa.set(52);  // [0.08, 0.12)
  SimConfig cfg;
  cfg.trajectories = 64;
  cfg.max_steps = 5;
  cfg.seed = 5;
  const TrajectoryBatch batch = simulate(plant, mu, doa, cfg);
  for (const auto& tr : batch.trajectories) {
    REQUIRE(tr.states.front()[0] >= 0.08);
    REQUIRE(tr.states.front()[0] < 0.12);
  }
}

TEST_CASE("batches are reproducible and worker-independent") {
  const PlantSet plant = PlantSet::builtin("paper-sec5");
  const Controller mu = linear_feedback();
  const UniformGrid g = line_grid(-2.0, 2.0, 100);
  CellMask doa(g);
  doa.set(49);
  doa.set(50);
  SimConfig cfg;
  cfg.trajectories = 50;
  cfg.max_steps = 40;
  cfg.seed = 9;
  const TrajectoryBatch a = simulate(plant, mu, doa, cfg, 1);
  const TrajectoryBatch b = simulate(plant, mu, doa, cfg, 2);
  REQUIRE(a.trajectories.size() == b.trajectories.size());
  for (std::size_t t = 0; t < a.trajectories.size(); ++t) {
    REQUIRE(a.trajectories[t].states == b.trajectories[t].states);
    REQUIRE(a.trajectories[t].noises == b.trajectories[t].noises);
    REQUIRE(a.trajectories[t].converged_step == b.trajectories[t].converged_step);
  }
}

TEST_CASE("summaries reject empty batches and flag failures") {
  CHECK_THROWS_AS(summarize(TrajectoryBatch{}), Error);
  TrajectoryBatch batch;
  Trajectory t1;
  t1.states = {{0.5}, {0.2}, {0.0}};
  t1.converged_step = 2;
  Trajectory t2;
  t2.states = {{1.5}, {2.5}};
  batch.trajectories = {t1, t2};
  const SimSummary s = summarize(batch);
  CHECK(s.fraction == 0.5);
  CHECK(s.max_excursion == 2.5);
  CHECK(s.median_step == 2);
}

TEST_CASE("configuration validation") {
  SimConfig cfg;
  cfg.trajectories = 0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg.trajectories = 10;
  cfg.radius = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  const PlantSet plant = PlantSet::builtin("paper-sec5");
  const Controller mu = linear_feedback();
  const UniformGrid g = line_grid(-2.0, 2.0, 10);
  CHECK_THROWS_AS(simulate(plant, mu, CellMask(g), SimConfig{}), ValidationError);
}

}  // TEST_SUITE
