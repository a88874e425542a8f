#include "robdoa/pipeline.hpp"

#include <filesystem>
#include <json.hpp>
#include <sstream>

namespace robdoa {

using nlohmann::json;

namespace {

NddParams ndd_params_from(const RunConfig& config) {
  NddParams p;
  p.sample = config.sample;
  p.margin = config.margin;
  p.min_samples_per_cell = config.min_samples_per_cell;
  p.fill_origin_gap = config.fill_origin_gap;
  p.workers = config.workers;
  return p;
}

AlphaSearchParams alpha_params_from(const RunConfig& config, const Lyapunov& L,
                                    const Box& region) {
  AlphaSearchParams p = config.alpha;
  p.alpha_max = std::min(p.alpha_max, default_alpha_cap(L, region));
  return p;
}

void require_artifact(const std::string& path, const char* producer) {
  if (!std::filesystem::exists(path))
    throw ValidationError("missing artifact '" + path + "'; run the '" +
                          std::string(producer) + "' command first");
}

}  // namespace

NddEstimate run_ndd(const RunConfig& config) {
  config.validate();
  const PlantSet plant = config.build_plant();
  const auto L = config.lyapunov.build(plant.state_dim());
  const UniformGrid gx = config.state_grid();
  const UniformGrid gu = config.input_grid();
  NddEstimate est = estimate_ndd(plant, *L, gx, gu, ndd_params_from(config));

  ensure_dir(config.output_dir);
  save_mask(config.output_dir + "/ndd_w.mask", est.w_mask);
  save_mask(config.output_dir + "/ndd_x.mask", est.x_mask);
  save_mask(config.output_dir + "/ndd_origin.mask", est.origin_region);
  write_ndd_meta(config.output_dir + "/ndd_meta.json", est);
  write_manifest(config.output_dir + "/manifest_ndd.json", config, "ndd");
  return est;
}

NddEstimate load_ndd(const RunConfig& config) {
  const std::string base = config.output_dir;
  require_artifact(base + "/ndd_w.mask", "ndd");
  require_artifact(base + "/ndd_x.mask", "ndd");
  require_artifact(base + "/ndd_origin.mask", "ndd");
  NddEstimate est;
  est.w_mask = load_mask(base + "/ndd_w.mask");
  est.x_mask = load_mask(base + "/ndd_x.mask");
  est.origin_region = load_mask(base + "/ndd_origin.mask");
  if (est.x_mask.grid() != config.state_grid() ||
      est.w_mask.grid() != product_grid(config.state_grid(), config.input_grid()))
    throw ValidationError("stored decrease-domain masks do not match this config's grids");
  est.sample = config.sample;
  est.margin = config.margin;
  return est;
}

AlphaResult run_alpha(const RunConfig& config, const NddEstimate& ndd) {
  config.validate();
  const PlantSet plant = config.build_plant();
  const auto L = config.lyapunov.build(plant.state_dim());
  const UniformGrid gx = config.state_grid();
  const StateSampleTable table = StateSampleTable::build(
      *L, gx, config.sample.n_x, config.sample.seed, config.workers);
  AlphaResult result =
      search_alpha(table, ndd.x_mask, alpha_params_from(config, *L, gx.box()));

  ensure_dir(config.output_dir);
  write_alpha_trace_jsonl(config.output_dir + "/alpha_trace.jsonl", result.trace);
  write_alpha_trace_csv(config.output_dir + "/alpha_trace.csv", result.trace);
  save_mask(config.output_dir + "/doa.mask", result.level_set.mask);
  json j = {{"alpha_star", result.trace.alpha_star},
            {"volume", result.level_set.mask.volume()},
            {"checks", result.trace.check_count()},
            {"never_contained", result.trace.never_contained},
            {"cap_hit", result.trace.cap_hit}};
  write_text(config.output_dir + "/doa.json", j.dump(2) + "\n");
  write_manifest(config.output_dir + "/manifest_alpha.json", config, "alpha");
  return result;
}

OptimizationResult run_optimize(const RunConfig& config) {
  config.validate();
  if (config.lyapunov.kind != LyapunovSpec::Kind::optimize)
    throw ValidationError("optimize command needs lyapunov.type = \"optimize\"");
  const PlantSet plant = config.build_plant();
  const UniformGrid gx = config.state_grid();
  const UniformGrid gu = config.input_grid();
  MonomialBasis basis = MonomialBasis::make(plant.state_dim(), config.lyapunov.degree);
  AlphaSearchParams ap = config.alpha;  // per-candidate cap applied inside
  VolumeObjective objective(plant, gx, gu, std::move(basis),
                            ndd_params_from(config), ap);
  OptimizationResult result = maximize_volume(objective, config.lyapunov.pso);

  ensure_dir(config.output_dir);
  std::vector<double> q_flat;
  for (Eigen::Index i = 0; i < result.q_best.rows(); ++i)
    for (Eigen::Index j = 0; j < result.q_best.cols(); ++j)
      q_flat.push_back(result.q_best(i, j));
  json j = {{"q_best", q_flat},
            {"r", result.q_best.rows()},
            {"m_best", result.m_best},
            {"alpha_best", result.alpha_best},
            {"history", result.history},
            {"evaluations", result.evaluations}};
  write_text(config.output_dir + "/optimize.json", j.dump(2) + "\n");
  save_mask(config.output_dir + "/optimize_levelset.mask", result.level_set);
  write_manifest(config.output_dir + "/manifest_optimize.json", config, "optimize");
  return result;
}

Controller run_controller(const RunConfig& config, const NddEstimate& ndd) {
  config.validate();
  const UniformGrid gx = config.state_grid();
  const UniformGrid gu = config.input_grid();
  std::vector<std::string> warnings;
  const TrainingSet ts = select_training(ndd, gx, gu, config.stride, &warnings);
  const Controller mu = Controller::fit(ts, config.gp, gx.widths());

  ensure_dir(config.output_dir);
  write_training_csv(config.output_dir + "/training.csv", ts);
  write_controller_json(config.output_dir + "/controller.json", mu);
  const MembershipReport report =
      verify_membership(mu, ndd, gx, gu, config.probe_count, config.sample.seed);
  json j = {{"probes", report.probes},
            {"violations", report.violations},
            {"violation_fraction", report.violation_fraction},
            {"warnings", warnings}};
  write_text(config.output_dir + "/membership.json", j.dump(2) + "\n");
  write_manifest(config.output_dir + "/manifest_controller.json", config, "controller");
  if (!report.clean())
    throw PipelineError("controller membership check failed: " +
                        std::to_string(report.violations) + " of " +
                        std::to_string(report.probes) + " probes left the admissible cells");
  return mu;
}

TrajectoryBatch run_simulate(const RunConfig& config, const Controller& mu,
                             const CellMask& doa) {
  config.validate();
  const PlantSet plant = config.build_plant();
  TrajectoryBatch batch = simulate(plant, mu, doa, config.sim, config.workers);
  const SimSummary summary = summarize(batch);

  ensure_dir(config.output_dir);
  write_trajectories_csv(config.output_dir + "/trajectories.csv", batch);
  write_noises_csv(config.output_dir + "/noises.csv", batch);
  json j = {{"trajectories", summary.total},
            {"converged", summary.converged},
            {"aborted", summary.aborted},
            {"fraction", summary.fraction},
            {"median_step", summary.median_step},
            {"p95_step", summary.p95_step},
            {"max_excursion", summary.max_excursion}};
  write_text(config.output_dir + "/sim_summary.json", j.dump(2) + "\n");
  write_manifest(config.output_dir + "/manifest_simulate.json", config, "simulate");
  return batch;
}

PipelineSummary run_pipeline(const RunConfig& config) {
  config.validate();
  RunConfig stage = config;

  // Resolve the candidate function, optimizing if asked.
  if (config.lyapunov.kind == LyapunovSpec::Kind::optimize) {
    const OptimizationResult opt = run_optimize(config);
    LyapunovSpec chosen;
    chosen.kind = LyapunovSpec::Kind::explicit_matrix;
    chosen.degree = config.lyapunov.degree;
    for (Eigen::Index i = 0; i < opt.q_best.rows(); ++i)
      for (Eigen::Index j = 0; j < opt.q_best.cols(); ++j)
        chosen.q.push_back(opt.q_best(i, j));
    stage.lyapunov = chosen;
  }

  const NddEstimate ndd = run_ndd(stage);
  const AlphaResult alpha = run_alpha(stage, ndd);
  const Controller mu = run_controller(stage, ndd);
  const TrajectoryBatch batch = run_simulate(stage, mu, alpha.level_set.mask);
  const SimSummary sim = summarize(batch);

  PipelineSummary out;
  out.alpha_star = alpha.trace.alpha_star;
  out.doa_volume = alpha.level_set.mask.volume();
  out.sim_fraction = sim.fraction;

  if (config.baseline) {
    RunConfig base = stage;
    base.lyapunov = *config.baseline;
    base.output_dir = config.output_dir + "/baseline";
    const NddEstimate base_ndd = run_ndd(base);
    const AlphaResult base_alpha = run_alpha(base, base_ndd);
    out.baseline_volume = base_alpha.level_set.mask.volume();
    if (*out.baseline_volume > 0.0)
      out.enlargement = out.doa_volume / *out.baseline_volume;
  }

  write_figure_bundle(config.output_dir + "/figures", ndd, alpha.level_set.mask,
                      stage.state_grid(), stage.input_grid(), &mu);

  std::ostringstream text;
  text << "alpha_star = " << format_double(out.alpha_star) << "\n";
  text << "doa_volume = " << format_double(out.doa_volume) << "\n";
  if (out.baseline_volume)
    text << "baseline_volume = " << format_double(*out.baseline_volume) << "\n";
  if (out.enlargement)
    text << "enlargement = " << format_double(*out.enlargement) << "\n";
  text << "membership_violations = 0\n";
  text << "sim_converged_fraction = " << format_double(sim.fraction) << "\n";
  out.text = text.str();

  json j = {{"alpha_star", out.alpha_star},
            {"doa_volume", out.doa_volume},
            {"sim_fraction", out.sim_fraction},
            {"membership_violations", 0}};
  if (out.baseline_volume) j["baseline_volume"] = *out.baseline_volume;
  if (out.enlargement) j["enlargement"] = *out.enlargement;
  write_text(config.output_dir + "/summary.json", j.dump(2) + "\n");
  write_manifest(config.output_dir + "/manifest_pipeline.json", config, "pipeline");
  return out;
}

}  // namespace robdoa
