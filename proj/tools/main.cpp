#include <CLI11.hpp>
#include <cstdio>
#include <iostream>

#include "robdoa/pipeline.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

robdoa::RunConfig load(const std::string& config_path, const std::string& output,
                       int workers) {
  robdoa::RunConfig config = robdoa::RunConfig::from_json_file(config_path);
  if (!output.empty()) config.output_dir = output;
  if (workers > 0) config.workers = workers;
#ifdef _OPENMP
  if (config.workers > 0) omp_set_num_threads(config.workers);
#endif
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Robust domain-of-attraction estimation for sampled nonlinear plant "
      "families: decrease-domain estimation, level-set search, candidate "
      "optimization, feedback synthesis, and closed-loop validation"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output;
  int workers = 0;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("-c,--config", config_path, "JSON run configuration")
        ->required();
    cmd->add_option("-o,--output", output, "override config output_dir");
    cmd->add_option("-w,--workers", workers,
                    "bound on worker threads (results are identical for any value)");
  };

  CLI::App* ndd = app.add_subcommand(
      "ndd", "estimate the robust decrease domains for the configured candidate");
  CLI::App* alpha = app.add_subcommand(
      "alpha", "search the largest admissible level set (needs ndd artifacts)");
  CLI::App* optimize = app.add_subcommand(
      "optimize", "swarm-search the candidate parameter matrix for maximal volume");
  CLI::App* controller = app.add_subcommand(
      "controller", "select training pairs, fit the feedback, verify membership");
  CLI::App* simulate = app.add_subcommand(
      "simulate", "closed-loop noisy rollouts from the estimated domain");
  CLI::App* pipeline = app.add_subcommand(
      "pipeline", "run every stage and write a summary");
  for (CLI::App* cmd : {ndd, alpha, optimize, controller, simulate, pipeline})
    add_common(cmd);

  CLI11_PARSE(app, argc, argv);

  try {
    const robdoa::RunConfig config = load(config_path, output, workers);
    if (ndd->parsed()) {
      const auto est = robdoa::run_ndd(config);
      std::printf("w cells set: %zu\nx cells set: %zu (volume %s)\n",
                  est.w_mask.count(), est.x_mask.count(),
                  robdoa::format_double(est.x_mask.volume()).c_str());
    } else if (alpha->parsed()) {
      const auto est = robdoa::load_ndd(config);
      const auto result = robdoa::run_alpha(config, est);
      std::printf("alpha_star = %s (volume %s, %zu checks)\n",
                  robdoa::format_double(result.trace.alpha_star).c_str(),
                  robdoa::format_double(result.level_set.mask.volume()).c_str(),
                  result.trace.check_count());
    } else if (optimize->parsed()) {
      const auto result = robdoa::run_optimize(config);
      std::printf("m_best = %s at alpha = %s after %zu evaluations\n",
                  robdoa::format_double(result.m_best).c_str(),
                  robdoa::format_double(result.alpha_best).c_str(),
                  result.evaluations);
    } else if (controller->parsed()) {
      const auto est = robdoa::load_ndd(config);
      const auto mu = robdoa::run_controller(config, est);
      std::printf("controller fitted on %zu pairs; membership clean\n",
                  mu.training().size());
    } else if (simulate->parsed()) {
      const auto est = robdoa::load_ndd(config);
      const std::string doa_path = config.output_dir + "/doa.mask";
      const auto mu = robdoa::run_controller(config, est);
      const auto doa = robdoa::load_mask(doa_path);
      const auto batch = robdoa::run_simulate(config, mu, doa);
      const auto summary = robdoa::summarize(batch);
      std::printf("converged %zu/%zu (fraction %s)\n", summary.converged,
                  summary.total, robdoa::format_double(summary.fraction).c_str());
    } else if (pipeline->parsed()) {
      const auto summary = robdoa::run_pipeline(config);
      std::fputs(summary.text.c_str(), stdout);
    }
  } catch (const robdoa::ValidationError& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return 2;
  } catch (const robdoa::PipelineError& e) {
    std::fprintf(stderr, "pipeline assertion failed: %s\n", e.what());
    return 3;
  } catch (const robdoa::IoError& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
