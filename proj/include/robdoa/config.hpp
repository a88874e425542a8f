#pragma once

#include <memory>
#include <optional>
#include <string>

#include "robdoa/controller.hpp"
#include "robdoa/doa.hpp"
#include "robdoa/optimizer.hpp"
#include "robdoa/simulator.hpp"

namespace robdoa {

/// Which candidate function a run uses.
struct LyapunovSpec {
  enum class Kind { fixed_expression, explicit_matrix, optimize };
  Kind kind = Kind::fixed_expression;
  std::string expression;       // fixed_expression
  int degree = 2;               // explicit_matrix / optimize (half-degree)
  std::vector<double> q;        // explicit_matrix, row-major r*r
  PsoConfig pso;                // optimize

  std::unique_ptr<Lyapunov> build(int state_dim) const;  // not for optimize
};

/// Everything a run needs, loadable from one JSON file. All seeds are
/// explicit; nothing is drawn from the clock.
struct RunConfig {
  // plant
  std::string plant_builtin = "paper-sec5";
  int state_dim = 1;
  int input_dim = 1;
  std::vector<std::string> nominal;      // empty -> builtin
  std::vector<std::string> error_bound;  // empty -> builtin

  // region + grid
  std::vector<double> x_lower{-2.0}, x_upper{2.0};
  std::vector<double> u_lower{-2.0}, u_upper{2.0};
  std::vector<std::size_t> x_counts{400};
  std::vector<std::size_t> u_counts{400};

  SampleConfig sample{1, 5'000'000, 500, 1'000'000};

  LyapunovSpec lyapunov;
  std::optional<LyapunovSpec> baseline;  // for the enlargement report

  // decrease-domain estimation
  double margin = 0.0;
  std::size_t min_samples_per_cell = 1;
  bool fill_origin_gap = true;

  AlphaSearchParams alpha;

  // controller
  std::size_t stride = 2;
  GpHyper gp;
  std::size_t probe_count = 1000;

  SimConfig sim;

  std::string output_dir = "out";
  int workers = 0;

  static RunConfig from_json_file(const std::string& path);
  static RunConfig from_json_text(const std::string& text);
  std::string to_canonical_json() const;
  std::uint64_t hash() const;
  void validate() const;

  PlantSet build_plant() const;
  UniformGrid state_grid() const;
  UniformGrid input_grid() const;
};

}  // namespace robdoa
