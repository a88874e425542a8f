#include "robdoa/config.hpp"

#include <fstream>
#include <json.hpp>

namespace robdoa {

using nlohmann::json;

std::unique_ptr<Lyapunov> LyapunovSpec::build(int state_dim) const {
  switch (kind) {
    case Kind::fixed_expression:
      return std::make_unique<FixedLyapunov>(expression, state_dim);
    case Kind::explicit_matrix: {
      MonomialBasis basis = MonomialBasis::make(state_dim, degree);
      const auto r = static_cast<Eigen::Index>(basis.size());
      if (q.size() != static_cast<std::size_t>(r * r))
        throw ValidationError("lyapunov.q must have " + std::to_string(r * r) +
                              " entries (row-major " + std::to_string(r) + "x" +
                              std::to_string(r) + ")");
      Eigen::MatrixXd qm(r, r);
      for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < r; ++j)
          qm(i, j) = q[static_cast<std::size_t>(i * r + j)];
      if (!SosLyapunov::check_full_rank(qm))
        throw ValidationError("lyapunov.q is rank deficient");
      return std::make_unique<SosLyapunov>(std::move(basis), std::move(qm));
    }
    case Kind::optimize:
      throw ValidationError("lyapunov.type=optimize has no fixed candidate; run the optimizer");
  }
  throw ValidationError("corrupt lyapunov spec");
}

namespace {

template <class T>
T field_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ValidationError(std::string("config field '") + key + "' has the wrong type");
  }
}

LyapunovSpec parse_lyapunov(const json& j, const char* where) {
  LyapunovSpec spec;
  const std::string type = field_or<std::string>(j, "type", "fixed");
  if (type == "fixed") {
    spec.kind = LyapunovSpec::Kind::fixed_expression;
    if (!j.contains("expr"))
      throw ValidationError(std::string(where) + ": fixed candidate needs 'expr'");
    spec.expression = j.at("expr").get<std::string>();
  } else if (type == "sos") {
    spec.kind = LyapunovSpec::Kind::explicit_matrix;
    spec.degree = field_or<int>(j, "d", 2);
    if (!j.contains("q"))
      throw ValidationError(std::string(where) + ": sos candidate needs 'q'");
    spec.q = j.at("q").get<std::vector<double>>();
  } else if (type == "optimize") {
    spec.kind = LyapunovSpec::Kind::optimize;
    spec.degree = field_or<int>(j, "d", 2);
    if (j.contains("pso")) {
      const json& p = j.at("pso");
      spec.pso.swarm = field_or<int>(p, "swarm", spec.pso.swarm);
      spec.pso.iterations = field_or<int>(p, "iterations", spec.pso.iterations);
      spec.pso.inertia = field_or<double>(p, "inertia", spec.pso.inertia);
      spec.pso.cognitive = field_or<double>(p, "cognitive", spec.pso.cognitive);
      spec.pso.social = field_or<double>(p, "social", spec.pso.social);
      spec.pso.entry_lower = field_or<double>(p, "entry_lower", spec.pso.entry_lower);
      spec.pso.entry_upper = field_or<double>(p, "entry_upper", spec.pso.entry_upper);
      spec.pso.velocity_clamp = field_or<double>(p, "velocity_clamp", spec.pso.velocity_clamp);
      spec.pso.seed = field_or<std::uint64_t>(p, "seed", spec.pso.seed);
    }
  } else {
    throw ValidationError(std::string(where) + ".type must be fixed | sos | optimize");
  }
  return spec;
}

json dump_lyapunov(const LyapunovSpec& spec) {
  json j;
  switch (spec.kind) {
    case LyapunovSpec::Kind::fixed_expression:
      j["type"] = "fixed";
      j["expr"] = spec.expression;
      break;
    case LyapunovSpec::Kind::explicit_matrix:
      j["type"] = "sos";
      j["d"] = spec.degree;
      j["q"] = spec.q;
      break;
    case LyapunovSpec::Kind::optimize:
      j["type"] = "optimize";
      j["d"] = spec.degree;
      j["pso"] = {{"swarm", spec.pso.swarm},
                  {"iterations", spec.pso.iterations},
                  {"inertia", spec.pso.inertia},
                  {"cognitive", spec.pso.cognitive},
                  {"social", spec.pso.social},
                  {"entry_lower", spec.pso.entry_lower},
                  {"entry_upper", spec.pso.entry_upper},
                  {"velocity_clamp", spec.pso.velocity_clamp},
                  {"seed", spec.pso.seed}};
      break;
  }
  return j;
}

}  // namespace

RunConfig RunConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return from_json_text(text);
}

RunConfig RunConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig c;
  if (j.contains("plant")) {
    const json& p = j.at("plant");
    if (p.contains("builtin")) {
      c.plant_builtin = p.at("builtin").get<std::string>();
      const PlantSet plant = PlantSet::builtin(c.plant_builtin);
      c.state_dim = plant.state_dim();
      c.input_dim = plant.input_dim();
    } else {
      c.plant_builtin.clear();
      c.state_dim = field_or<int>(p, "n", 1);
      c.input_dim = field_or<int>(p, "m", 1);
      if (!p.contains("nominal") || !p.contains("delta"))
        throw ValidationError("plant: custom plants need 'nominal' and 'delta' expression lists");
      c.nominal = p.at("nominal").get<std::vector<std::string>>();
      c.error_bound = p.at("delta").get<std::vector<std::string>>();
    }
  }
  if (j.contains("region")) {
    const json& r = j.at("region");
    c.x_lower = field_or<std::vector<double>>(r, "x_lower", c.x_lower);
    c.x_upper = field_or<std::vector<double>>(r, "x_upper", c.x_upper);
    c.u_lower = field_or<std::vector<double>>(r, "u_lower", c.u_lower);
    c.u_upper = field_or<std::vector<double>>(r, "u_upper", c.u_upper);
  }
  if (j.contains("grid")) {
    const json& g = j.at("grid");
    c.x_counts = field_or<std::vector<std::size_t>>(g, "x_counts", c.x_counts);
    c.u_counts = field_or<std::vector<std::size_t>>(g, "u_counts", c.u_counts);
  }
  if (j.contains("sample")) {
    const json& s = j.at("sample");
    c.sample.seed = field_or<std::uint64_t>(s, "seed", c.sample.seed);
    c.sample.n_xu = field_or<std::size_t>(s, "n_xu", c.sample.n_xu);
    c.sample.n_succ = field_or<std::size_t>(s, "n_succ", c.sample.n_succ);
    c.sample.n_x = field_or<std::size_t>(s, "n_x", c.sample.n_x);
  }
  if (j.contains("lyapunov")) c.lyapunov = parse_lyapunov(j.at("lyapunov"), "lyapunov");
  if (j.contains("baseline")) c.baseline = parse_lyapunov(j.at("baseline"), "baseline");
  if (j.contains("ndd")) {
    const json& n = j.at("ndd");
    c.margin = field_or<double>(n, "margin", c.margin);
    c.min_samples_per_cell =
        field_or<std::size_t>(n, "min_samples_per_cell", c.min_samples_per_cell);
    c.fill_origin_gap = field_or<bool>(n, "fill_origin_gap", c.fill_origin_gap);
  }
  if (j.contains("alpha")) {
    const json& a = j.at("alpha");
    c.alpha.eps_init = field_or<double>(a, "eps_init", c.alpha.eps_init);
    c.alpha.accuracy = field_or<double>(a, "accuracy", c.alpha.accuracy);
    c.alpha.alpha_max = field_or<double>(a, "alpha_max", c.alpha.alpha_max);
    c.alpha.reject_boundary_leak =
        field_or<bool>(a, "reject_boundary_leak", c.alpha.reject_boundary_leak);
  }
  if (j.contains("controller")) {
    const json& k = j.at("controller");
    c.stride = field_or<std::size_t>(k, "stride", c.stride);
    c.gp.length_scale_cells =
        field_or<double>(k, "length_scale_cells", c.gp.length_scale_cells);
    c.gp.signal_variance = field_or<double>(k, "signal_variance", c.gp.signal_variance);
    c.gp.jitter = field_or<double>(k, "jitter", c.gp.jitter);
    c.probe_count = field_or<std::size_t>(k, "probe_count", c.probe_count);
  }
  if (j.contains("sim")) {
    const json& s = j.at("sim");
    c.sim.trajectories = field_or<std::size_t>(s, "trajectories", c.sim.trajectories);
    c.sim.max_steps = field_or<std::size_t>(s, "max_steps", c.sim.max_steps);
    c.sim.radius = field_or<double>(s, "radius", c.sim.radius);
    c.sim.seed = field_or<std::uint64_t>(s, "seed", c.sim.seed);
    c.sim.zero_noise = field_or<bool>(s, "zero_noise", c.sim.zero_noise);
  }
  c.output_dir = field_or<std::string>(j, "output_dir", c.output_dir);
  c.workers = field_or<int>(j, "workers", c.workers);
  c.validate();
  return c;
}

std::string RunConfig::to_canonical_json() const {
  json j;
  if (!plant_builtin.empty()) {
    j["plant"] = {{"builtin", plant_builtin}};
  } else {
    j["plant"] = {{"n", state_dim}, {"m", input_dim}, {"nominal", nominal}, {"delta", error_bound}};
  }
  j["region"] = {{"x_lower", x_lower}, {"x_upper", x_upper},
                 {"u_lower", u_lower}, {"u_upper", u_upper}};
  j["grid"] = {{"x_counts", x_counts}, {"u_counts", u_counts}};
  j["sample"] = {{"seed", sample.seed}, {"n_xu", sample.n_xu},
                 {"n_succ", sample.n_succ}, {"n_x", sample.n_x}};
  j["lyapunov"] = dump_lyapunov(lyapunov);
  if (baseline) j["baseline"] = dump_lyapunov(*baseline);
  j["ndd"] = {{"margin", margin}, {"min_samples_per_cell", min_samples_per_cell},
              {"fill_origin_gap", fill_origin_gap}};
  j["alpha"] = {{"eps_init", alpha.eps_init}, {"accuracy", alpha.accuracy},
                {"alpha_max", alpha.alpha_max},
                {"reject_boundary_leak", alpha.reject_boundary_leak}};
  j["controller"] = {{"stride", stride},
                     {"length_scale_cells", gp.length_scale_cells},
                     {"signal_variance", gp.signal_variance},
                     {"jitter", gp.jitter},
                     {"probe_count", probe_count}};
  j["sim"] = {{"trajectories", sim.trajectories}, {"max_steps", sim.max_steps},
              {"radius", sim.radius}, {"seed", sim.seed},
              {"zero_noise", sim.zero_noise}};
  return j.dump(2);
}

std::uint64_t RunConfig::hash() const {
  const std::string text = to_canonical_json();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

void RunConfig::validate() const {
  const auto n = static_cast<std::size_t>(state_dim);
  const auto m = static_cast<std::size_t>(input_dim);
  if (x_lower.size() != n || x_upper.size() != n)
    throw ValidationError("region.x bounds must have length n=" + std::to_string(state_dim));
  if (u_lower.size() != m || u_upper.size() != m)
    throw ValidationError("region.u bounds must have length m=" + std::to_string(input_dim));
  if (x_counts.size() != n)
    throw ValidationError("grid.x_counts must have length n=" + std::to_string(state_dim));
  if (u_counts.size() != m)
    throw ValidationError("grid.u_counts must have length m=" + std::to_string(input_dim));
  const Box xr = Box::make(x_lower, x_upper);
  const Box ur = Box::make(u_lower, u_upper);
  if (!xr.contains_origin_interior())
    throw ValidationError("region.x must contain the origin in its interior");
  if (!ur.contains_origin_interior())
    throw ValidationError("region.u must contain the origin in its interior");
  for (std::size_t c : x_counts)
    if (c < 1) throw ValidationError("grid.x_counts entries must be at least 1");
  for (std::size_t c : u_counts)
    if (c < 1) throw ValidationError("grid.u_counts entries must be at least 1");
  sample.validate();
  alpha.validate();
  gp.validate();
  sim.validate();
  if (stride < 1) throw ValidationError("controller.stride must be at least 1");
  if (workers < 0) throw ValidationError("workers must be nonnegative");
}

PlantSet RunConfig::build_plant() const {
  if (!plant_builtin.empty()) return PlantSet::builtin(plant_builtin);
  return PlantSet::from_expressions(state_dim, input_dim, nominal, error_bound);
}

UniformGrid RunConfig::state_grid() const {
  return UniformGrid(Box::make(x_lower, x_upper), x_counts);
}

UniformGrid RunConfig::input_grid() const {
  return UniformGrid(Box::make(u_lower, u_upper), u_counts);
}

}  // namespace robdoa
