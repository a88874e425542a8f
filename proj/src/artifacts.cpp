#include "robdoa/artifacts.hpp"

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <json.hpp>

namespace robdoa {

using nlohmann::json;

const char* const kVersion = "0.1.0";

namespace {

constexpr std::uint32_t kMaskMagic = 0x4b4d4452u;  // "RDMK"
constexpr std::uint32_t kMaskVersion = 1;

template <class T>
void put(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::ifstream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw IoError("mask file truncated");
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void save_mask(const std::string& path, const CellMask& mask) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write mask file '" + path + "'");
  const UniformGrid& g = mask.grid();
  put(out, kMaskMagic);
  put(out, kMaskVersion);
  put(out, static_cast<std::uint32_t>(g.dim()));
  for (int i = 0; i < g.dim(); ++i)
    put(out, static_cast<std::uint64_t>(g.counts()[static_cast<std::size_t>(i)]));
  for (int i = 0; i < g.dim(); ++i) put(out, g.box().lower[static_cast<std::size_t>(i)]);
  for (int i = 0; i < g.dim(); ++i) put(out, g.box().upper[static_cast<std::size_t>(i)]);
  put(out, static_cast<std::uint64_t>(mask.size()));
  for (std::uint64_t w : mask.words()) put(out, w);
  if (!out) throw IoError("failed writing mask file '" + path + "'");
}

CellMask load_mask(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open mask file '" + path + "'");
  if (get<std::uint32_t>(in) != kMaskMagic)
    throw IoError("'" + path + "' is not a mask file");
  if (get<std::uint32_t>(in) != kMaskVersion)
    throw IoError("'" + path + "' has an unsupported mask version");
  const auto dim = get<std::uint32_t>(in);
  std::vector<std::size_t> counts(dim);
  for (auto& c : counts) c = static_cast<std::size_t>(get<std::uint64_t>(in));
  std::vector<double> lo(dim), hi(dim);
  for (auto& v : lo) v = get<double>(in);
  for (auto& v : hi) v = get<double>(in);
  UniformGrid grid(Box::make(std::move(lo), std::move(hi)), std::move(counts));
  const auto bits = get<std::uint64_t>(in);
  if (bits != grid.cell_count()) throw IoError("'" + path + "': bit count mismatch");
  CellMask mask(grid);
  for (auto& w : mask.words()) w = get<std::uint64_t>(in);
  return mask;
}

void ensure_dir(const std::string& path) {
  std::error_code ec;
  std::filesystem::create_directories(path, ec);
  if (ec) throw IoError("cannot create directory '" + path + "': " + ec.message());
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << text;
  if (!out) throw IoError("failed writing '" + path + "'");
}

void write_manifest(const std::string& path, const RunConfig& config,
                    const std::string& command) {
  json j;
  j["command"] = command;
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016llx",
                static_cast<unsigned long long>(config.hash()));
  j["config_hash"] = hash;
  j["seeds"] = {{"sample", config.sample.seed},
                {"sim", config.sim.seed},
                {"pso", config.lyapunov.pso.seed}};
  j["version"] = kVersion;
  j["config"] = json::parse(config.to_canonical_json());
  write_text(path, j.dump(2) + "\n");
}

void write_alpha_trace_jsonl(const std::string& path, const AlphaSearchTrace& trace) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path + "'");
  for (const auto& check : trace.checks) {
    json j = {{"alpha", check.alpha},
              {"contained", check.contained},
              {"epsilon", check.epsilon}};
    out << j.dump() << "\n";
  }
  json final = {{"alpha_star", trace.alpha_star},
                {"checks", trace.check_count()},
                {"never_contained", trace.never_contained},
                {"cap_hit", trace.cap_hit}};
  out << final.dump() << "\n";
}

void write_alpha_trace_csv(const std::string& path, const AlphaSearchTrace& trace) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << "alpha,contained\n";
  for (const auto& check : trace.checks)
    out << format_double(check.alpha) << "," << (check.contained ? 1 : 0) << "\n";
}

void write_ndd_meta(const std::string& path, const NddEstimate& est) {
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016llx",
                static_cast<unsigned long long>(est.plant_hash));
  json j = {{"plant_hash", hash},
            {"lyapunov", est.lyapunov},
            {"margin", est.margin},
            {"sample",
             {{"seed", est.sample.seed},
              {"n_xu", est.sample.n_xu},
              {"n_succ", est.sample.n_succ},
              {"n_x", est.sample.n_x}}},
            {"w_cells_set", est.w_mask.count()},
            {"x_cells_set", est.x_mask.count()},
            {"x_volume", est.x_mask.volume()}};
  write_text(path, j.dump(2) + "\n");
}

void write_training_csv(const std::string& path, const TrainingSet& ts) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path + "'");
  if (ts.size() == 0) throw IoError("empty training set");
  const std::size_t n = ts.states.front().size();
  const std::size_t m = ts.inputs.front().size();
  for (std::size_t j = 0; j < n; ++j) out << "x" << j + 1 << ",";
  for (std::size_t j = 0; j < m; ++j) out << "u" << j + 1 << (j + 1 < m ? "," : "\n");
  for (std::size_t i = 0; i < ts.size(); ++i) {
    for (std::size_t j = 0; j < n; ++j) out << format_double(ts.states[i][j]) << ",";
    for (std::size_t j = 0; j < m; ++j)
      out << format_double(ts.inputs[i][j]) << (j + 1 < m ? "," : "\n");
  }
}

void write_controller_json(const std::string& path, const Controller& c) {
  json j = {{"length_scales", c.length_scales()},
            {"signal_variance", c.signal_variance()},
            {"jitter_used", c.jitter_used()},
            {"training_pairs", c.training().size()},
            {"state_dim", c.state_dim()},
            {"input_dim", c.input_dim()}};
  write_text(path, j.dump(2) + "\n");
}

namespace {

void write_series_csv(const std::string& path, const TrajectoryBatch& batch,
                      bool noises) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path + "'");
  const std::size_t dim = batch.trajectories.empty()
                              ? 0
                              : batch.trajectories.front().states.front().size();
  out << "k,trajectory";
  for (std::size_t d = 0; d < dim; ++d) out << ",value" << d + 1;
  out << "\n";
  for (std::size_t t = 0; t < batch.trajectories.size(); ++t) {
    const auto& series = noises ? batch.trajectories[t].noises
                                : batch.trajectories[t].states;
    for (std::size_t k = 0; k < series.size(); ++k) {
      out << k << "," << t;
      for (double v : series[k]) out << "," << format_double(v);
      out << "\n";
    }
  }
}

}  // namespace

void write_trajectories_csv(const std::string& path, const TrajectoryBatch& batch) {
  write_series_csv(path, batch, false);
}

void write_noises_csv(const std::string& path, const TrajectoryBatch& batch) {
  write_series_csv(path, batch, true);
}

void write_figure_bundle(const std::string& dir, const NddEstimate& ndd,
                         const CellMask& doa, const UniformGrid& gx,
                         const UniformGrid& gu, const Controller* controller) {
  ensure_dir(dir);
  {
    std::ofstream out(dir + "/ndd_cells.csv", std::ios::trunc);
    out << "kind";
    for (int d = 0; d < gx.dim(); ++d) out << ",x" << d + 1;
    for (int d = 0; d < gu.dim(); ++d) out << ",u" << d + 1;
    out << "\n";
    const std::size_t nu = gu.cell_count();
    for (std::size_t t = 0; t < ndd.w_mask.size(); ++t) {
      if (!ndd.w_mask.test(t)) continue;
      const auto xc = gx.cell_center(t / nu);
      const auto uc = gu.cell_center(t % nu);
      out << "w";
      for (double v : xc) out << "," << format_double(v);
      for (double v : uc) out << "," << format_double(v);
      out << "\n";
    }
  }
  {
    std::ofstream out(dir + "/state_cells.csv", std::ios::trunc);
    out << "kind";
    for (int d = 0; d < gx.dim(); ++d) out << ",x" << d + 1;
    out << "\n";
    for (std::size_t i = 0; i < gx.cell_count(); ++i) {
      const bool in_x = ndd.x_mask.test(i);
      const bool in_doa = i < doa.size() && doa.test(i);
      if (!in_x && !in_doa) continue;
      const auto c = gx.cell_center(i);
      out << (in_doa ? "doa" : "ndd");
      for (double v : c) out << "," << format_double(v);
      out << "\n";
    }
  }
  if (controller && gx.dim() == 1) {
    std::ofstream out(dir + "/controller_curve.csv", std::ios::trunc);
    out << "x1";
    for (int d = 0; d < gu.dim(); ++d) out << ",u" << d + 1;
    out << "\n";
    const double lo = gx.box().lower[0];
    const double hi = gx.box().upper[0];
    const int samples = 801;
    std::vector<double> u(static_cast<std::size_t>(gu.dim()));
    for (int i = 0; i < samples; ++i) {
      const double x = lo + (hi - lo) * static_cast<double>(i) / (samples - 1);
      controller->eval_into(std::span<const double>(&x, 1), u);
      out << format_double(x);
      for (double v : u) out << "," << format_double(v);
      out << "\n";
    }
  }
}

}  // namespace robdoa
