#include "robdoa/sampler.hpp"

namespace robdoa {

void SampleConfig::validate() const {
  if (n_xu < 1) throw ValidationError("sample.n_xu must be at least 1");
  if (n_succ < 1) throw ValidationError("sample.n_succ must be at least 1");
  if (n_x < 1) throw ValidationError("sample.n_x must be at least 1");
}

void sample_box_point(const Box& box, std::uint64_t seed, rng::Stream stream,
                      std::size_t index, std::span<double> out) {
  const auto d = static_cast<std::size_t>(box.dim());
  for (std::size_t j = 0; j < d; ++j)
    out[j] = rng::uniform(seed, stream, index * d + j, box.lower[j], box.upper[j]);
}

std::vector<std::vector<double>> sample_box(const Box& box, std::size_t count,
                                            std::uint64_t seed,
                                            rng::Stream stream) {
  std::vector<std::vector<double>> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    out[i].resize(static_cast<std::size_t>(box.dim()));
    sample_box_point(box, seed, stream, i, out[i]);
  }
  return out;
}

void successor_point(std::span<const double> lo, std::span<const double> hi,
                     std::uint64_t seed, std::uint64_t point_index,
                     std::size_t draw, std::span<double> out) {
  const rng::Stream stream{rng::Domain::successors, point_index};
  const std::size_t d = lo.size();
  for (std::size_t j = 0; j < d; ++j)
    out[j] = rng::uniform(seed, stream, draw * d + j, lo[j], hi[j]);
}

std::vector<std::vector<double>> sample_successors(const PlantSet& plant,
                                                   std::span<const double> x,
                                                   std::span<const double> u,
                                                   std::size_t count,
                                                   std::uint64_t seed,
                                                   std::uint64_t point_index) {
  const SuccessorBox box = plant.successor_box(x, u);
  std::vector<std::vector<double>> out(count);
  for (std::size_t h = 0; h < count; ++h) {
    out[h].resize(box.lower.size());
    successor_point(box.lower, box.upper, seed, point_index, h, out[h]);
  }
  return out;
}

}  // namespace robdoa
