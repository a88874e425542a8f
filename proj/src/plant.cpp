#include "robdoa/plant.hpp"

#include <cmath>
#include <cstdio>

namespace robdoa {

std::vector<double> SuccessorBox::center() const {
  std::vector<double> c(lower.size());
  for (std::size_t i = 0; i < lower.size(); ++i) c[i] = 0.5 * (lower[i] + upper[i]);
  return c;
}

PlantSet PlantSet::from_expressions(int state_dim, int input_dim,
                                    std::vector<std::string> nominal,
                                    std::vector<std::string> error_bound) {
  if (state_dim < 1 || input_dim < 1)
    throw ValidationError("plant: dimensions must be at least 1");
  if (nominal.size() != static_cast<std::size_t>(state_dim))
    throw ValidationError("plant: expected " + std::to_string(state_dim) +
                          " nominal expressions, got " +
                          std::to_string(nominal.size()));
  if (error_bound.size() != static_cast<std::size_t>(state_dim))
    throw ValidationError("plant: expected " + std::to_string(state_dim) +
                          " error-bound expressions, got " +
                          std::to_string(error_bound.size()));
  PlantSet p;
  p.state_dim_ = state_dim;
  p.input_dim_ = input_dim;
  for (const auto& s : nominal) p.nominal_.push_back(Expression::parse(s, state_dim, input_dim));
  for (const auto& s : error_bound) p.bound_.push_back(Expression::parse(s, state_dim, input_dim));
  p.nominal_src_ = std::move(nominal);
  p.bound_src_ = std::move(error_bound);
  p.check_origin();
  return p;
}

void PlantSet::check_origin() const {
  const std::vector<double> x0(static_cast<std::size_t>(state_dim_), 0.0);
  const std::vector<double> u0(static_cast<std::size_t>(input_dim_), 0.0);
  constexpr double kTol = 1e-12;
  for (int i = 0; i < state_dim_; ++i) {
    const double f0 = nominal_[static_cast<std::size_t>(i)].evaluate(x0, u0);
    if (std::fabs(f0) > kTol)
      throw ValidationError("plant: nominal map must vanish at the origin; component " +
                            std::to_string(i + 1) + " gives " + std::to_string(f0));
    const double d0 = bound_[static_cast<std::size_t>(i)].evaluate(x0, u0);
    if (std::fabs(d0) > kTol)
      throw ValidationError("plant: error bound must vanish at the origin; component " +
                            std::to_string(i + 1) + " gives " + std::to_string(d0));
  }
}

PlantSet PlantSet::builtin(const std::string& name) {
  if (name == "paper-sec5") {
    PlantSet p = from_expressions(
        1, 1, {"-sin(2*x1) - x1*u1 - 0.2*x1 - u1^2 + u1"},
        {"1 - exp(-0.5*(x1^2 + u1^2))"});
    p.name_ = name;
    return p;
  }
  std::string msg = "unknown builtin plant '" + name + "'; available:";
  for (const auto& n : builtin_names()) msg += " " + n;
  throw ValidationError(msg);
}

std::vector<std::string> PlantSet::builtin_names() { return {"paper-sec5"}; }

void PlantSet::nominal_into(std::span<const double> x, std::span<const double> u,
                            std::span<double> out) const {
  for (int i = 0; i < state_dim_; ++i)
    out[static_cast<std::size_t>(i)] = nominal_[static_cast<std::size_t>(i)].evaluate(x, u);
}

void PlantSet::error_bound_into(std::span<const double> x,
                                std::span<const double> u,
                                std::span<double> out) const {
  for (int i = 0; i < state_dim_; ++i) {
    const double d = bound_[static_cast<std::size_t>(i)].evaluate(x, u);
    if (d < 0.0) {
      char buf[160];
      std::snprintf(buf, sizeof buf,
                    "error bound component %d negative (%.17g) at sampled point",
                    i + 1, d);
      throw EvalError(buf);
    }
    out[static_cast<std::size_t>(i)] = d;
  }
}

void PlantSet::successor_box_into(std::span<const double> x,
                                  std::span<const double> u,
                                  std::span<double> lo,
                                  std::span<double> hi) const {
  for (int i = 0; i < state_dim_; ++i) {
    const auto k = static_cast<std::size_t>(i);
    const double c = nominal_[k].evaluate(x, u);
    const double d = bound_[k].evaluate(x, u);
    if (d < 0.0) {
      char buf[160];
      std::snprintf(buf, sizeof buf,
                    "error bound component %d negative (%.17g) at sampled point",
                    i + 1, d);
      throw EvalError(buf);
    }
    lo[k] = c - d;
    hi[k] = c + d;
  }
}

SuccessorBox PlantSet::successor_box(std::span<const double> x,
                                     std::span<const double> u) const {
  SuccessorBox b;
  b.lower.resize(static_cast<std::size_t>(state_dim_));
  b.upper.resize(static_cast<std::size_t>(state_dim_));
  try {
    successor_box_into(x, u, b.lower, b.upper);
  } catch (const EvalError& e) {
    std::string at = " at x=(";
    for (std::size_t i = 0; i < x.size(); ++i)
      at += (i ? "," : "") + std::to_string(x[i]);
    at += "), u=(";
    for (std::size_t i = 0; i < u.size(); ++i)
      at += (i ? "," : "") + std::to_string(u[i]);
    at += ")";
    throw EvalError(e.what() + at);
  }
  return b;
}

std::uint64_t PlantSet::definition_hash() const {
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto mix = [&h](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ull;
    }
    h ^= 0xff;
    h *= 0x100000001b3ull;
  };
  mix(std::to_string(state_dim_));
  mix(std::to_string(input_dim_));
  for (const auto& s : nominal_src_) mix(s);
  for (const auto& s : bound_src_) mix(s);
  return h;
}

std::string PlantSet::describe() const {
  if (!name_.empty()) return "builtin:" + name_;
  std::string out = "custom(n=" + std::to_string(state_dim_) +
                    ",m=" + std::to_string(input_dim_) + ")";
  return out;
}

}  // namespace robdoa
