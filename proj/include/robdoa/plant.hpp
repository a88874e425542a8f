#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "robdoa/expr.hpp"

namespace robdoa {

/// Componentwise interval of successor states [f(x,u)-d(x,u), f(x,u)+d(x,u)].
struct SuccessorBox {
  std::vector<double> lower;
  std::vector<double> upper;

  std::vector<double> center() const;
  int dim() const { return static_cast<int>(lower.size()); }
};

// A family of discrete-time maps pinned between nominal - bound and
// nominal + bound, both vanishing at the origin. Each output dimension of the
// nominal map and of the error bound is one scalar expression. Immutable
// after construction; evaluation is thread-safe.
class PlantSet {
 public:
  static PlantSet from_expressions(int state_dim, int input_dim,
                                   std::vector<std::string> nominal,
                                   std::vector<std::string> error_bound);

  /// Registered plant by name ("paper-sec5"); unknown names raise an error
  /// listing the available ones.
  static PlantSet builtin(const std::string& name);
  static std::vector<std::string> builtin_names();

  int state_dim() const { return state_dim_; }
  int input_dim() const { return input_dim_; }

  void nominal_into(std::span<const double> x, std::span<const double> u,
                    std::span<double> out) const;
  /// Error bound; a negative component is a hard error (the bound must be a
  /// nonnegative function, which is only checkable pointwise).
  void error_bound_into(std::span<const double> x, std::span<const double> u,
                        std::span<double> out) const;

  /// Allocation-free variant for hot loops.
  void successor_box_into(std::span<const double> x, std::span<const double> u,
                          std::span<double> lo, std::span<double> hi) const;
  SuccessorBox successor_box(std::span<const double> x,
                             std::span<const double> u) const;

  /// FNV-1a hash of the defining expressions, for artifact metadata.
  std::uint64_t definition_hash() const;
  std::string describe() const;
  const std::vector<std::string>& nominal_sources() const { return nominal_src_; }
  const std::vector<std::string>& error_bound_sources() const { return bound_src_; }

 private:
  PlantSet() = default;
  void check_origin() const;

  int state_dim_ = 0;
  int input_dim_ = 0;
  std::vector<Expression> nominal_;
  std::vector<Expression> bound_;
  std::vector<std::string> nominal_src_;
  std::vector<std::string> bound_src_;
  std::string name_;
};

}  // namespace robdoa
