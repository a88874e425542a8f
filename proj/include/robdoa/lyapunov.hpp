#pragma once

#include <Eigen/Dense>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "robdoa/expr.hpp"

namespace robdoa {

/// Monomials x^e with 1 <= |e| <= d over n variables in graded
/// lexicographic order (grade first, then lex on exponents). No constant
/// term, so every spanned polynomial vanishes at the origin.
/// Size r = C(n+d, d) - 1.
struct MonomialBasis {
  int n = 0;
  int d = 0;
  std::vector<std::vector<int>> exponents;  // r rows of n entries

  static MonomialBasis make(int n, int d, std::size_t max_terms = 4096);

  std::size_t size() const { return exponents.size(); }

  /// Fills s[k] = prod_j x[j]^e_kj.
  void eval_into(std::span<const double> x, std::span<double> s) const;
};

/// A candidate function for the decrease condition: positive away from the
/// origin and zero at it.
class Lyapunov {
 public:
  virtual ~Lyapunov() = default;
  virtual double operator()(std::span<const double> x) const = 0;
  virtual int dim() const = 0;
  virtual std::string describe() const = 0;
};

/// L(x) = || Q * S_d(x) ||^2 with square full-rank Q; positive definite by
/// construction when the rank check passes.
class SosLyapunov : public Lyapunov {
 public:
  SosLyapunov(MonomialBasis basis, Eigen::MatrixXd q);

  double operator()(std::span<const double> x) const override;
  int dim() const override { return basis_.n; }
  std::string describe() const override;

  const MonomialBasis& basis() const { return basis_; }
  const Eigen::MatrixXd& q() const { return q_; }

  /// Smallest singular value above tol_rel * largest.
  static bool check_full_rank(const Eigen::MatrixXd& q, double tol_rel = 1e-6);

  /// Coefficients of the expanded polynomial, keyed by exponent vector.
  std::map<std::vector<int>, double> expand_coefficients() const;

 private:
  MonomialBasis basis_;
  Eigen::MatrixXd q_;
  std::vector<double> q_flat_;  // row-major copy for the evaluation loop
};

/// User-supplied positive-definite expression in x1..xn (e.g. "x1^2").
/// L(0)=0 is checked at construction; positivity only where evaluated.
class FixedLyapunov : public Lyapunov {
 public:
  FixedLyapunov(const std::string& source, int state_dim);

  double operator()(std::span<const double> x) const override;
  int dim() const override { return expr_.state_dim(); }
  std::string describe() const override { return "expr:" + expr_.source(); }

 private:
  Expression expr_;
};

}  // namespace robdoa
