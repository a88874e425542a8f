#include "robdoa/lyapunov.hpp"

#include <algorithm>
#include <cmath>

namespace robdoa {

namespace {

// Exponent vectors of total degree `grade` in lex order (first variable
// outranks the rest).
void emit_grade(int n, int grade, std::vector<int>& cur, int pos,
                std::vector<std::vector<int>>& out) {
  if (pos == n - 1) {
    cur[static_cast<std::size_t>(pos)] = grade;
    out.push_back(cur);
    return;
  }
  for (int e = grade; e >= 0; --e) {
    cur[static_cast<std::size_t>(pos)] = e;
    emit_grade(n, grade - e, cur, pos + 1, out);
  }
}

}  // namespace

MonomialBasis MonomialBasis::make(int n, int d, std::size_t max_terms) {
  if (n < 1 || d < 1)
    throw ValidationError("monomial basis requires n >= 1 and d >= 1");
  MonomialBasis b;
  b.n = n;
  b.d = d;
  std::vector<int> cur(static_cast<std::size_t>(n), 0);
  for (int grade = 1; grade <= d; ++grade) {
    emit_grade(n, grade, cur, 0, b.exponents);
    if (b.exponents.size() > max_terms)
      throw ValidationError("monomial basis exceeds configured maximum of " +
                            std::to_string(max_terms) + " terms");
  }
  return b;
}

void MonomialBasis::eval_into(std::span<const double> x,
                              std::span<double> s) const {
  for (std::size_t k = 0; k < exponents.size(); ++k) {
    double v = 1.0;
    const auto& e = exponents[k];
    for (int j = 0; j < n; ++j) {
      const int p = e[static_cast<std::size_t>(j)];
      const double xj = x[static_cast<std::size_t>(j)];
      for (int t = 0; t < p; ++t) v *= xj;
    }
    s[k] = v;
  }
}

SosLyapunov::SosLyapunov(MonomialBasis basis, Eigen::MatrixXd q)
    : basis_(std::move(basis)), q_(std::move(q)) {
  const auto r = static_cast<Eigen::Index>(basis_.size());
  if (q_.rows() != r || q_.cols() != r)
    throw ValidationError("parameter matrix must be " + std::to_string(r) +
                          "x" + std::to_string(r) + " for this basis");
  q_flat_.resize(static_cast<std::size_t>(r * r));
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < r; ++j)
      q_flat_[static_cast<std::size_t>(i * r + j)] = q_(i, j);
}

double SosLyapunov::operator()(std::span<const double> x) const {
  constexpr std::size_t kStack = 16;
  const std::size_t r = basis_.size();
  double sbuf[kStack];
  std::vector<double> sheap;
  std::span<double> s;
  if (r <= kStack) {
    s = std::span<double>(sbuf, r);
  } else {
    sheap.resize(r);
    s = sheap;
  }
  basis_.eval_into(x, s);
  double total = 0.0;
  for (std::size_t i = 0; i < r; ++i) {
    double row = 0.0;
    const double* qi = q_flat_.data() + i * r;
    for (std::size_t j = 0; j < r; ++j) row += qi[j] * s[j];
    total += row * row;
  }
  return total;
}

std::string SosLyapunov::describe() const {
  return "sos(n=" + std::to_string(basis_.n) + ",d=" + std::to_string(basis_.d) + ")";
}

bool SosLyapunov::check_full_rank(const Eigen::MatrixXd& q, double tol_rel) {
  if (q.rows() != q.cols() || q.rows() == 0) return false;
  if (!q.allFinite()) return false;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(q);
  const auto& sv = svd.singularValues();
  const double largest = sv(0);
  if (!(largest > 0.0)) return false;
  return sv(sv.size() - 1) > tol_rel * largest;
}

std::map<std::vector<int>, double> SosLyapunov::expand_coefficients() const {
  const std::size_t r = basis_.size();
  const Eigen::MatrixXd m = q_.transpose() * q_;
  std::map<std::vector<int>, double> coeffs;
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < r; ++j) {
      std::vector<int> e(static_cast<std::size_t>(basis_.n));
      for (int k = 0; k < basis_.n; ++k)
        e[static_cast<std::size_t>(k)] =
            basis_.exponents[i][static_cast<std::size_t>(k)] +
            basis_.exponents[j][static_cast<std::size_t>(k)];
      coeffs[e] += m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
  }
  return coeffs;
}

FixedLyapunov::FixedLyapunov(const std::string& source, int state_dim)
    : expr_(Expression::parse(source, state_dim, 0)) {
  const std::vector<double> zero(static_cast<std::size_t>(state_dim), 0.0);
  const double v0 = expr_.evaluate(zero, {});
  if (std::fabs(v0) > 1e-12)
    throw ValidationError("fixed Lyapunov candidate must vanish at the origin; got " +
                          std::to_string(v0));
}

double FixedLyapunov::operator()(std::span<const double> x) const {
  return expr_.evaluate(x, {});
}

}  // namespace robdoa
