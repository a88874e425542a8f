#include "robdoa/grid.hpp"

#include <bit>
#include <cmath>

namespace robdoa {

Box Box::make(std::vector<double> lo, std::vector<double> hi) {
  if (lo.size() != hi.size() || lo.empty())
    throw ValidationError("box: bound vectors empty or of unequal length");
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (!(lo[i] < hi[i]))
      throw ValidationError("box: lower[" + std::to_string(i) +
                            "] must be strictly below upper");
    if (!std::isfinite(lo[i]) || !std::isfinite(hi[i]))
      throw ValidationError("box: non-finite bound");
  }
  return Box{std::move(lo), std::move(hi)};
}

double Box::volume() const {
  double v = 1.0;
  for (std::size_t i = 0; i < lower.size(); ++i) v *= upper[i] - lower[i];
  return v;
}

bool Box::contains(std::span<const double> p) const {
  if (p.size() != lower.size()) return false;
  for (std::size_t i = 0; i < lower.size(); ++i)
    if (p[i] < lower[i] || p[i] > upper[i]) return false;
  return true;
}

bool Box::contains_origin_interior() const {
  for (std::size_t i = 0; i < lower.size(); ++i)
    if (!(lower[i] < 0.0 && 0.0 < upper[i])) return false;
  return true;
}

std::vector<std::vector<double>> Box::corners() const {
  const int d = dim();
  std::vector<std::vector<double>> out;
  out.reserve(std::size_t{1} << d);
  for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
    std::vector<double> c(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j)
      c[static_cast<std::size_t>(j)] =
          (mask >> j) & 1 ? upper[static_cast<std::size_t>(j)]
                          : lower[static_cast<std::size_t>(j)];
    out.push_back(std::move(c));
  }
  return out;
}

UniformGrid::UniformGrid(Box box, std::vector<std::size_t> counts)
    : box_(std::move(box)), counts_(std::move(counts)) {
  if (counts_.size() != box_.lower.size())
    throw ValidationError("grid: counts dimension mismatch");
  cell_count_ = 1;
  widths_.resize(counts_.size());
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    if (counts_[i] == 0) throw ValidationError("grid: zero cell count");
    widths_[i] = (box_.upper[i] - box_.lower[i]) / static_cast<double>(counts_[i]);
    if (!(widths_[i] > 0.0)) throw ValidationError("grid: non-positive cell width");
    cell_count_ *= counts_[i];
  }
  cell_volume_ = 1.0;
  for (double w : widths_) cell_volume_ *= w;
}

std::optional<std::size_t> UniformGrid::locate(std::span<const double> p) const {
  if (static_cast<int>(p.size()) != dim()) return std::nullopt;
  std::size_t flat = 0;
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    if (p[i] < box_.lower[i] || p[i] > box_.upper[i]) return std::nullopt;
    auto idx = static_cast<std::int64_t>(
        std::floor((p[i] - box_.lower[i]) / widths_[i]));
    if (idx < 0) idx = 0;
    // points on the global upper face belong to the last cell
    if (idx >= static_cast<std::int64_t>(counts_[i]))
      idx = static_cast<std::int64_t>(counts_[i]) - 1;
    flat = flat * counts_[i] + static_cast<std::size_t>(idx);
  }
  return flat;
}

std::size_t UniformGrid::flatten(std::span<const std::size_t> multi) const {
  std::size_t flat = 0;
  for (std::size_t i = 0; i < counts_.size(); ++i)
    flat = flat * counts_[i] + multi[i];
  return flat;
}

std::vector<std::size_t> UniformGrid::unflatten(std::size_t flat) const {
  std::vector<std::size_t> multi(counts_.size());
  for (std::size_t i = counts_.size(); i-- > 0;) {
    multi[i] = flat % counts_[i];
    flat /= counts_[i];
  }
  return multi;
}

void UniformGrid::cell_bounds(std::size_t flat, std::span<double> lo,
                              std::span<double> hi) const {
  const auto multi = unflatten(flat);
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    lo[i] = box_.lower[i] + static_cast<double>(multi[i]) * widths_[i];
    hi[i] = box_.lower[i] + static_cast<double>(multi[i] + 1) * widths_[i];
  }
}

std::vector<double> UniformGrid::cell_center(std::size_t flat) const {
  const auto multi = unflatten(flat);
  std::vector<double> c(counts_.size());
  for (std::size_t i = 0; i < counts_.size(); ++i)
    c[i] = box_.lower[i] + (static_cast<double>(multi[i]) + 0.5) * widths_[i];
  return c;
}

bool UniformGrid::is_boundary_cell(std::size_t flat) const {
  const auto multi = unflatten(flat);
  for (std::size_t i = 0; i < counts_.size(); ++i)
    if (multi[i] == 0 || multi[i] + 1 == counts_[i]) return true;
  return false;
}

std::vector<std::size_t> UniformGrid::origin_cells() const {
  std::vector<double> zero(static_cast<std::size_t>(dim()), 0.0);
  if (!box_.contains(zero)) throw Error("origin outside grid");
  // Per-dimension candidate indices; two when 0 falls on an interior face.
  std::vector<std::vector<std::size_t>> cand(counts_.size());
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    const double t = (0.0 - box_.lower[i]) / widths_[i];
    const double nearest = std::nearbyint(t);
    constexpr double kFaceTol = 1e-9;
    if (std::fabs(t - nearest) <= kFaceTol) {
      const auto b = static_cast<std::int64_t>(nearest);
      if (b - 1 >= 0) cand[i].push_back(static_cast<std::size_t>(b - 1));
      if (b < static_cast<std::int64_t>(counts_[i]))
        cand[i].push_back(static_cast<std::size_t>(b));
    } else {
      auto idx = static_cast<std::int64_t>(std::floor(t));
      if (idx < 0) idx = 0;
      if (idx >= static_cast<std::int64_t>(counts_[i]))
        idx = static_cast<std::int64_t>(counts_[i]) - 1;
      cand[i].push_back(static_cast<std::size_t>(idx));
    }
  }
  std::vector<std::size_t> out;
  std::vector<std::size_t> multi(counts_.size());
  std::vector<std::size_t> pick(counts_.size(), 0);
  while (true) {
    for (std::size_t i = 0; i < counts_.size(); ++i) multi[i] = cand[i][pick[i]];
    out.push_back(flatten(multi));
    std::size_t i = counts_.size();
    while (i-- > 0) {
      if (++pick[i] < cand[i].size()) break;
      pick[i] = 0;
      if (i == 0) return out;
    }
    if (i == static_cast<std::size_t>(-1)) break;
  }
  return out;
}

bool UniformGrid::operator==(const UniformGrid& other) const {
  return counts_ == other.counts_ && box_.lower == other.box_.lower &&
         box_.upper == other.box_.upper;
}

UniformGrid product_grid(const UniformGrid& gx, const UniformGrid& gu) {
  std::vector<double> lo = gx.box().lower;
  std::vector<double> hi = gx.box().upper;
  lo.insert(lo.end(), gu.box().lower.begin(), gu.box().lower.end());
  hi.insert(hi.end(), gu.box().upper.begin(), gu.box().upper.end());
  std::vector<std::size_t> counts = gx.counts();
  counts.insert(counts.end(), gu.counts().begin(), gu.counts().end());
  return UniformGrid(Box::make(std::move(lo), std::move(hi)), std::move(counts));
}

CellMask::CellMask(UniformGrid grid) : grid_(std::move(grid)) {
  words_.assign((grid_.cell_count() + 63) / 64, 0);
}

std::size_t CellMask::count() const {
  std::size_t c = 0;
  for (std::uint64_t w : words_) c += static_cast<std::size_t>(std::popcount(w));
  return c;
}

std::vector<std::size_t> CellMask::set_indices() const {
  std::vector<std::size_t> out;
  out.reserve(count());
  for (std::size_t i = 0; i < size(); ++i)
    if (test(i)) out.push_back(i);
  return out;
}

namespace {
void require_same_grid(const CellMask& a, const CellMask& b) {
  if (a.grid() != b.grid()) throw Error("cell mask grid mismatch");
}
}  // namespace

CellMask mask_and(const CellMask& a, const CellMask& b) {
  require_same_grid(a, b);
  CellMask out = a;
  for (std::size_t i = 0; i < out.words().size(); ++i)
    out.words()[i] &= b.words()[i];
  return out;
}

CellMask mask_or(const CellMask& a, const CellMask& b) {
  require_same_grid(a, b);
  CellMask out = a;
  for (std::size_t i = 0; i < out.words().size(); ++i)
    out.words()[i] |= b.words()[i];
  return out;
}

bool mask_eq(const CellMask& a, const CellMask& b) {
  require_same_grid(a, b);
  return a.words() == b.words();
}

bool mask_subset(const CellMask& a, const CellMask& b) {
  require_same_grid(a, b);
  for (std::size_t i = 0; i < a.words().size(); ++i)
    if (a.words()[i] & ~b.words()[i]) return false;
  return true;
}

bool mask_touches_boundary(const CellMask& m) {
  for (std::size_t i = 0; i < m.size(); ++i)
    if (m.test(i) && m.grid().is_boundary_cell(i)) return true;
  return false;
}

CellMask project_mask(const CellMask& w_mask, const UniformGrid& gx,
                      const UniformGrid& gu) {
  if (w_mask.grid() != product_grid(gx, gu))
    throw Error("project_mask: mask does not belong to the product grid");
  CellMask out(gx);
  const std::size_t nu = gu.cell_count();
  for (std::size_t i = 0; i < gx.cell_count(); ++i) {
    const std::size_t base = i * nu;
    for (std::size_t j = 0; j < nu; ++j) {
      if (w_mask.test(base + j)) {
        out.set(i);
        break;
      }
    }
  }
  return out;
}

}  // namespace robdoa
