#include <doctest.h>

#include <cmath>
#include <set>

#include "robdoa/grid.hpp"
#include "robdoa/rng.hpp"

using namespace robdoa;

namespace {

UniformGrid line_grid(double lo, double hi, std::size_t cells) {
  return UniformGrid(Box::make({lo}, {hi}), {cells});
}

std::optional<std::size_t> locate1(const UniformGrid& g, double x) {
  return g.locate(std::span<const double>(&x, 1));
}

}  // namespace

TEST_SUITE("grid") {

TEST_CASE("locate on the benchmark state axis") {
  const UniformGrid g = line_grid(-2.0, 2.0, 400);
  CHECK(locate1(g, -2.0) == 0);                  // lower boundary
  CHECK(locate1(g, 0.005) == 200);               // floor((0.005+2)/0.01)
  CHECK(!locate1(g, 3.0).has_value());           // outside
  CHECK(locate1(g, 2.0) == 399);                 // upper face -> last cell
  CHECK(!locate1(g, -2.0000001).has_value());
}

TEST_CASE("locate partitions the box") {
  const UniformGrid g(Box::make({-1.0, 0.5}, {1.0, 2.5}), {7, 9});
  // cell volumes sum to the box volume
  CHECK(std::fabs(g.cell_volume() * static_cast<double>(g.cell_count()) -
                  g.box().volume()) < 1e-9 * g.box().volume());
  // every sampled point lands in exactly one cell, consistent with bounds
  std::vector<double> lo(2), hi(2), p(2);
  for (std::size_t i = 0; i < 2000; ++i) {
    const rng::Stream s{rng::Domain::probes, 1};
    p[0] = rng::uniform(3, s, 2 * i, -1.0, 1.0);
    p[1] = rng::uniform(3, s, 2 * i + 1, 0.5, 2.5);
    const auto cell = g.locate(p);
    REQUIRE(cell.has_value());
    g.cell_bounds(*cell, lo, hi);
    REQUIRE(p[0] >= lo[0] - 1e-12);
    REQUIRE(p[1] >= lo[1] - 1e-12);
    REQUIRE(p[0] <= hi[0] + 1e-12);
    REQUIRE(p[1] <= hi[1] + 1e-12);
  }
}

TEST_CASE("product grid matches the benchmark cell count") {
  const UniformGrid gx = line_grid(-2.0, 2.0, 400);
  const UniformGrid gu = line_grid(-2.0, 2.0, 400);
  const UniformGrid gw = product_grid(gx, gu);
  CHECK(gw.cell_count() == 160000);  // 1.6e5 cells of size 0.01 x 0.01
  CHECK(gw.dim() == 2);
  CHECK(gw.widths()[0] == doctest::Approx(0.01));
}

TEST_CASE("product flat index is state-major") {
  const UniformGrid gx = line_grid(0.0, 2.0, 2);
  const UniformGrid gu = line_grid(0.0, 3.0, 3);
  const UniformGrid gw = product_grid(gx, gu);
  CHECK(gw.cell_count() == 6);
  const std::size_t multi[2] = {1, 2};
  CHECK(gw.flatten(multi) == 5);  // i * N_u + j
  const auto back = gw.unflatten(5);
  CHECK(back[0] == 1);
  CHECK(back[1] == 2);
}

TEST_CASE("projection collapses the control axis") {
  const UniformGrid gx = line_grid(-1.0, 1.0, 5);
  const UniformGrid gu = line_grid(-1.0, 1.0, 8);
  const UniformGrid gw = product_grid(gx, gu);

  CellMask w(gw);
  SUBCASE("all false stays all false") {
    CHECK(project_mask(w, gx, gu).none());
  }
  SUBCASE("single product cell sets only its state cell") {
    w.set(3 * 8 + 7);
    const CellMask x = project_mask(w, gx, gu);
    CHECK(x.count() == 1);
    CHECK(x.test(3));
  }
  SUBCASE("multiple cells, brute-force reference") {
    const std::size_t set_cells[][2] = {{1, 0}, {1, 5}, {2, 2}};
    std::set<std::size_t> expect;
    for (const auto& c : set_cells) {
      w.set(c[0] * 8 + c[1]);
      expect.insert(c[0]);
    }
    const CellMask x = project_mask(w, gx, gu);
    const auto indices = x.set_indices();
    const std::set<std::size_t> got(indices.begin(), indices.end());
    CHECK(got == expect);
  }
}

TEST_CASE("projection distributes over union") {
  const UniformGrid gx = line_grid(-1.0, 1.0, 6);
  const UniformGrid gu = line_grid(-1.0, 1.0, 6);
  const UniformGrid gw = product_grid(gx, gu);
  CellMask a(gw), b(gw);
  for (std::size_t i = 0; i < gw.cell_count(); ++i) {
    const rng::Stream s{rng::Domain::probes, 2};
    if (rng::uniform01(5, s, 2 * i) < 0.3) a.set(i);
    if (rng::uniform01(5, s, 2 * i + 1) < 0.3) b.set(i);
  }
  CHECK(mask_eq(project_mask(mask_or(a, b), gx, gu),
                mask_or(project_mask(a, gx, gu), project_mask(b, gx, gu))));
}

TEST_CASE("mask logic and containment") {
  const UniformGrid g = line_grid(0.0, 4.0, 4);
  CellMask a(g), b(g);
  a.set(0); a.set(1);
  b.set(0); b.set(1); b.set(2);
  CHECK(mask_eq(mask_and(a, b), a));  // containment holds
  CHECK(mask_subset(a, b));

  CellMask c(g), d(g);
  c.set(0);
  d.set(1);
  CHECK(mask_and(c, d).none());
  CHECK(!mask_subset(c, d));
}

TEST_CASE("random containment agrees with index-set inclusion") {
  const UniformGrid g = line_grid(0.0, 1.0, 64);
  for (int trial = 0; trial < 50; ++trial) {
    CellMask a(g), b(g);
    const rng::Stream s{rng::Domain::probes, static_cast<std::uint64_t>(trial)};
    for (std::size_t i = 0; i < 64; ++i) {
      if (rng::uniform01(11, s, 2 * i) < 0.4) a.set(i);
      if (rng::uniform01(11, s, 2 * i + 1) < 0.6) b.set(i);
    }
    const auto ai = a.set_indices();
    const auto bi = b.set_indices();
    const std::set<std::size_t> bset(bi.begin(), bi.end());
    bool inc = true;
    for (std::size_t i : ai)
      if (!bset.count(i)) inc = false;
    CHECK(mask_subset(a, b) == inc);
  }
}

TEST_CASE("volume counts set cells") {
  const UniformGrid g = line_grid(0.0, 4.0, 400);  // width 0.01
  CellMask m(g);
  CHECK(m.volume() == 0.0);
  for (std::size_t i = 100; i < 120; ++i) m.set(i);
  CHECK(m.volume() == doctest::Approx(0.20));
  // monotone under inclusion
  CellMask bigger = m;
  bigger.set(200);
  CHECK(m.volume() <= bigger.volume());
}

TEST_CASE("origin cells on a face-aligned axis") {
  const UniformGrid g = line_grid(-2.0, 2.0, 400);
  const auto cells = g.origin_cells();
  REQUIRE(cells.size() == 2);
  CHECK(cells[0] == 199);
  CHECK(cells[1] == 200);
}

TEST_CASE("origin cells in 2-D share the corner") {
  const UniformGrid g(Box::make({-1.0, -1.0}, {1.0, 1.0}), {10, 10});
  CHECK(g.origin_cells().size() == 4);
  const UniformGrid off(Box::make({-0.3, -0.3}, {1.0, 1.0}), {7, 7});
  CHECK(off.origin_cells().size() == 1);  // interior of a single cell
}

TEST_CASE("boundary cell detection") {
  const UniformGrid g(Box::make({0.0, 0.0}, {1.0, 1.0}), {4, 4});
  CellMask m(g);
  CHECK(!mask_touches_boundary(m));
  const std::size_t interior[2] = {1, 2};
  m.set(g.flatten(interior));
  CHECK(!mask_touches_boundary(m));
  const std::size_t edge[2] = {0, 2};
  m.set(g.flatten(edge));
  CHECK(mask_touches_boundary(m));
}

TEST_CASE("grid mismatch is an error") {
  const UniformGrid a = line_grid(0.0, 1.0, 4);
  const UniformGrid b = line_grid(0.0, 1.0, 5);
  CHECK_THROWS_AS(mask_and(CellMask(a), CellMask(b)), Error);
}

TEST_CASE("degenerate boxes are rejected") {
  CHECK_THROWS_AS(Box::make({1.0}, {1.0}), ValidationError);
  CHECK_THROWS_AS(Box::make({0.0, 0.0}, {1.0}), ValidationError);
  CHECK_THROWS_AS(UniformGrid(Box::make({0.0}, {1.0}), {0}), ValidationError);
}

}  // TEST_SUITE
