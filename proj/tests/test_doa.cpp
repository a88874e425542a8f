#include <doctest.h>

#include <cmath>

#include "robdoa/doa.hpp"

using namespace robdoa;

namespace {

UniformGrid line_grid(double lo, double hi, std::size_t cells) {
  return UniformGrid(Box::make({lo}, {hi}), {cells});
}

// Independent replay of the refinement recurrence on a single integer scale:
// every lattice value is an integer multiple of the final accuracy.
std::size_t recount_checks(const std::function<bool(double)>& accept,
                           double eps_init, int passes) {
  const double denom = [&] {
    double v = 1.0;
    for (int i = 0; i < passes; ++i) v *= 10.0;
    return v;
  }();
  std::uint64_t step = 1;
  for (int i = 0; i < passes; ++i) step *= 10;  // units of accuracy per eps_init
  std::uint64_t alpha = step;
  std::size_t checks = 0;
  while (true) {
    ++checks;
    if (accept(static_cast<double>(alpha) * eps_init / denom)) {
      alpha += step;
      continue;
    }
    alpha -= step;
    if (step == 1) return checks;
    step /= 10;
    alpha += step;
  }
}

}  // namespace

TEST_SUITE("doa") {

TEST_CASE("level sets from per-cell maxima") {
  const FixedLyapunov L("x1^2", 1);
  const UniformGrid gx = line_grid(-2.0, 2.0, 400);
  const StateSampleTable table = StateSampleTable::build(L, gx, 200000, 31, 2);

  SUBCASE("alpha zero is generically empty") {
    CHECK(estimate_level_set(table, 0.0).mask.none());
  }
  SUBCASE("the reported level-set window") {
    // cells wholly inside +-sqrt(0.0117) = +-0.10817: indices 190..209
    const LevelSetEstimate ls = estimate_level_set(table, 0.0117);
    REQUIRE(ls.mask.count() == 20);
    for (std::size_t i = 190; i <= 209; ++i) REQUIRE(ls.mask.test(i));
    CHECK(ls.mask.volume() == doctest::Approx(0.20));
  }
  SUBCASE("saturation at the sample maximum") {
    const LevelSetEstimate ls = estimate_level_set(table, table.sample_max());
    CHECK(ls.mask.count() == 400);  // dense sampling fills every cell
  }
  SUBCASE("monotone in alpha") {
    const auto a = estimate_level_set(table, 0.01);
    const auto b = estimate_level_set(table, 0.02);
    CHECK(mask_subset(a.mask, b.mask));
    CHECK(a.mask.volume() <= b.mask.volume());
  }
  SUBCASE("negative alpha rejected") {
    CHECK_THROWS_AS(estimate_level_set(table, -1.0), ValidationError);
  }
}

TEST_CASE("containment is the masked equality") {
  const UniformGrid g = line_grid(-1.0, 1.0, 8);
  CellMask ndd(g);
  for (std::size_t i = 2; i <= 5; ++i) ndd.set(i);
  LevelSetEstimate empty{CellMask(g), 0.1};
  CHECK(contained(empty, ndd));  // empty set inside anything
  LevelSetEstimate same{ndd, 0.1};
  CHECK(contained(same, ndd));
  LevelSetEstimate wider{ndd, 0.1};
  wider.mask.set(6);
  CHECK(!contained(wider, ndd));
}

TEST_CASE("variable-step search reproduces the documented check counts") {
  const auto threshold = [](double alpha) { return alpha <= 97.678; };
  AlphaSearchParams params;
  params.eps_init = 10.0;
  params.accuracy = 0.001;
  params.alpha_max = 1e9;
  const AlphaSearchTrace trace = search_alpha_lattice(threshold, params);
  CHECK(trace.check_count() == 42);
  CHECK(trace.alpha_star == doctest::Approx(97.678).epsilon(1e-12));
  CHECK(!trace.never_contained);
  CHECK(!trace.cap_hit);
  // pass structure: 10 + 8 + 7 + 8 + 9
  CHECK(trace.epsilon_schedule.size() == 5);

  const AlphaSearchTrace constant = search_alpha_constant(threshold, 0.001, 1e9);
  CHECK(constant.check_count() == 97679);
  CHECK(constant.alpha_star == doctest::Approx(97.678).epsilon(1e-12));
}

TEST_CASE("trace counts match an independent replay for assorted thresholds") {
  for (double threshold : {0.004, 0.5, 3.14159, 42.0, 99.9999, 7.0, 10.0}) {
    CAPTURE(threshold);
    const auto accept = [threshold](double alpha) { return alpha <= threshold; };
    AlphaSearchParams params;
    params.eps_init = 10.0;
    params.accuracy = 0.001;
    params.alpha_max = 1e9;
    const AlphaSearchTrace trace = search_alpha_lattice(accept, params);
    CHECK(trace.check_count() == recount_checks(accept, 10.0, 4));
    // accepted at the result, rejected one accuracy step later
    if (trace.alpha_star > 0.0) CHECK(accept(trace.alpha_star));
    CHECK(!accept(trace.alpha_star + params.accuracy * 1.0000001));
  }
}

TEST_CASE("thresholds below the resolution give zero") {
  const auto accept = [](double alpha) { return alpha <= 0.0005; };
  AlphaSearchParams params;
  params.eps_init = 10.0;
  params.accuracy = 0.001;
  const AlphaSearchTrace trace = search_alpha_lattice(accept, params);
  CHECK(trace.alpha_star == 0.0);
  CHECK(trace.never_contained);
  CHECK(trace.check_count() == 5);  // one rejection per decade
}

TEST_CASE("the cap stops never-failing predicates") {
  const auto accept = [](double) { return true; };
  AlphaSearchParams params;
  params.eps_init = 10.0;
  params.accuracy = 0.001;
  params.alpha_max = 55.0;
  const AlphaSearchTrace trace = search_alpha_lattice(accept, params);
  CHECK(trace.cap_hit);
  CHECK(trace.alpha_star == 60.0);  // first lattice value past the cap
  CHECK(trace.check_count() == 6);
}

TEST_CASE("parameter validation") {
  AlphaSearchParams params;
  params.eps_init = 5.0;  // 5/0.001 is not a power of ten
  params.accuracy = 0.001;
  CHECK_THROWS_AS(params.validate(), ValidationError);
  params.eps_init = 4.0;
  params.accuracy = 0.004;  // ratio 1000: fine for rescaled lattices
  CHECK_NOTHROW(params.validate());
  params.accuracy = 8.0;
  CHECK_THROWS_AS(params.validate(), ValidationError);
}

TEST_CASE("full search against a decrease-domain mask") {
  const FixedLyapunov L("x1^2", 1);
  const UniformGrid gx = line_grid(-2.0, 2.0, 40);  // width 0.1
  const StateSampleTable table = StateSampleTable::build(L, gx, 40000, 8, 2);

  SUBCASE("interior window binds before the boundary") {
    // admissible region: cells covering [-1, 0.5)
    CellMask ndd(gx);
    for (std::size_t i = 10; i < 25; ++i) ndd.set(i);
    AlphaSearchParams params;
    params.eps_init = 10.0;
    params.accuracy = 0.001;
    const AlphaResult result = search_alpha(table, ndd, params);
    // growth stops when the mask would gain [0.5, 0.6), whose sample maximum
    // sits just under 0.36; the left gate at [-1.1,-1) binds later (1.21)
    CHECK(result.trace.alpha_star >= 0.24);
    CHECK(result.trace.alpha_star <= 0.36);
    CHECK(contained(result.level_set, ndd));
    CHECK(result.level_set.mask.any());
    // one accuracy step later the containment fails
    const LevelSetEstimate next =
        estimate_level_set(table, result.trace.alpha_star + params.accuracy);
    CHECK(!contained(next, ndd));
  }
  SUBCASE("all-admissible masks stop at the region edge") {
    CellMask ndd(gx);
    for (std::size_t i = 0; i < 40; ++i) ndd.set(i);
    AlphaSearchParams params;
    params.eps_init = 10.0;
    params.accuracy = 0.001;
    params.alpha_max = 1e6;
    const AlphaResult result = search_alpha(table, ndd, params);
    CHECK(!result.trace.cap_hit);
    // the boundary cells join once alpha reaches their sample maxima (~4)
    CHECK(result.trace.alpha_star > 3.5);
    CHECK(result.trace.alpha_star < 4.0);
    CHECK(!mask_touches_boundary(result.level_set.mask));

    AlphaSearchParams open = params;
    open.reject_boundary_leak = false;
    open.alpha_max = 100.0;
    const AlphaResult capped = search_alpha(table, ndd, open);
    CHECK(capped.trace.cap_hit);
    CHECK(capped.level_set.mask.count() == 40);
  }
  SUBCASE("empty admissible mask yields zero with a warning flag") {
    CellMask ndd(gx);
    AlphaSearchParams params;
    params.eps_init = 1.0;
    params.accuracy = 0.01;
    const AlphaResult result = search_alpha(table, ndd, params);
    CHECK(result.trace.alpha_star == 0.0);
    CHECK(result.trace.never_contained);
    CHECK(result.level_set.mask.none());
  }
}

TEST_CASE("default cap comes from the region corners") {
  const FixedLyapunov L("x1^2", 1);
  CHECK(default_alpha_cap(L, Box::make({-2.0}, {2.0})) == doctest::Approx(40.0));
  const FixedLyapunov asym("x1^2 + x1^3", 1);  // corner values -4 and 12
  CHECK(default_alpha_cap(asym, Box::make({-2.0}, {2.0})) == doctest::Approx(120.0));
}

}  // TEST_SUITE
