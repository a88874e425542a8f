#include <doctest.h>

#include <cmath>

#include "robdoa/plant.hpp"
#include "robdoa/rng.hpp"

using namespace robdoa;

namespace {

SuccessorBox box_at(const PlantSet& p, double x, double u) {
  return p.successor_box(std::span<const double>(&x, 1),
                         std::span<const double>(&u, 1));
}

}  // namespace

TEST_SUITE("plant") {

TEST_CASE("builtin registry") {
  CHECK_NOTHROW(PlantSet::builtin("paper-sec5"));
  CHECK_THROWS_AS(PlantSet::builtin("no-such-plant"), ValidationError);
  try {
    PlantSet::builtin("no-such-plant");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("paper-sec5") != std::string::npos);
  }
  CHECK(PlantSet::builtin_names().size() == 1);
}

TEST_CASE("builtin nominal values match the frozen references") {
  const PlantSet p = PlantSet::builtin("paper-sec5");
  double x = 1.0, u = 0.0, f = 0.0;
  p.nominal_into(std::span<const double>(&x, 1), std::span<const double>(&u, 1),
                 std::span<double>(&f, 1));
  CHECK(std::fabs(f - (-1.1092974268256817)) < 1e-12);  // -sin(2) - 0.2
  x = 0.0;
  double d = -1.0;
  p.error_bound_into(std::span<const double>(&x, 1), std::span<const double>(&u, 1),
                     std::span<double>(&d, 1));
  CHECK(d == 0.0);  // bound vanishes exactly at the origin
}

TEST_CASE("successor box at the origin is degenerate") {
  const PlantSet p = PlantSet::builtin("paper-sec5");
  const SuccessorBox b = box_at(p, 0.0, 0.0);
  CHECK(b.lower[0] == 0.0);
  CHECK(b.upper[0] == 0.0);
}

TEST_CASE("successor box matches the frozen references") {
  const PlantSet p = PlantSet::builtin("paper-sec5");
  {
    const SuccessorBox b = box_at(p, 0.5, 0.3);
    CHECK(std::fabs(b.lower[0] - (-1.0378)) < 1e-3);
    CHECK(std::fabs(b.upper[0] - (-0.7251)) < 1e-3);
    // tighter: frozen 30-digit endpoints
    CHECK(std::fabs(b.lower[0] - (-1.0378061682115128)) < 1e-12);
    CHECK(std::fabs(b.upper[0] - (-0.7251358014042802)) < 1e-12);
  }
  {
    const SuccessorBox b = box_at(p, 1.0, 1.0);
    const double center = 0.5 * (b.lower[0] + b.upper[0]);
    const double half = 0.5 * (b.upper[0] - b.lower[0]);
    CHECK(std::fabs(center - (-2.1093)) < 1e-3);
    CHECK(std::fabs(half - 0.6321) < 1e-3);
  }
}

TEST_CASE("box center equals the nominal value everywhere sampled") {
  const PlantSet p = PlantSet::builtin("paper-sec5");
  for (std::size_t i = 0; i < 500; ++i) {
    const rng::Stream s{rng::Domain::probes, 4};
    const double x = rng::uniform(13, s, 2 * i, -2.0, 2.0);
    const double u = rng::uniform(13, s, 2 * i + 1, -2.0, 2.0);
    const SuccessorBox b = box_at(p, x, u);
    REQUIRE(b.lower[0] <= b.upper[0]);
    double f = 0.0;
    p.nominal_into(std::span<const double>(&x, 1), std::span<const double>(&u, 1),
                   std::span<double>(&f, 1));
    REQUIRE(std::fabs(0.5 * (b.lower[0] + b.upper[0]) - f) <
            1e-15 + 1e-12 * std::fabs(f));
  }
}

TEST_CASE("plants whose maps do not vanish at the origin are rejected") {
  CHECK_THROWS_AS(PlantSet::from_expressions(1, 1, {"x1 + 1"}, {"x1^2"}),
                  ValidationError);
  CHECK_THROWS_AS(PlantSet::from_expressions(1, 1, {"x1"}, {"1 + x1^2"}),
                  ValidationError);
  CHECK_NOTHROW(PlantSet::from_expressions(1, 1, {"x1"}, {"x1^2"}));
}

TEST_CASE("negative error-bound samples are hard errors") {
  const PlantSet p = PlantSet::from_expressions(1, 1, {"x1"}, {"x1"});
  CHECK_NOTHROW(box_at(p, 0.5, 0.0));
  CHECK_THROWS_AS(box_at(p, -0.5, 0.0), EvalError);
}

TEST_CASE("expression dimension mismatches are rejected") {
  CHECK_THROWS_AS(PlantSet::from_expressions(2, 1, {"x1"}, {"x1^2", "x2^2"}),
                  ValidationError);
  CHECK_THROWS_AS(PlantSet::from_expressions(1, 1, {"x2"}, {"x1^2"}),
                  ParseError);
}

TEST_CASE("definition hash separates plants") {
  const PlantSet a = PlantSet::builtin("paper-sec5");
  const PlantSet b = PlantSet::from_expressions(1, 1, {"x1"}, {"x1^2"});
  CHECK(a.definition_hash() != b.definition_hash());
  CHECK(a.definition_hash() == PlantSet::builtin("paper-sec5").definition_hash());
}

}  // TEST_SUITE
