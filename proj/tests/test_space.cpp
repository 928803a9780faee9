#include <cmath>
#include <stdexcept>

#include <doctest.h>

#include "obtune/random.hpp"
#include "obtune/space.hpp"

using namespace obtune;

namespace {

HyperParamSpace mixed_space() {
  return HyperParamSpace({{"rate", ParamKind::Continuous, 0.001, 1.0, {}},
                          {"depth", ParamKind::Integer, 1, 16, {}},
                          {"momentum", ParamKind::Continuous, -2.0, 2.0, {}}});
}

}  // namespace

TEST_CASE("spec validation rejects malformed parameters") {
  CHECK_THROWS_AS(HyperParamSpace({}), std::invalid_argument);
  CHECK_THROWS_AS(HyperParamSpace({{"", ParamKind::Continuous, 0, 1, {}}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(HyperParamSpace({{"x", ParamKind::Continuous, 1, 1, {}}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(HyperParamSpace({{"x", ParamKind::Continuous, 2, 1, {}}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      HyperParamSpace({{"x", ParamKind::Continuous, 0,
                        std::numeric_limits<double>::infinity(), {}}}),
      std::invalid_argument);
  CHECK_THROWS_AS(HyperParamSpace({{"x", ParamKind::Integer, 0.5, 4, {}}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(HyperParamSpace({{"x", ParamKind::Integer, 3, 3, {}}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(HyperParamSpace({{"x", ParamKind::Continuous, 0, 1, {}},
                                   {"x", ParamKind::Continuous, 0, 1, {}}}),
                  std::invalid_argument);
}

TEST_CASE("digest is stable and sensitive") {
  const HyperParamSpace a = mixed_space();
  const HyperParamSpace b = mixed_space();
  CHECK(a.digest() == b.digest());

  const HyperParamSpace renamed(
      {{"rate2", ParamKind::Continuous, 0.001, 1.0, {}},
       {"depth", ParamKind::Integer, 1, 16, {}},
       {"momentum", ParamKind::Continuous, -2.0, 2.0, {}}});
  CHECK(renamed.digest() != a.digest());

  const HyperParamSpace rebound(
      {{"rate", ParamKind::Continuous, 0.001, 0.9, {}},
       {"depth", ParamKind::Integer, 1, 16, {}},
       {"momentum", ParamKind::Continuous, -2.0, 2.0, {}}});
  CHECK(rebound.digest() != a.digest());

  const HyperParamSpace rekinded(
      {{"rate", ParamKind::Continuous, 0.001, 1.0, {}},
       {"depth", ParamKind::Continuous, 1, 16, {}},
       {"momentum", ParamKind::Continuous, -2.0, 2.0, {}}});
  CHECK(rekinded.digest() != a.digest());
}

TEST_CASE("sampling is deterministic and in bounds") {
  const HyperParamSpace space = mixed_space();
  SplitMix64 a(99);
  SplitMix64 b(99);
  for (int i = 0; i < 200; ++i) {
    const HyperParamVector x = space.sample(a);
    const HyperParamVector y = space.sample(b);
    CHECK(x == y);
    REQUIRE(space.contains(x));
    CHECK(x[1] == std::floor(x[1]));  // integer coordinate stays whole
  }
}

TEST_CASE("sample means match uniform draws") {
  const HyperParamSpace space(
      {{"c", ParamKind::Continuous, 0.0, 10.0, {}},
       {"i", ParamKind::Integer, 1, 5, {}}});
  SplitMix64 rng(123);
  double sum_c = 0.0;
  double sum_i = 0.0;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    const HyperParamVector x = space.sample(rng);
    sum_c += x[0];
    sum_i += x[1];
  }
  // 3 standard errors: sd 10/sqrt(12) over 1e4 draws, and sd sqrt(2) for
  // the uniform integer on {1..5}
  CHECK(std::abs(sum_c / draws - 5.0) < 0.0866);
  CHECK(std::abs(sum_i / draws - 3.0) < 0.0424);
}

TEST_CASE("denormalize hits the bounds exactly at 0 and 1") {
  const HyperParamSpace space = mixed_space();
  for (std::size_t i = 0; i < space.size(); ++i) {
    CHECK(space.denormalize_coord(i, 0.0) == space.param(i).lower);
    CHECK(space.denormalize_coord(i, 1.0) == space.param(i).upper);
  }
  CHECK_THROWS_AS(space.denormalize_coord(0, std::nan("")),
                  std::invalid_argument);
  // out-of-range unit values clamp instead of extrapolating
  CHECK(space.denormalize_coord(2, -0.5) == -2.0);
  CHECK(space.denormalize_coord(2, 1.5) == 2.0);
}

TEST_CASE("integer denormalization rounds half up") {
  const HyperParamSpace space({{"k", ParamKind::Integer, 0, 4, {}}});
  CHECK(space.denormalize_coord(0, 0.1) == 0.0);    // native 0.4
  CHECK(space.denormalize_coord(0, 0.375) == 2.0);  // native 1.5, ties up
  CHECK(space.denormalize_coord(0, 0.625) == 3.0);  // native 2.5, ties up
  CHECK(space.denormalize_coord(0, 0.9) == 4.0);    // native 3.6
}

TEST_CASE("normalize inverts denormalize on native values") {
  const HyperParamSpace space = mixed_space();
  SplitMix64 rng(5);
  for (int trial = 0; trial < 2000; ++trial) {
    for (std::size_t i = 0; i < space.size(); ++i) {
      const double native = space.denormalize_coord(i, rng.next_double());
      const double unit = space.normalize_coord(i, native);
      CHECK(space.denormalize_coord(i, unit) == native);
    }
  }
  // whole-vector round trip
  const HyperParamVector hp = space.sample(rng);
  CHECK(space.denormalize(space.normalize(hp)) == hp);
}

TEST_CASE("integer normalization is the plain affine map") {
  const HyperParamSpace space({{"k", ParamKind::Integer, 1, 5, {}}});
  CHECK(space.normalize_coord(0, 1.0) == 0.0);
  CHECK(space.normalize_coord(0, 3.0) == 0.5);
  CHECK(space.normalize_coord(0, 5.0) == 1.0);
}

TEST_CASE("contains and require_valid police membership") {
  const HyperParamSpace space = mixed_space();
  CHECK(space.contains(HyperParamVector({0.5, 4.0, 0.0})));
  CHECK_FALSE(space.contains(HyperParamVector({0.5, 4.5, 0.0})));
  CHECK_FALSE(space.contains(HyperParamVector({0.5, 4.0})));
  CHECK_FALSE(space.contains(HyperParamVector({2.0, 4.0, 0.0})));
  CHECK_FALSE(space.contains(HyperParamVector({0.5, 4.0, std::nan("")})));
  CHECK_THROWS_AS(space.require_valid(HyperParamVector({9.0, 4.0, 0.0})),
                  std::invalid_argument);
  CHECK_NOTHROW(space.require_valid(HyperParamVector({0.5, 4.0, 0.0})));
}

TEST_CASE("cost functions cover their kinds") {
  const CostFunction zero = CostFunction::zero();
  CHECK(zero(123.0) == 0.0);

  const CostFunction linear = CostFunction::linear_normalized(2.0, 10.0);
  CHECK(linear(2.0) == 0.0);
  CHECK(linear(10.0) == 1.0);
  CHECK(linear(6.0) == doctest::Approx(0.5));
  CHECK(linear(0.0) == 0.0);    // clamped below
  CHECK(linear(100.0) == 1.0);  // clamped above
  CHECK_THROWS_AS(CostFunction::linear_normalized(5.0, 5.0),
                  std::invalid_argument);

  const CostFunction table =
      CostFunction::table({{0.0, 0.1}, {10.0, 0.5}, {20.0, 0.6}});
  CHECK(table(-5.0) == 0.1);  // held at the first point
  CHECK(table(25.0) == 0.6);  // held at the last point
  CHECK(table(5.0) == doctest::Approx(0.3));
  CHECK(table(15.0) == doctest::Approx(0.55));
  CHECK_THROWS_AS(CostFunction::table({}), std::invalid_argument);
  CHECK_THROWS_AS(CostFunction::table({{0.0, 1.5}}), std::invalid_argument);
  CHECK_THROWS_AS(CostFunction::table({{1.0, 0.1}, {1.0, 0.2}}),
                  std::invalid_argument);
}
