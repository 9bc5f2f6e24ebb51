#include <doctest.h>

#include <cmath>
#include <numbers>

#include "addivortes/error.hpp"
#include "addivortes/synthetic.hpp"

using namespace addivortes;

TEST_CASE("rotated-axis labels") {
  CHECK(rotated_axis_label(0.3, 0.7, 0.0) == 1);
  CHECK(rotated_axis_label(0.8, 0.2, std::numbers::pi / 4.0) == 1);
  CHECK(rotated_axis_label(0.2, 0.8, std::numbers::pi / 4.0) == 0);
  // boundary points get label 0
  CHECK(rotated_axis_label(0.0, 0.5, 0.0) == 0);
}

TEST_CASE("sinusoid labels") {
  CHECK(sinusoid_label(0.0, 0.1, 0.5) == 1);
  CHECK(sinusoid_label(std::numbers::pi / 20.0, 0.4, 0.5) == 0);
  for (double x1 : {0.1, 0.4, 0.9}) CHECK(sinusoid_label(x1, 0.01, 0.0) == 1);
  // sign flip of alpha with x2 -> -x2 flips labels off the boundary
  for (double x1 : {0.05, 0.3, 0.77})
    for (double x2 : {0.1, 0.35, 0.6}) CHECK(sinusoid_label(x1, x2, 0.5) != sinusoid_label(x1, -x2, -0.5));
}

TEST_CASE("spec validation") {
  SyntheticSpec spec;
  spec.parameter = 1.0;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec.parameter = -0.1;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec.kind = SyntheticKind::Sinusoid;
  spec.parameter = 2.0;
  CHECK_NOTHROW(spec.validate());
  spec.n = 0;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
}

TEST_CASE("generated data") {
  SyntheticSpec spec;
  spec.kind = SyntheticKind::RotatedAxis;
  spec.parameter = std::numbers::pi / 6.0;
  spec.n = 500;
  spec.seed = 4;
  const auto [x, y] = generate_dataset(spec);
  REQUIRE(x.rows() == 500);
  REQUIRE(x.cols() == 2);
  CHECK(x.names() == std::vector<std::string>{"x1", "x2"});
  for (std::size_t i = 0; i < x.rows(); ++i) {
    CHECK(x(i, 0) >= 0.0);
    CHECK(x(i, 0) < 1.0);
    CHECK(x(i, 1) >= 0.0);
    CHECK(x(i, 1) < 1.0);
    CHECK(y.y[i] == synthetic_label(spec, x(i, 0), x(i, 1)));
  }
  const auto again = generate_dataset(spec);
  CHECK(again.first.data() == x.data());
  CHECK(again.second.y == y.y);

  SyntheticSpec one = spec;
  one.n = 1;
  CHECK(generate_dataset(one).first.data() == generate_dataset(one).first.data());

  SyntheticSpec flat = spec;
  flat.parameter = 0.0;
  flat.n = 2000;
  const auto [fx, fy] = generate_dataset(flat);
  CHECK(fy.positives() >= 1995);
}
