#include "twoscale/directions.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace twoscale;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("build_direction_set: theta = 0.8 gives the four half-circle axes") {
  const DirectionSet set = build_direction_set(0.8);
  REQUIRE(set.size() == 4);
  for (int k = 0; k < 4; ++k) {
    const double phi = k * kPi / 4.0;
    CHECK((set.dirs[k] - Vec2(std::cos(phi), std::sin(phi))).norm() <= 1e-14);
  }
  // Dense sampling confirms the chord covering.
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> uni(0.0, 2.0 * kPi);
  for (int s = 0; s < 10000; ++s) {
    const double phi = uni(rng);
    CHECK(set.covering_gap(Vec2(std::cos(phi), std::sin(phi))) <= 0.8);
  }
}

TEST_CASE("build_direction_set: unit norms and count scaling") {
  for (double theta : {1.0, 0.8, 0.4, 0.2, 0.11}) {
    const DirectionSet set = build_direction_set(theta);
    for (const Vec2& v : set.dirs) CHECK(std::abs(v.norm() - 1.0) <= 1e-14);
    CHECK(set.size() >= static_cast<int>(std::ceil(kPi / theta)));
  }
  // Halving theta doubles the count within one.
  for (double theta : {0.8, 0.4, 0.2}) {
    const int m = build_direction_set(theta).size();
    const int m2 = build_direction_set(0.5 * theta).size();
    CHECK(std::abs(m2 - 2 * m) <= 1);
  }
}

TEST_CASE("build_direction_set: covering property at several resolutions") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> uni(0.0, 2.0 * kPi);
  for (double theta : {0.9, 0.35, 0.12}) {
    const DirectionSet set = build_direction_set(theta);
    double worst = 0.0;
    for (int s = 0; s < 10000; ++s) {
      const double phi = uni(rng);
      worst = std::max(worst, set.covering_gap(Vec2(std::cos(phi), std::sin(phi))));
    }
    CHECK(worst <= theta);
  }
}

TEST_CASE("build_direction_set rejects out-of-range theta") {
  CHECK_THROWS_AS(build_direction_set(0.0), std::invalid_argument);
  CHECK_THROWS_AS(build_direction_set(1.5), std::invalid_argument);
  CHECK_THROWS_AS(build_direction_set(-0.2), std::invalid_argument);
}

TEST_CASE("build_ortho_tuples: theta = 0.8 gives the axes and diagonal pairs") {
  const OrthoTupleSet tuples = build_ortho_tuples(build_direction_set(0.8));
  REQUIRE(tuples.size() == 2);
  CHECK((tuples.component(0, 0) - Vec2(1, 0)).norm() <= 1e-14);
  CHECK((tuples.component(0, 1) - Vec2(0, 1)).norm() <= 1e-14);
  const double s = std::sqrt(0.5);
  CHECK((tuples.component(1, 0) - Vec2(s, s)).norm() <= 1e-14);
  CHECK((tuples.component(1, 1) - Vec2(-s, s)).norm() <= 1e-14);
}

TEST_CASE("build_ortho_tuples: Gram identity and perpendicular closure") {
  for (double theta : {0.8, 0.3, 0.15}) {
    const OrthoTupleSet tuples = build_ortho_tuples(build_direction_set(theta));
    for (int t = 0; t < tuples.size(); ++t) {
      const Vec2 v0 = tuples.component(t, 0);
      const Vec2 v1 = tuples.component(t, 1);
      Eigen::Matrix2d gram;
      gram << v0.dot(v0), v0.dot(v1), v1.dot(v0), v1.dot(v1);
      CHECK((gram - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() <= 1e-12);
      CHECK((Vec2(-v0.y(), v0.x()) - v1).norm() <= 1e-12);
    }
  }
}

TEST_CASE("build_ortho_tuples: componentwise covering of random rotations") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> uni(0.0, 2.0 * kPi);
  for (double theta : {0.8, 0.3}) {
    const OrthoTupleSet tuples = build_ortho_tuples(build_direction_set(theta));
    double worst = 0.0;
    for (int s = 0; s < 1000; ++s) {
      const double phi = uni(rng);
      const Vec2 w0(std::cos(phi), std::sin(phi));
      const Vec2 w1(-w0.y(), w0.x());
      double best = std::numeric_limits<double>::infinity();
      for (int t = 0; t < tuples.size(); ++t) {
        const Vec2 v0 = tuples.component(t, 0);
        const Vec2 v1 = tuples.component(t, 1);
        // Components match up to order and sign (second differences are even).
        for (int swap = 0; swap < 2; ++swap) {
          const Vec2& c0 = swap ? v1 : v0;
          const Vec2& c1 = swap ? v0 : v1;
          const double d0 = std::min((w0 - c0).norm(), (w0 + c0).norm());
          const double d1 = std::min((w1 - c1).norm(), (w1 + c1).norm());
          best = std::min(best, std::max(d0, d1));
        }
      }
      worst = std::max(worst, best);
    }
    CHECK(worst <= theta);
  }
}

TEST_CASE("axes_tuple_set is the exact coordinate pair") {
  const OrthoTupleSet axes = axes_tuple_set();
  REQUIRE(axes.size() == 1);
  CHECK(axes.component(0, 0) == Vec2(1, 0));
  CHECK(axes.component(0, 1) == Vec2(0, 1));
}
