#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "rqc/channel.hpp"

using namespace rqc;
using namespace rqc::channel;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using hp = boost::multiprecision::cpp_bin_float_50;

TEST_CASE("gain against a 50-digit oracle") {
  for (double kappa = 1e-3; kappa <= 50.0; kappa *= 1.07) {
    const double oracle = static_cast<double>(1 / (1 - exp(-hp(kappa))));
    CHECK_THAT(gain_from_kappa(kappa), WithinAbs(oracle, 1e-12));
  }
  CHECK(gain_from_kappa(std::log(2.0)) == 2.0);
}

TEST_CASE("kappa from geometry") {
  CHECK_THAT(kappa(-10.0, 0.1), WithinRel(2.0 * std::numbers::pi, 1e-15));
  CHECK_THAT(effective_gain(-1.0, std::log(2.0) / (2.0 * std::numbers::pi)), WithinRel(2.0, 1e-15));
  CHECK_THROWS_AS(kappa(-1.0, 0.0), HorizonError);
  CHECK_THROWS_AS(kappa(0.0, 1.0), DomainError);
  CHECK_THROWS_AS(gain_from_kappa(0.0), DomainError);
}

TEST_CASE("gain and variance strictly decrease in kappa") {
  double g_prev = INFINITY;
  double v_prev = INFINITY;
  for (double kappa = 1e-3; kappa <= 30.0; kappa *= 1.1) {
    const auto p = ChannelParams::from_kappa(kappa);
    CHECK(p.G < g_prev);
    CHECK(quadrature_variance(p) < v_prev);
    g_prev = p.G;
    v_prev = quadrature_variance(p);
  }
}

TEST_CASE("variance is 2G - 1 at unit efficiency and loss-mixed otherwise") {
  for (double kappa : {1e-3, 0.1, 1.0, 5.0, 50.0}) {
    const double G = gain_from_kappa(kappa);
    CHECK_THAT(quadrature_variance(ChannelParams::from_kappa(kappa)), WithinAbs(2.0 * G - 1.0, 1e-12));
    const auto lossy = ChannelParams::from_kappa(kappa, 0.7);
    CHECK_THAT(quadrature_variance(lossy), WithinRel(0.7 * (2.0 * G - 1.0) + 0.3, 1e-13));
  }
  CHECK(quadrature_variance(ChannelParams::from_kappa(60.0)) == 1.0);
}

TEST_CASE("mean quadrature") {
  const auto p = ChannelParams::from_kappa(std::log(2.0), 0.5, {0.3, 0.4}, 0.0);
  CHECK_THAT(mean_quadrature(p), WithinRel(0.6, 1e-14));
  const auto q = ChannelParams::from_kappa(std::log(2.0), 1.0, {0.3, 0.4}, std::numbers::pi / 2.0);
  CHECK_THAT(mean_quadrature(q), WithinRel(-0.8 * std::sqrt(2.0), 1e-14));
  CHECK(mean_quadrature(ChannelParams::from_kappa(1.0)) == 0.0);
  CHECK(ChannelParams::from_geometry(-10.0, 0.1).q == std::exp(-kappa(-10.0, 0.1)));
  CHECK_THROWS_AS(ChannelParams::from_kappa(1.0, 0.0), DomainError);
  CHECK_THROWS_AS(ChannelParams::from_kappa(1.0, 1.5), DomainError);
}

TEST_CASE("doppler gain profile") {
  const auto prof = doppler_gain_profile(1.0, -1.0, {-0.6, 0.0, 0.6});
  REQUIRE(prof.size() == 3);
  CHECK_THAT(prof[0].T, WithinRel(0.5, 1e-15));
  CHECK(prof[1].T == 1.0);
  CHECK(prof[2].T == 2.0);
  CHECK(prof[0].G > prof[1].G);
  CHECK(prof[1].G > prof[2].G);
  CHECK_THAT(prof[2].G, WithinRel(effective_gain(-1.0, 2.0), 1e-15));
}
