#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "geoloc/error.hpp"
#include "geoloc/geo.hpp"
#include "oracles.hpp"

using namespace geoloc;

namespace {

GeoPoint random_point(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> lat(-89.9, 89.9), lon(-179.9, 180.0);
  return {lat(rng), lon(rng)};
}

}  // namespace

TEST(Geo, IdenticalPointsAreZeroApart) {
  const GeoPoint p{48.1, 11.6};
  EXPECT_EQ(orthodromic_distance(p, p).km(), 0.0);
}

TEST(Geo, OneDegreeOfEquatorIsArcOfMeanRadius) {
  const double expected = 2.0 * std::numbers::pi * 6371.0 / 360.0;
  EXPECT_NEAR(orthodromic_distance({0, 0}, {0, 1}).km(), expected, 1e-9);
  EXPECT_NEAR(expected, 111.195, 1e-3);
}

TEST(Geo, AntipodalOnEquatorIsHalfCircumference) {
  EXPECT_NEAR(orthodromic_distance({0, 0}, {0, 180}).km(), std::numbers::pi * 6371.0, 1e-6);
  EXPECT_NEAR(orthodromic_distance({0, 0}, {0, 180}).km(), 20015.1, 0.05);
}

TEST(Geo, AgreesWithVectorAngleOracle) {
  std::mt19937_64 rng(101);
  for (int i = 0; i < 2000; ++i) {
    const auto a = random_point(rng);
    const auto b = random_point(rng);
    EXPECT_NEAR(orthodromic_distance(a, b).km(), oracle::vector_distance_km(a.lat, a.lon, b.lat, b.lon), 1e-6);
  }
}

TEST(GeoProperty, SymmetricAndTriangleInequality) {
  std::mt19937_64 rng(202);
  for (int i = 0; i < 5000; ++i) {
    const auto a = random_point(rng), b = random_point(rng), c = random_point(rng);
    const double ab = orthodromic_distance(a, b).km();
    EXPECT_EQ(ab, orthodromic_distance(b, a).km());
    EXPECT_LE(orthodromic_distance(a, c).km(), ab + orthodromic_distance(b, c).km() + 1e-9);
  }
}

TEST(Geo, KmPerDegree) {
  EXPECT_DOUBLE_EQ(km_per_degree_lat(), 113.325);
  EXPECT_DOUBLE_EQ(km_per_degree_lon(0.0), 113.325);
  EXPECT_NEAR(km_per_degree_lon(90.0), 0.0, 1e-12);
  EXPECT_NEAR(km_per_degree_lon(60.0), 56.6625, 1e-9);
}

TEST(GeoProperty, KmPerDegreeLonDecreasesTowardPoles) {
  double previous = km_per_degree_lon(0.0);
  for (double lat = 0.5; lat <= 90.0; lat += 0.5) {
    const double here = km_per_degree_lon(lat);
    EXPECT_LT(here, previous);
    EXPECT_DOUBLE_EQ(here, km_per_degree_lon(-lat));
    previous = here;
  }
}

TEST(Geo, ToPlaneRadius) {
  EXPECT_DOUBLE_EQ(to_plane({0, 0}, KmDistance(113.325), 0.0).radius, 1.0);
  EXPECT_DOUBLE_EQ(to_plane({0, 0}, KmDistance(0.0), 0.0).radius, 0.0);
  EXPECT_DOUBLE_EQ(to_plane({0, 0}, KmDistance(226.65), 0.0).radius, 2.0);
}

TEST(Geo, ToPlaneScalesLongitudeByReferenceCosine) {
  const auto c = to_plane({45.0, 10.0}, KmDistance(1.0), 60.0);
  EXPECT_NEAR(c.center.x, 5.0, 1e-12);
  EXPECT_DOUBLE_EQ(c.center.y, 45.0);
}

TEST(Geo, PlaneRejectsPolarReference) {
  EXPECT_THROW(PlaneFrame(89.0), Error);
  EXPECT_THROW(PlaneFrame(-89.5), Error);
  EXPECT_NO_THROW(PlaneFrame(88.9));
  try {
    PlaneFrame bad(90.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DomainError);
  }
}

TEST(GeoProperty, PlaneRoundTrip) {
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> ref(-80.0, 80.0);
  for (int i = 0; i < 5000; ++i) {
    const PlaneFrame frame(ref(rng));
    const auto p = random_point(rng);
    const auto back = frame.to_geo(frame.to_plane(p));
    EXPECT_NEAR(back.lat, p.lat, 1e-9);
    EXPECT_NEAR(back.lon, p.lon, 1e-9);
  }
}

TEST(Geo, ValidatesPoints) {
  EXPECT_THROW(make_geo_point(91.0, 0.0), Error);
  EXPECT_THROW(make_geo_point(0.0, 180.5), Error);
  EXPECT_THROW(make_geo_point(std::numeric_limits<double>::quiet_NaN(), 0.0), Error);
  EXPECT_EQ(make_geo_point(0.0, -180.0).lon, 180.0);
  EXPECT_TRUE(is_valid({90.0, 180.0}));
  EXPECT_FALSE(is_valid({0.0, -180.0}));
}

TEST(Geo, KmDistanceIsNonNegativeAndFinite) {
  EXPECT_THROW(KmDistance(-1e-9), Error);
  EXPECT_THROW(KmDistance(std::numeric_limits<double>::infinity()), Error);
  EXPECT_EQ(KmDistance(3.5).km(), 3.5);
}

TEST(Geo, NormalizeLongitude) {
  EXPECT_DOUBLE_EQ(normalize_lon(190.0), -170.0);
  EXPECT_DOUBLE_EQ(normalize_lon(-190.0), 170.0);
  EXPECT_DOUBLE_EQ(normalize_lon(-180.0), 180.0);
  EXPECT_DOUBLE_EQ(normalize_lon(540.0), 180.0);
}
