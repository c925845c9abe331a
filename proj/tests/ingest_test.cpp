#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "sidewalk/error.hpp"
#include "sidewalk/ingest.hpp"
#include "test_util.hpp"

using namespace sidewalk;

namespace {

GeoPoint const kOrigin{-122.3321, 47.6062};
Projection const kProj{kOrigin};

json line_feature(std::string const& id, std::vector<LocalPoint> const& pts, json props = json::object()) {
  auto coords = json::array();
  for (auto const p : pts) {
    auto const g = kProj.unproject(p);
    coords.push_back({g.lon, g.lat});
  }
  return {{"type", "Feature"},
          {"id", id},
          {"properties", props},
          {"geometry", {{"type", "LineString"}, {"coordinates", coords}}}};
}

json point_feature(std::string const& id, LocalPoint p, json props = json::object()) {
  auto const g = kProj.unproject(p);
  return {{"type", "Feature"},
          {"id", id},
          {"properties", props},
          {"geometry", {{"type", "Point"}, {"coordinates", {g.lon, g.lat}}}}};
}

json collection(json features) {
  return {{"type", "FeatureCollection"}, {"features", std::move(features)}};
}

}  // namespace

TEST(LoadFeatures, EmptyCollection) {
  auto const set = parse_features(collection(json::array()), GeometryKind::polyline, kProj);
  EXPECT_TRUE(set.features.empty());
}

TEST(LoadFeatures, HundredMeterLine) {
  auto const set = parse_features(collection({line_feature("a", {{0, 0}, {100, 0}})}),
                                  GeometryKind::polyline, kProj);
  ASSERT_EQ(set.features.size(), 1u);
  EXPECT_EQ(set.features[0].id, "a");
  EXPECT_NEAR(polyline_length(set.features[0].line()), 100.0, 1e-6);
}

TEST(LoadFeatures, PointAsSidewalkIsSchemaError) {
  EXPECT_THROW(parse_features(collection({point_feature("p", {0, 0})}), GeometryKind::polyline, kProj),
               SchemaError);
}

TEST(LoadFeatures, MissingIdsAreSynthesized) {
  auto a = line_feature("x", {{0, 0}, {10, 0}});
  a.erase("id");
  auto const set = parse_features(collection({a, line_feature("b", {{0, 5}, {10, 5}})}),
                                  GeometryKind::polyline, kProj);
  EXPECT_EQ(set.features[0].id, "f0");
  EXPECT_EQ(set.features[1].id, "b");
}

TEST(LoadFeatures, DuplicateIdIsSchemaError) {
  EXPECT_THROW(parse_features(collection({line_feature("a", {{0, 0}, {1, 0}}),
                                          line_feature("a", {{0, 1}, {1, 1}})}),
                              GeometryKind::polyline, kProj),
               SchemaError);
}

TEST(LoadFeatures, MalformedJsonIsFormatError) {
  test_util::TempDir dir;
  std::ofstream{dir / "bad.geojson"} << "{\"type\": \"FeatureCollection\", \"features\": [";
  EXPECT_THROW(load_features(dir / "bad.geojson", GeometryKind::polyline, kProj), FormatError);
}

TEST(LoadFeatures, RoundTripPreservesIdsGeometryAndProperties) {
  test_util::TempDir dir;
  auto const original = parse_features(
      collection({line_feature("a", {{0, 0}, {50, 10}, {80, -5}}, {{"width", 1.5}, {"name", "Pine"}}),
                  line_feature("b", {{-20, 3}, {-90, 40}}, {{"lanes", 2}, {"lit", true}, {"note", nullptr}})}),
      GeometryKind::polyline, kProj);
  write_json_file(dir / "a.geojson", to_geojson(original));
  auto const once = load_features(dir / "a.geojson", GeometryKind::polyline, kProj);
  write_json_file(dir / "b.geojson", to_geojson(once));
  auto const twice = load_features(dir / "b.geojson", GeometryKind::polyline, kProj);
  ASSERT_EQ(twice.features.size(), original.features.size());
  for (std::size_t i = 0; i < original.features.size(); ++i) {
    auto const& o = original.features[i];
    auto const& t = twice.features[i];
    EXPECT_EQ(o.id, t.id);
    EXPECT_EQ(o.properties, t.properties);
    ASSERT_EQ(o.line().size(), t.line().size());
    for (std::size_t k = 0; k < o.line().size(); ++k) {
      auto const go = kProj.unproject(o.line()[k]);
      auto const gt = kProj.unproject(t.line()[k]);
      EXPECT_LT(std::abs(go.lon - gt.lon), 1e-9);
      EXPECT_LT(std::abs(go.lat - gt.lat), 1e-9);
    }
  }
}

TEST(ElevationGrid, AllZerosIsFlat) {
  std::istringstream in{"ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 10\n0 0\n0 0\n"};
  auto const g = parse_elevation_grid(in);
  EXPECT_EQ(g.sample({5, 5}), 0.0);
  EXPECT_EQ(g.sample({12, 17}), 0.0);
}

TEST(ElevationGrid, ExactAtCellCenters) {
  std::istringstream in{
      "ncols 3\nnrows 3\nxllcorner 0\nyllcorner 0\ncellsize 10\nNODATA_value -9999\n"
      "0 1 2\n3 4 5\n6 7 8\n"};
  auto const g = parse_elevation_grid(in);
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      EXPECT_EQ(g.sample(g.cell_center(r, c)), r * 3 + c);
    }
  }
}

TEST(ElevationGrid, TruncatedIsFormatError) {
  std::istringstream in{"ncols 3\nnrows 3\nxllcorner 0\nyllcorner 0\ncellsize 10\n0 1 2\n3 4\n"};
  EXPECT_THROW(parse_elevation_grid(in), FormatError);
}

TEST(ElevationGrid, OutsideIsExtentError) {
  std::istringstream in{"ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 10\n0 0\n0 0\n"};
  auto const g = parse_elevation_grid(in);
  EXPECT_THROW(g.sample({25, 5}), ExtentError);
}

TEST(ElevationGrid, NodataNeighbourIsNodataError) {
  std::istringstream in{
      "ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 10\nNODATA_value -9999\n0 -9999\n0 0\n"};
  auto const g = parse_elevation_grid(in);
  EXPECT_THROW(g.sample({10, 10}), NodataError);
  EXPECT_EQ(g.sample({5, 5}), 0.0);
}

TEST(ElevationGrid, WriteThenParseIsIdentity) {
  ElevationGrid g;
  g.ncols = 3;
  g.nrows = 2;
  g.cellsize = 2.5;
  g.lower_left = {-7.25, 3.125};
  g.values = {0.1, 0.2, 0.3, 1.0 / 3.0, 5.0, -2.75};
  std::stringstream buf;
  write_elevation_grid(buf, g);
  auto const back = parse_elevation_grid(buf);
  EXPECT_EQ(back.values, g.values);
  EXPECT_EQ(back.lower_left, g.lower_left);
  EXPECT_EQ(back.cellsize, g.cellsize);
}

class PermitFilter : public ::testing::Test {
 protected:
  PermitSet make(bool impact) {
    return parse_permits(collection({point_feature("p", {0, 0},
                                                   {{"start_date", "2015-06-01"},
                                                    {"end_date", "2015-09-01"},
                                                    {"sidewalk_impact", impact}})}),
                         kProj);
  }
};

TEST_F(PermitFilter, ActiveDateRetained) {
  EXPECT_EQ(filter_permits(make(true), parse_date("2015-07-01")).permits.size(), 1u);
}

TEST_F(PermitFilter, LaterDateDropped) {
  EXPECT_TRUE(filter_permits(make(true), parse_date("2015-10-01")).permits.empty());
}

TEST_F(PermitFilter, NoSidewalkImpactDropped) {
  EXPECT_TRUE(filter_permits(make(false), parse_date("2015-07-01")).permits.empty());
}

TEST_F(PermitFilter, SubsetAndIdempotent) {
  auto const set = make(true);
  auto const once = filter_permits(set, parse_date("2015-06-01"));
  auto const twice = filter_permits(once, parse_date("2015-06-01"));
  EXPECT_LE(once.permits.size(), set.permits.size());
  ASSERT_EQ(once.permits.size(), twice.permits.size());
  EXPECT_EQ(once.permits[0].feature.id, twice.permits[0].feature.id);
}

TEST(PermitParse, BadDateIsSchemaError) {
  EXPECT_THROW(parse_permits(collection({point_feature("p", {0, 0},
                                                       {{"start_date", "June"},
                                                        {"end_date", "2015-09-01"},
                                                        {"sidewalk_impact", true}})}),
                             kProj),
               SchemaError);
}

TEST(OrphanRamps, FarRampIsReported) {
  auto const sidewalks = parse_features(collection({line_feature("s", {{0, 0}, {40, 0}})}),
                                        GeometryKind::polyline, kProj);
  auto const ramps = parse_features(collection({point_feature("near", {41, 1}), point_feature("far", {200, 0})}),
                                    GeometryKind::point, kProj);
  EXPECT_EQ(orphan_curb_ramps(ramps, sidewalks), std::vector<std::string>{"far"});
}
