#include <atomic>
#include <thread>

#include <gtest/gtest.h>

#include "httplib.h"

#include "route_schema.hpp"
#include "sidewalk/pipeline.hpp"
#include "sidewalk/service.hpp"
#include "sidewalk/synth.hpp"

using namespace sidewalk;

namespace {

Date const kToday = parse_date("2026-01-15");

class ServiceTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    CityParams p;
    p.blocks_x = p.blocks_y = 3;
    Config config;
    config.origin = p.origin;
    auto const city = generate_city(p);
    graph_ = std::make_shared<RoutingGraph const>(build_network(city.data, config).graph);

    p.ramp_probability = 0.0;
    auto const bare = generate_city(p);
    bare_ = std::make_shared<RoutingGraph const>(build_network(bare.data, config).graph);
  }
  static void TearDownTestSuite() {
    graph_.reset();
    bare_.reset();
  }

  static std::size_t near(RoutingGraph const& g, double x, double y) {
    return g.nearest_node({x, y}, 200.0).value();
  }
  static nlohmann::json lonlat(RoutingGraph const& g, std::size_t node) {
    auto const p = g.projection().unproject(g.node(node).location);
    return {p.lon, p.lat};
  }
  static nlohmann::json request(RoutingGraph const& g, std::size_t a, std::size_t b,
                                nlohmann::json profile = "default") {
    return {{"origin", lonlat(g, a)},
            {"destination", lonlat(g, b)},
            {"profile", std::move(profile)},
            {"query_date", "2026-01-15"}};
  }

  static std::shared_ptr<RoutingGraph const> graph_;
  static std::shared_ptr<RoutingGraph const> bare_;
};

std::shared_ptr<RoutingGraph const> ServiceTest::graph_;
std::shared_ptr<RoutingGraph const> ServiceTest::bare_;

}  // namespace

TEST_F(ServiceTest, ValidRouteIsSchemaValid) {
  auto const a = near(*graph_, -140, -140);
  auto const last = near(*graph_, 140, 140);
  auto const r = handle_route(*graph_, request(*graph_, a, last).dump(), kToday);
  ASSERT_EQ(r.status, 200) << r.text();
  EXPECT_EQ(test_util::route_schema_errors(r.body), std::vector<std::string>{});
  EXPECT_EQ(r.body["origin_node"], a);
  EXPECT_EQ(r.body["destination_node"], last);
  EXPECT_GT(r.body["steps"].size(), 1u);
  EXPECT_EQ(r.body["profile"]["query_date"], "2026-01-15");
}

TEST_F(ServiceTest, MissingQueryDateUsesToday) {
  auto req = request(*graph_, 0, 5);
  req.erase("query_date");
  auto const r = handle_route(*graph_, req.dump(), kToday);
  ASSERT_EQ(r.status, 200);
  EXPECT_EQ(r.body["profile"]["query_date"], "2026-01-15");
}

TEST_F(ServiceTest, SameWaypointGivesTrivialRoute) {
  auto const r = handle_route(*graph_, request(*graph_, 3, 3).dump(), kToday);
  ASSERT_EQ(r.status, 200);
  EXPECT_EQ(r.body["total_cost"], 0.0);
  EXPECT_EQ(test_util::route_schema_errors(r.body), std::vector<std::string>{});
}

TEST_F(ServiceTest, OceanOriginIs422) {
  auto req = request(*graph_, 0, 1);
  req["origin"] = {-140.0, 40.0};
  auto const r = handle_route(*graph_, req.dump(), kToday);
  EXPECT_EQ(r.status, 422);
  EXPECT_EQ(r.body["error"], "unroutable_waypoint");
  EXPECT_EQ(r.body["field"], "origin");
  EXPECT_TRUE(r.body["nearest_distance_m"].is_null());

  auto const g = graph_->projection().unproject({5000.0, 0.0});
  req["origin"] = {g.lon, g.lat};
  auto const near = handle_route(*graph_, req.dump(), kToday);
  EXPECT_EQ(near.status, 422);
  EXPECT_TRUE(near.body["nearest_distance_m"].is_number());
}

TEST_F(ServiceTest, UnknownPresetIs400) {
  auto const r = handle_route(*graph_, request(*graph_, 0, 1, "jetpack").dump(), kToday);
  EXPECT_EQ(r.status, 400);
  EXPECT_EQ(r.body["error"], "bad_request");
  EXPECT_EQ(r.body["field"], "profile");
}

TEST_F(ServiceTest, MalformedRequestsAre400WithField) {
  EXPECT_EQ(handle_route(*graph_, "{not json", kToday).status, 400);
  auto missing = request(*graph_, 0, 1);
  missing.erase("destination");
  auto const m = handle_route(*graph_, missing.dump(), kToday);
  EXPECT_EQ(m.status, 400);
  EXPECT_EQ(m.body["field"], "destination");
  auto bad_coord = request(*graph_, 0, 1);
  bad_coord["origin"] = {1.0};
  EXPECT_EQ(handle_route(*graph_, bad_coord.dump(), kToday).body["field"], "origin");
  auto bad_date = request(*graph_, 0, 1);
  bad_date["query_date"] = "15/01/2026";
  EXPECT_EQ(handle_route(*graph_, bad_date.dump(), kToday).body["field"], "query_date");
  auto extra = request(*graph_, 0, 1);
  extra["speed"] = 3;
  EXPECT_EQ(handle_route(*graph_, extra.dump(), kToday).body["field"], "speed");
  auto bad_profile = request(*graph_, 0, 1, {{"w_distance", -1}});
  EXPECT_EQ(handle_route(*graph_, bad_profile.dump(), kToday).body["field"], "profile");
}

TEST_F(ServiceTest, CustomProfileObjectIsAccepted) {
  auto profile = to_json(preset_profile("manual_assist").value());
  profile["name"] = "mine";
  auto const r = handle_route(*graph_, request(*graph_, 0, 7, profile).dump(), kToday);
  ASSERT_EQ(r.status, 200);
  EXPECT_EQ(r.body["profile"]["name"], "mine");
}

TEST_F(ServiceTest, RampFreeCityWithRequiredRampsIs404NamingCurbRamps) {
  auto const& g = *bare_;
  // A route that must cross a street: opposite corners of the city.
  auto const r = handle_route(
      g, request(g, near(g, -140, -140), near(g, 140, 140), "powered_wheelchair").dump(), kToday);
  ASSERT_EQ(r.status, 404) << r.text();
  EXPECT_EQ(r.body["error"], "no_route");
  EXPECT_EQ(r.body["binding_constraints"], nlohmann::json::array({"curb_ramps"}));
}

TEST_F(ServiceTest, NetworkBoundingBoxes) {
  auto const all = handle_network(*graph_, std::nullopt);
  ASSERT_EQ(all.status, 200);
  EXPECT_EQ(all.body["features"].size(), graph_->edges().size());
  auto const whole = handle_network(*graph_, "-123,47,-122,48");
  EXPECT_EQ(whole.body["features"].size(), graph_->edges().size());

  auto const p = graph_->projection().unproject(graph_->node(0).location);
  auto const exact = [&] {
    std::ostringstream s;
    s.precision(17);
    s << p.lon << "," << p.lat << "," << p.lon << "," << p.lat;
    return s.str();
  }();
  auto const degenerate = handle_network(*graph_, exact);
  ASSERT_EQ(degenerate.status, 200);
  EXPECT_EQ(degenerate.body["features"].size(), graph_->adjacent(0).size());
  auto const empty = handle_network(*graph_, "10,10,10,10");
  EXPECT_TRUE(empty.body["features"].empty());

  EXPECT_EQ(handle_network(*graph_, "-122,48,-123,47").status, 400);
  EXPECT_EQ(handle_network(*graph_, "a,b,c,d").status, 400);
  EXPECT_EQ(handle_network(*graph_, "1,2,3").status, 400);
}

TEST_F(ServiceTest, ProfilesAndHealth) {
  auto const profiles = handle_profiles();
  ASSERT_EQ(profiles.status, 200);
  ASSERT_EQ(profiles.body.size(), 3u);
  for (auto const& p : profiles.body) EXPECT_NO_THROW(profile_from_json(p));
  auto const health = handle_health(*graph_);
  EXPECT_EQ(health.body["status"], "ok");
  EXPECT_EQ(health.body["nodes"], graph_->nodes().size());
  EXPECT_EQ(health.body["edges"], graph_->edges().size());
}

TEST_F(ServiceTest, HttpServerServesConcurrentRequests) {
  RouteServer server{graph_};
  auto const port = server.bind("127.0.0.1", 0);
  ASSERT_GT(port, 0);
  std::thread runner{[&] { server.listen(); }};

  httplib::Client client{"127.0.0.1", port};
  for (int i = 0; i < 100; ++i) {
    if (client.Get("/health")) break;
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  auto const health = client.Get("/health");
  ASSERT_TRUE(health);
  EXPECT_EQ(health->status, 200);
  EXPECT_EQ(health->get_header_value("Access-Control-Allow-Origin"), "*");

  auto const options = client.Options("/route");
  ASSERT_TRUE(options);
  EXPECT_EQ(options->status, 204);

  auto const body = request(*graph_, near(*graph_, -140, -140), near(*graph_, 140, 140)).dump();
  auto const expected = handle_route(*graph_, body, kToday).text();
  std::atomic<int> ok{0};
  std::vector<std::thread> workers;
  for (int t = 0; t < 8; ++t) {
    workers.emplace_back([&] {
      httplib::Client c{"127.0.0.1", port};
      for (int k = 0; k < 5; ++k) {
        auto const res = c.Post("/route", body, "application/json");
        if (res && res->status == 200 && res->body == expected) ++ok;
      }
    });
  }
  for (auto& w : workers) w.join();
  EXPECT_EQ(ok.load(), 40);

  auto const bad = client.Get("/network?bbox=5,5,1,1");
  ASSERT_TRUE(bad);
  EXPECT_EQ(bad->status, 400);
  auto const profiles = client.Get("/profiles");
  ASSERT_TRUE(profiles);
  EXPECT_EQ(nlohmann::json::parse(profiles->body).size(), 3u);

  server.stop();
  runner.join();
}
