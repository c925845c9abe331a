#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>

#include <pthread.h>

#include "CLI11.hpp"

#include "sidewalk/config.hpp"
#include "sidewalk/graph_io.hpp"
#include "sidewalk/pipeline.hpp"
#include "sidewalk/service.hpp"
#include "sidewalk/synth.hpp"

namespace fs = std::filesystem;
using namespace sidewalk;

namespace {

GeoPoint parse_lonlat(std::string const& text, char const* flag) {
  std::stringstream ss{text};
  double lon = 0.0;
  double lat = 0.0;
  char comma = 0;
  if (!(ss >> lon >> comma >> lat) || comma != ',' || !(ss >> std::ws).eof()) {
    throw ParameterError(std::string{flag} + " expects lon,lat, got '" + text + "'");
  }
  return {lon, lat};
}

ElevationModel parse_elevation(std::string const& text) {
  ElevationModel m;
  std::vector<std::string> parts;
  std::stringstream ss{text};
  for (std::string tok; std::getline(ss, tok, ':');) parts.push_back(tok);
  if (parts.empty() || parts[0] == "flat") return m;
  if (parts[0] == "plane" && parts.size() == 2) {
    m.kind = ElevationKind::plane;
    m.slope = std::stod(parts[1]);
    return m;
  }
  if (parts[0] == "hill" && parts.size() == 3) {
    m.kind = ElevationKind::hill;
    m.amplitude = std::stod(parts[1]);
    m.wavelength = std::stod(parts[2]);
    return m;
  }
  throw ParameterError("--elevation expects flat, plane:SLOPE or hill:AMPLITUDE:WAVELENGTH");
}

int run_build(DatasetPaths const& paths, std::optional<fs::path> const& config_path,
              fs::path const& out, std::optional<fs::path> repairs_path) {
  auto const config = config_path ? load_config(*config_path) : Config{};
  auto const data = load_datasets(paths, config);
  auto const result = build_network(data, config);
  for (auto const& id : result.orphan_curb_ramps) {
    std::cerr << "warning: curb ramp " << id << " is far from every sidewalk endpoint\n";
  }
  auto const coverage = to_json(result.coverage);
  save_graph(out, result.graph, coverage);
  if (!repairs_path) {
    repairs_path = fs::path{out}.replace_extension(".repairs.geojson");
  }
  write_json_file(*repairs_path, repairs_to_geojson(result.repairs, result.graph.projection()));
  std::cout << coverage.dump(2) << "\n";
  return 0;
}

int run_route(fs::path const& graph_path, std::string const& from, std::string const& to,
              std::string const& profile, std::optional<std::string> const& date) {
  auto const stored = load_graph(graph_path);
  auto const a = parse_lonlat(from, "--from");
  auto const b = parse_lonlat(to, "--to");
  nlohmann::json request = {{"origin", {a.lon, a.lat}}, {"destination", {b.lon, b.lat}}};
  if (preset_profile(profile)) {
    request["profile"] = profile;
  } else if (fs::exists(profile)) {
    request["profile"] = read_json_file(profile);
  } else {
    request["profile"] = profile;  // reported as an unknown preset
  }
  if (date) request["query_date"] = *date;

  auto const result = handle_route(stored.graph, request.dump(), today_utc());
  std::cout << result.text();
  switch (result.status) {
    case 200: return 0;
    case 422: std::cerr << "error: waypoint cannot be snapped to the network\n"; return 2;
    case 404: std::cerr << "error: no route satisfies the profile\n"; return 3;
    default: std::cerr << "error: invalid route request\n"; return 1;
  }
}

int run_serve(fs::path const& graph_path, std::string const& host, int port) {
  // Signals are consumed by a dedicated thread so the server can stop cleanly.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  auto stored = load_graph(graph_path);
  auto graph = std::make_shared<RoutingGraph const>(std::move(stored.graph));
  RouteServer server{graph};
  auto const bound = server.bind(host, port);
  std::cout << "listening on http://" << host << ":" << bound << std::endl;

  std::thread waiter{[&] {
    int sig = 0;
    sigwait(&signals, &sig);
    server.stop();
  }};
  server.listen();
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  return 0;
}

int run_report(fs::path const& graph_path) {
  auto const stored = load_graph(graph_path);
  nlohmann::json out = stored.coverage.is_null() ? nlohmann::json::object() : stored.coverage;
  out["graph"] = {{"nodes", stored.graph.nodes().size()},
                  {"edges", stored.graph.edges().size()},
                  {"components", stored.graph.component_count()}};
  std::cout << out.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Accessible sidewalk network builder and router"};
  app.require_subcommand(1);

  DatasetPaths paths;
  std::string elevation_path;
  std::string permits_path;
  std::string config_path;
  std::string out_path;
  std::string repairs_path;
  auto* build = app.add_subcommand("build", "Build a routing graph from raw datasets");
  build->add_option("--sidewalks", paths.sidewalks, "Sidewalk GeoJSON")->required();
  build->add_option("--streets", paths.streets, "Street centerline GeoJSON")->required();
  build->add_option("--curbramps", paths.curb_ramps, "Curb ramp GeoJSON")->required();
  build->add_option("--elevation", elevation_path, "ESRI ASCII elevation grid");
  build->add_option("--permits", permits_path, "Construction permit GeoJSON");
  build->add_option("--config", config_path, "Pipeline configuration JSON");
  build->add_option("--out", out_path, "Output graph JSON")->required();
  build->add_option("--repairs", repairs_path, "Repair log GeoJSON (default beside --out)");

  std::string graph_path;
  std::string from;
  std::string to;
  std::string profile = "default";
  std::string date;
  auto* route = app.add_subcommand("route", "Print a route as the HTTP API would");
  route->add_option("--graph", graph_path, "Graph JSON")->required();
  route->add_option("--from", from, "Origin lon,lat")->required();
  route->add_option("--to", to, "Destination lon,lat")->required();
  route->add_option("--profile", profile, "Preset name or profile JSON file");
  route->add_option("--date", date, "Query date YYYY-MM-DD (default today)");

  std::string host = "127.0.0.1";
  int port = 8080;
  auto* serve = app.add_subcommand("serve", "Serve the HTTP API");
  serve->add_option("--graph", graph_path, "Graph JSON")->required();
  serve->add_option("--port", port, "Port, 0 for any free port");
  serve->add_option("--host", host, "Bind address");

  auto* report = app.add_subcommand("report", "Print the coverage report of a graph");
  report->add_option("--graph", graph_path, "Graph JSON")->required();

  std::string preset = "grid";
  std::string synth_out;
  CityParams params;
  int blocks = 5;
  std::string elevation = "flat";
  bool evaluate = false;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic city dataset");
  synth->add_option("--preset", preset, "Dataset preset")->check(CLI::IsMember({"grid"}));
  synth->add_option("--out", synth_out, "Output directory")->required();
  synth->add_option("--seed", params.seed, "Random seed");
  synth->add_option("--sigma", params.noise_sigma, "Endpoint noise standard deviation, m");
  synth->add_option("--blocks", blocks, "Blocks per side");
  synth->add_option("--gap-probability", params.gap_probability, "Chance of a widened corner gap");
  synth->add_option("--ramp-probability", params.ramp_probability, "Chance of curb ramps per corner");
  synth->add_option("--elevation", elevation, "flat, plane:SLOPE or hill:AMPLITUDE:WAVELENGTH");
  synth->add_flag("--evaluate", evaluate, "Run the pipeline and print a scorecard");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*build) {
      if (!elevation_path.empty()) paths.elevation = elevation_path;
      if (!permits_path.empty()) paths.permits = permits_path;
      return run_build(paths,
                       config_path.empty() ? std::nullopt : std::optional<fs::path>{config_path},
                       out_path,
                       repairs_path.empty() ? std::nullopt : std::optional<fs::path>{repairs_path});
    }
    if (*route) {
      return run_route(graph_path, from, to, profile,
                       date.empty() ? std::nullopt : std::optional<std::string>{date});
    }
    if (*serve) {
      return run_serve(graph_path, host, port);
    }
    if (*report) {
      return run_report(graph_path);
    }
    if (*synth) {
      params.blocks_x = blocks;
      params.blocks_y = blocks;
      params.elevation = parse_elevation(elevation);
      auto const city = generate_city(params);
      write_city(city, synth_out);
      if (evaluate) {
        Config config;
        config.origin = params.origin;
        std::cout << to_json(evaluate_pipeline(city.data, city.truth, config)).dump(2) << "\n";
      }
      return 0;
    }
  } catch (std::exception const& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
