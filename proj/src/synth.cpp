#include "sidewalk/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <set>

#include "sidewalk/error.hpp"

namespace sidewalk {

namespace {

using Key = std::pair<double, double>;

std::string_view to_string(TruthPairKind k) {
  switch (k) {
    case TruthPairKind::corner: return "corner";
    case TruthPairKind::t_gap: return "t_gap";
    case TruthPairKind::bend: return "bend";
  }
  return "corner";
}

std::string_view to_string(ElevationKind k) {
  switch (k) {
    case ElevationKind::flat: return "flat";
    case ElevationKind::plane: return "plane";
    case ElevationKind::hill: return "hill";
  }
  return "flat";
}

void check_probability(double p, char const* name) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ParameterError(std::string{name} + " must lie in [0, 1]");
  }
}

struct Piece {
  LocalPoint a;
  LocalPoint b;
};

class CityBuilder {
 public:
  explicit CityBuilder(CityParams const& p)
      : p_(p),
        width_(p.blocks_x * p.block_size),
        height_(p.blocks_y * p.block_size),
        center_{width_ / 2.0, height_ / 2.0},
        rng_(p.seed) {}

  City build() {
    build_streets();
    build_sidewalks();
    apply_noise();
    build_truth_crossings();
    place_ramps();

    Projection const proj{p_.origin};
    City city;
    city.params = p_;
    city.data.sidewalks = FeatureSet{GeometryKind::polyline, proj, std::move(sidewalks_)};
    city.data.streets = FeatureSet{GeometryKind::polyline, proj, std::move(streets_)};
    city.data.curb_ramps = FeatureSet{GeometryKind::point, proj, std::move(ramps_)};
    city.data.elevation = elevation_grid();
    city.data.permits = permits(proj, city.data.sidewalks);
    for (auto const& n : nodes_) {
      truth_.street_nodes.push_back(local(n));
    }
    for (auto const& inc : incidences_) {
      truth_.node_degree.push_back(inc.size());
      if (inc.size() == 3) ++truth_.t_nodes;
    }
    city.truth = std::move(truth_);
    return city;
  }

 private:
  std::vector<double> verticals(int row) const {
    std::vector<double> xs;
    auto const b = p_.block_size;
    if (p_.stagger && row % 2 == 1) {
      xs.push_back(0.0);
      for (int i = 0; i < p_.blocks_x; ++i) xs.push_back(b / 2.0 + i * b);
      xs.push_back(width_);
    } else {
      for (int i = 0; i <= p_.blocks_x; ++i) xs.push_back(i * b);
    }
    return xs;
  }

  std::vector<double> line_nodes(int line) const {
    std::set<double> xs;
    if (line > 0) {
      auto const v = verticals(line - 1);
      xs.insert(v.begin(), v.end());
    }
    if (line < p_.blocks_y) {
      auto const v = verticals(line);
      xs.insert(v.begin(), v.end());
    }
    return {xs.begin(), xs.end()};
  }

  LocalPoint local(LocalPoint city) const { return city - center_; }

  std::size_t node(LocalPoint c) {
    auto const [it, inserted] = node_ids_.try_emplace(Key{c.x, c.y}, nodes_.size());
    if (inserted) {
      nodes_.push_back(c);
      incidences_.emplace_back();
    }
    return it->second;
  }

  void add_street(LocalPoint a, LocalPoint b) {
    auto const id = "st" + std::to_string(streets_.size());
    streets_.push_back({id, Polyline{local(a), local(b)}, {}});
    incidences_[node(a)].push_back({id, bearing(a, b)});
    incidences_[node(b)].push_back({id, bearing(b, a)});
  }

  void build_streets() {
    auto const b = p_.block_size;
    for (int j = 0; j <= p_.blocks_y; ++j) {
      auto const xs = line_nodes(j);
      for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        add_street({xs[i], j * b}, {xs[i + 1], j * b});
      }
    }
    for (int r = 0; r < p_.blocks_y; ++r) {
      for (auto const x : verticals(r)) {
        add_street({x, r * b}, {x, (r + 1) * b});
      }
    }
  }

  TruthEndpoint add_piece(Piece const& piece, std::vector<TruthEndpoint>& ends) {
    auto const id = "sw" + std::to_string(sidewalks_.size());
    sidewalks_.push_back({id, Polyline{local(piece.a), local(piece.b)}, {}});
    clean_[{id, 0}] = piece.a;
    clean_[{id, 1}] = piece.b;
    ends.push_back({id, 0});
    ends.push_back({id, 1});
    return {id, 0};
  }

  void add_pair(TruthEndpoint a, TruthEndpoint b, LocalPoint at, bool t_gap) {
    auto const n = node(at);
    auto const degree = incidences_[n].size();
    auto const kind = degree < 3 ? TruthPairKind::bend
                      : t_gap   ? TruthPairKind::t_gap
                                : TruthPairKind::corner;
    truth_.pairs.push_back({a, b, kind});
    if (kind != TruthPairKind::bend) {
      truth_.corners.push_back({n, {a, b}});
    }
  }

  // Pieces along one block side running from `from` to `to`, broken around
  // every street node strictly between them.
  std::vector<TruthEndpoint> side(LocalPoint from, LocalPoint to, std::vector<double> const& split_x,
                                  double node_y) {
    std::vector<TruthEndpoint> ends;
    auto const dir = to.x > from.x ? 1.0 : -1.0;
    auto xs = split_x;
    if (dir < 0) std::reverse(xs.begin(), xs.end());
    auto start = from;
    for (auto const xm : xs) {
      add_piece({start, {xm - dir * p_.t_gap / 2.0, from.y}}, ends);
      start = {xm + dir * p_.t_gap / 2.0, from.y};
    }
    add_piece({start, to}, ends);
    for (std::size_t k = 0; k < xs.size(); ++k) {
      add_pair(ends[2 * k + 1], ends[2 * k + 2], {xs[k], node_y}, true);
    }
    return ends;
  }

  void build_sidewalks() {
    auto const b = p_.block_size;
    auto const o = p_.sidewalk_offset;
    std::uniform_real_distribution<double> unit{0.0, 1.0};
    for (int r = 0; r < p_.blocks_y; ++r) {
      auto const xs = verticals(r);
      auto const y0 = r * b;
      auto const y1 = (r + 1) * b;
      auto const below = line_nodes(r);
      auto const above = line_nodes(r + 1);
      for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        auto const x0 = xs[i];
        auto const x1 = xs[i + 1];
        double sb[4];
        for (auto& s : sb) {
          s = unit(rng_) < p_.gap_probability ? p_.withheld_setback : p_.corner_setback;
        }
        auto const inside = [&](std::vector<double> const& line) {
          std::vector<double> out;
          for (auto const x : line) {
            if (x > x0 && x < x1) out.push_back(x);
          }
          return out;
        };
        LocalPoint const corners[4] = {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
        std::vector<TruthEndpoint> sides[4];
        sides[0] = side({x0 + o + sb[0], y0 + o}, {x1 - o - sb[1], y0 + o}, inside(below), y0);
        add_piece({{x1 - o, y0 + o + sb[1]}, {x1 - o, y1 - o - sb[2]}}, sides[1]);
        sides[2] = side({x1 - o - sb[2], y1 - o}, {x0 + o + sb[3], y1 - o}, inside(above), y1);
        add_piece({{x0 + o, y1 - o - sb[3]}, {x0 + o, y0 + o + sb[0]}}, sides[3]);
        for (int k = 0; k < 4; ++k) {
          auto const& prev = sides[(k + 3) % 4];
          add_pair(prev.back(), sides[k].front(), corners[k], false);
        }
      }
    }
  }

  void apply_noise() {
    if (p_.noise_sigma <= 0.0) {
      return;
    }
    std::normal_distribution<double> noise{0.0, p_.noise_sigma};
    for (auto& f : sidewalks_) {
      auto const span = f.line().points();
      std::vector<LocalPoint> pts(span.begin(), span.end());
      for (auto* q : {&pts.front(), &pts.back()}) {
        auto const dx = noise(rng_);
        auto const dy = noise(rng_);
        *q = *q + LocalPoint{dx, dy};
      }
      f.geometry = Polyline{std::move(pts)};
    }
  }

  LocalPoint noisy(TruthEndpoint const& e) const {
    auto const idx = std::stoul(e.sidewalk.substr(2));
    auto const& line = sidewalks_[idx].line();
    return e.end == 0 ? line.front() : line.back();
  }

  void build_truth_crossings() {
    std::map<std::size_t, std::vector<LocalPoint>> groups;
    for (auto const& c : truth_.corners) {
      auto mid = LocalPoint{0, 0};
      for (auto const& m : c.members) mid = mid + clean_.at(m) * (1.0 / c.members.size());
      groups[c.node].push_back(mid);
    }
    for (auto const& [n, mids] : groups) {
      auto inc = incidences_[n];
      std::sort(inc.begin(), inc.end(),
                [](auto const& a, auto const& b) { return a.bearing < b.bearing; });
      auto const k = inc.size();
      std::vector<bool> occupied(k, false);
      for (auto const& m : mids) {
        auto const br = bearing(nodes_[n], m);
        std::size_t sector = k - 1;
        for (std::size_t i = 0; i + 1 < k; ++i) {
          if (br >= inc[i].bearing && br < inc[i + 1].bearing) sector = i;
        }
        occupied[sector] = true;
      }
      for (std::size_t i = 0; i < k; ++i) {
        if (occupied[(i + k - 1) % k] && occupied[i]) {
          truth_.crossings.push_back({n, inc[i].street});
        }
      }
    }
  }

  void place_ramps() {
    std::uniform_real_distribution<double> unit{0.0, 1.0};
    for (auto const& c : truth_.corners) {
      if (!(unit(rng_) < p_.ramp_probability)) continue;
      for (auto const& m : c.members) {
        ramps_.push_back({"cr" + std::to_string(ramps_.size()), noisy(m), {}});
      }
    }
  }

  ElevationGrid elevation_grid() const {
    ElevationGrid g;
    g.cellsize = p_.cellsize;
    auto const margin = 3.0 * p_.cellsize;
    g.lower_left = LocalPoint{-width_ / 2.0 - margin, -height_ / 2.0 - margin};
    g.ncols = static_cast<int>(std::ceil((width_ + 2 * margin) / g.cellsize));
    g.nrows = static_cast<int>(std::ceil((height_ + 2 * margin) / g.cellsize));
    for (int r = 0; r < g.nrows; ++r) {
      for (int c = 0; c < g.ncols; ++c) {
        g.values.push_back(p_.elevation.at(g.cell_center(r, c)));
      }
    }
    return g;
  }

  static PermitSet permits(Projection const& proj, SidewalkSet const& sidewalks) {
    PermitSet set{proj, {}};
    if (sidewalks.features.empty()) return set;
    auto const& line = sidewalks.features.front().line();
    auto const at = point_along(line, polyline_length(line) / 2.0);
    using namespace std::chrono;
    set.permits.push_back({Feature{"permit0", at, {}},
                           {year{2024} / June / 1, year{2024} / June / 30},
                           true});
    return set;
  }

  struct Inc {
    std::string street;
    double bearing = 0.0;
  };

  CityParams p_;
  double width_;
  double height_;
  LocalPoint center_;
  std::mt19937_64 rng_;
  std::map<Key, std::size_t> node_ids_;
  std::vector<LocalPoint> nodes_;  // city frame
  std::vector<std::vector<Inc>> incidences_;
  std::vector<Feature> streets_;
  std::vector<Feature> sidewalks_;
  std::vector<Feature> ramps_;
  std::map<TruthEndpoint, LocalPoint> clean_;
  GroundTruth truth_;
};

nlohmann::json endpoint_json(TruthEndpoint const& e) {
  return {{"sidewalk", e.sidewalk}, {"end", e.end}};
}

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 1.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

double ElevationModel::at(LocalPoint p) const {
  switch (kind) {
    case ElevationKind::flat:
      return base;
    case ElevationKind::plane:
      return base + slope * p.x;
    case ElevationKind::hill: {
      auto const k = 2.0 * std::numbers::pi / wavelength;
      return base + amplitude * std::cos(k * p.x) * std::cos(k * p.y);
    }
  }
  return base;
}

void CityParams::validate() const {
  if (blocks_x <= 0 || blocks_y <= 0) {
    throw ParameterError("city needs at least one block in each direction");
  }
  if (!(block_size > 0.0) || !(sidewalk_offset > 0.0) || !(cellsize > 0.0)) {
    throw ParameterError("block_size, sidewalk_offset and cellsize must be positive");
  }
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
    throw ParameterError("noise_sigma must be a finite value >= 0");
  }
  check_probability(gap_probability, "gap_probability");
  check_probability(ramp_probability, "ramp_probability");
  if (!(corner_setback > 0.0) || !(withheld_setback > 0.0) || !(t_gap > 0.0)) {
    throw ParameterError("setbacks and t_gap must be positive");
  }
  auto const free = block_size / 2.0 -
                    2.0 * (sidewalk_offset + std::max(corner_setback, withheld_setback)) - t_gap;
  if (!(free > 0.0)) {
    throw ParameterError("block_size too small for the offset, setbacks and t_gap");
  }
  if (elevation.kind == ElevationKind::hill && !(elevation.wavelength > 0.0)) {
    throw ParameterError("hill wavelength must be positive");
  }
  validate_wgs84(origin);
}

City generate_city(CityParams const& params) {
  params.validate();
  return CityBuilder{params}.build();
}

nlohmann::json to_json(CityParams const& p) {
  nlohmann::json elev = {{"kind", to_string(p.elevation.kind)}, {"base", p.elevation.base}};
  if (p.elevation.kind == ElevationKind::plane) elev["slope"] = p.elevation.slope;
  if (p.elevation.kind == ElevationKind::hill) {
    elev["amplitude"] = p.elevation.amplitude;
    elev["wavelength"] = p.elevation.wavelength;
  }
  return {{"blocks_x", p.blocks_x},
          {"blocks_y", p.blocks_y},
          {"block_size", p.block_size},
          {"sidewalk_offset", p.sidewalk_offset},
          {"noise_sigma", p.noise_sigma},
          {"gap_probability", p.gap_probability},
          {"ramp_probability", p.ramp_probability},
          {"elevation_model", elev},
          {"seed", p.seed},
          {"origin", {p.origin.lon, p.origin.lat}},
          {"stagger", p.stagger},
          {"corner_setback", p.corner_setback},
          {"withheld_setback", p.withheld_setback},
          {"t_gap", p.t_gap},
          {"cellsize", p.cellsize}};
}

nlohmann::json to_json(GroundTruth const& t) {
  auto nodes = nlohmann::json::array();
  for (std::size_t i = 0; i < t.street_nodes.size(); ++i) {
    nodes.push_back({{"id", i},
                     {"x", t.street_nodes[i].x},
                     {"y", t.street_nodes[i].y},
                     {"degree", t.node_degree[i]}});
  }
  auto pairs = nlohmann::json::array();
  for (auto const& p : t.pairs) {
    pairs.push_back({{"a", endpoint_json(p.a)}, {"b", endpoint_json(p.b)}, {"kind", to_string(p.kind)}});
  }
  auto corners = nlohmann::json::array();
  for (auto const& c : t.corners) {
    auto members = nlohmann::json::array();
    for (auto const& m : c.members) members.push_back(endpoint_json(m));
    corners.push_back({{"node", c.node}, {"members", members}});
  }
  auto crossings = nlohmann::json::array();
  for (auto const& c : t.crossings) {
    crossings.push_back({{"node", c.node}, {"street", c.street}});
  }
  return {{"intersections", t.intersections()},
          {"t_nodes", t.t_nodes},
          {"street_nodes", nodes},
          {"pairs", pairs},
          {"corners", corners},
          {"crossings", crossings}};
}

void write_city(City const& city, std::filesystem::path const& dir) {
  std::filesystem::create_directories(dir);
  write_json_file(dir / "sidewalks.geojson", to_geojson(city.data.sidewalks));
  write_json_file(dir / "streets.geojson", to_geojson(city.data.streets));
  write_json_file(dir / "curbramps.geojson", to_geojson(city.data.curb_ramps));
  if (city.data.permits) {
    write_json_file(dir / "permits.geojson", to_geojson(*city.data.permits));
  }
  if (city.data.elevation) {
    std::ofstream out{dir / "elevation.asc"};
    if (!out) throw Error("cannot write " + (dir / "elevation.asc").string());
    write_elevation_grid(out, *city.data.elevation);
  }
  Config config;
  config.origin = city.params.origin;
  write_json_file(dir / "config.json", to_json(config));
  auto truth = to_json(city.truth);
  truth["params"] = to_json(city.params);
  write_json_file(dir / "truth.json", truth);
}

double Scorecard::precision() const { return ratio(true_positives, predicted_pairs); }
double Scorecard::recall() const { return ratio(true_positives, truth_pairs); }
double Scorecard::crossing_coverage() const {
  return ratio(matched_crossings, truth_crossings);
}

Scorecard evaluate_pipeline(Datasets const& data, GroundTruth const& truth,
                            Config const& config) {
  auto const result = build_network(data, config);

  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < data.sidewalks.features.size(); ++i) {
    index.emplace(data.sidewalks.features[i].id, i);
  }
  auto const ref = [&](TruthEndpoint const& e) {
    auto const it = index.find(e.sidewalk);
    if (it == index.end()) throw SchemaError("truth names unknown sidewalk '" + e.sidewalk + "'");
    return EndpointRef{it->second, e.end};
  };
  auto const ordered = [](EndpointRef a, EndpointRef b) {
    return a < b ? std::pair{a, b} : std::pair{b, a};
  };

  std::set<std::pair<EndpointRef, EndpointRef>> expected;
  for (auto const& p : truth.pairs) {
    if (p.kind != TruthPairKind::bend) expected.insert(ordered(ref(p.a), ref(p.b)));
  }
  std::set<std::pair<EndpointRef, EndpointRef>> predicted;
  for (auto const& r : result.repairs) {
    predicted.insert(ordered(r.first, r.second));
  }

  Scorecard card;
  card.truth_pairs = expected.size();
  card.predicted_pairs = predicted.size();
  card.true_positives = static_cast<std::size_t>(std::count_if(
      predicted.begin(), predicted.end(), [&](auto const& p) { return expected.contains(p); }));

  std::map<std::size_t, LocalPoint> node_at;
  for (auto const& n : result.street_nodes) node_at[n.id] = n.location;
  card.truth_crossings = truth.crossings.size();
  for (auto const& t : truth.crossings) {
    auto const at = truth.street_nodes.at(t.node);
    auto const hit = std::any_of(result.crossings.begin(), result.crossings.end(), [&](Crossing const& c) {
      return c.edge.crossed_street == t.street && distance(node_at.at(c.node_id), at) < 1.0;
    });
    if (hit) ++card.matched_crossings;
  }
  card.block_connectivity = result.coverage.block_connectivity_rate();
  card.component_count = result.graph.component_count();
  card.coverage = result.coverage;
  return card;
}

nlohmann::json to_json(Scorecard const& c) {
  return {{"precision", c.precision()},
          {"recall", c.recall()},
          {"true_positives", c.true_positives},
          {"predicted_pairs", c.predicted_pairs},
          {"truth_pairs", c.truth_pairs},
          {"block_connectivity_rate", c.block_connectivity},
          {"crossing_coverage_rate", c.crossing_coverage()},
          {"matched_crossings", c.matched_crossings},
          {"truth_crossings", c.truth_crossings},
          {"component_count", c.component_count},
          {"coverage", to_json(c.coverage)}};
}

}  // namespace sidewalk
