#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "nlohmann/json.hpp"

#include "sidewalk/config.hpp"
#include "sidewalk/geometry.hpp"
#include "sidewalk/pipeline.hpp"

namespace sidewalk {

enum class ElevationKind { flat, plane, hill };

struct ElevationModel {
  ElevationKind kind = ElevationKind::flat;
  double base = 0.0;
  double slope = 0.0;  // plane: z = base + slope * x
  double amplitude = 0.0;
  double wavelength = 400.0;

  double at(LocalPoint p) const;
};

struct CityParams {
  int blocks_x = 5;
  int blocks_y = 5;
  double block_size = 100.0;
  double sidewalk_offset = 5.0;
  double noise_sigma = 0.0;
  double gap_probability = 0.0;
  double ramp_probability = 1.0;
  ElevationModel elevation;
  std::uint64_t seed = 42;

  GeoPoint origin{-122.3321, 47.6062};
  bool stagger = true;            // odd rows shifted by half a block
  double corner_setback = 2.0;    // sidewalk end to block-corner inset
  double withheld_setback = 8.0;  // setback where a corner gap is injected
  double t_gap = 10.0;            // far-side split at each T
  double cellsize = 10.0;

  void validate() const;
};

struct TruthEndpoint {
  std::string sidewalk;
  int end = 0;

  friend auto operator<=>(TruthEndpoint const&, TruthEndpoint const&) = default;
};

enum class TruthPairKind { corner, t_gap, bend };

struct TruthPair {
  TruthEndpoint a;
  TruthEndpoint b;
  TruthPairKind kind = TruthPairKind::corner;
};

struct TruthCorner {
  std::size_t node = 0;
  std::vector<TruthEndpoint> members;
};

struct TruthCrossing {
  std::size_t node = 0;
  std::string street;
};

struct GroundTruth {
  std::vector<LocalPoint> street_nodes;  // noise-free, local frame
  std::vector<std::size_t> node_degree;
  std::vector<TruthPair> pairs;  // bend pairs sit at degree-2 nodes and are not scored
  std::vector<TruthCorner> corners;
  std::vector<TruthCrossing> crossings;
  std::size_t t_nodes = 0;

  std::size_t intersections() const { return street_nodes.size(); }
};

struct City {
  CityParams params;
  Datasets data;
  GroundTruth truth;
};

City generate_city(CityParams const& params);

nlohmann::json to_json(CityParams const& params);
nlohmann::json to_json(GroundTruth const& truth);

// Writes sidewalks, streets, curbramps, permits (GeoJSON), elevation.asc,
// config.json and truth.json.
void write_city(City const& city, std::filesystem::path const& dir);

struct Scorecard {
  std::size_t truth_pairs = 0;
  std::size_t predicted_pairs = 0;
  std::size_t true_positives = 0;
  std::size_t truth_crossings = 0;
  std::size_t matched_crossings = 0;
  double block_connectivity = 0.0;
  std::size_t component_count = 0;
  CoverageReport coverage;

  double precision() const;
  double recall() const;
  double crossing_coverage() const;
};

Scorecard evaluate_pipeline(Datasets const& data, GroundTruth const& truth,
                            Config const& config);

nlohmann::json to_json(Scorecard const& card);

}  // namespace sidewalk
