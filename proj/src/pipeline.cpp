#include "sidewalk/pipeline.hpp"

namespace sidewalk {

Datasets load_datasets(DatasetPaths const& paths, Config const& config) {
  auto const streets_doc = read_json_file(paths.streets);
  auto const origin = config.origin ? *config.origin : bbox_center(streets_doc);
  Projection const projection{origin};

  Datasets d{load_features(paths.sidewalks, GeometryKind::polyline, projection),
             parse_features(streets_doc, GeometryKind::polyline, projection,
                            paths.streets.string()),
             load_features(paths.curb_ramps, GeometryKind::point, projection),
             std::nullopt, std::nullopt};
  if (paths.elevation) {
    d.elevation = load_elevation_grid(*paths.elevation);
  }
  if (paths.permits) {
    d.permits = load_permits(*paths.permits, projection);
  }
  return d;
}

BuildResult build_network(Datasets const& data, Config const& config) {
  auto nodes = build_street_topology(data.streets, config.snap_tol);
  auto t_nodes = detect_t_intersections(nodes, config.t_angle_min);
  auto t = repair_t_gaps(data.sidewalks, t_nodes, config.t_max_gap, config.t_angle_min);

  auto sectors = classify_corner_endpoints(t.sidewalks, nodes, config.corner_radius,
                                           static_cast<std::size_t>(config.min_intersection_degree));
  auto blocks = extract_blocks(data.streets, nodes, data.sidewalks);
  auto corners = connect_block_corners(t.sidewalks, sectors, config.corner_max_connect,
                                       t.actions, blocks, config.merge_tol);

  auto crossings = generate_crossings(corners.sidewalks, sectors, data.streets,
                                      config.max_cross);
  {
    std::vector<EdgeDraft> drafts;
    for (auto const& c : crossings) drafts.push_back(c.edge);
    drafts = annotate_curb_ramps(std::move(drafts), data.curb_ramps, config.ramp_radius);
    if (data.permits) {
      drafts = annotate_construction(std::move(drafts), *data.permits,
                                     config.construction_buffer);
    }
    for (std::size_t i = 0; i < crossings.size(); ++i) {
      crossings[i].edge = std::move(drafts[i]);
    }
  }
  auto walk_edges = sidewalk_drafts(corners.sidewalks);
  if (data.permits) {
    walk_edges = annotate_construction(std::move(walk_edges), *data.permits,
                                       config.construction_buffer);
  }
  auto graph = assemble_graph(data.sidewalks.projection, std::move(walk_edges), crossings,
                              config.merge_tol);
  if (data.elevation) {
    graph = annotate_elevation(std::move(graph), *data.elevation);
  }

  auto coverage = coverage_report(graph, sectors, crossings, t, corners.metrics);

  std::vector<RepairAction> repairs = t.actions;
  repairs.insert(repairs.end(), corners.actions.begin(), corners.actions.end());

  return {std::move(graph),
          coverage,
          std::move(nodes),
          std::move(t_nodes),
          std::move(sectors),
          std::move(blocks),
          std::move(repairs),
          std::move(crossings),
          std::move(corners.sidewalks),
          orphan_curb_ramps(data.curb_ramps, data.sidewalks, config.orphan_ramp_distance)};
}

}  // namespace sidewalk
