#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "magnitude/analysis.hpp"
#include "magnitude/error.hpp"
#include "magnitude/shape_spec.hpp"

namespace magnitude {

/// Everything needed to reproduce a sweep. Runs are deterministic, so there
/// is no seed.
struct RunManifest {
  ShapeSpec shape;
  std::vector<double> scales;
  SweepOptions options;
  std::string output_table;  // empty: standard output

  friend bool operator==(const RunManifest& a, const RunManifest& b) {
    return a.shape == b.shape && a.scales == b.scales &&
           a.options.solve.residual_gate == b.options.solve.residual_gate &&
           a.options.solve.refinement_steps == b.options.solve.refinement_steps &&
           a.options.method == b.options.method && a.options.torus == b.options.torus &&
           a.output_table == b.output_table;
  }
};

inline nlohmann::json to_json(const ShapeSpec& s) {
  return {{"kind", std::string(to_string(s.kind))},
          {"resolution", s.resolution},
          {"angular_resolution", s.angular_resolution},
          {"level", s.level},
          {"angle", s.angle},
          {"inner_radius", s.inner_radius},
          {"outer_radius", s.outer_radius},
          {"major_radius", s.major_radius},
          {"minor_radius", s.minor_radius}};
}

inline ShapeSpec shape_from_json(const nlohmann::json& j) {
  ShapeSpec s;
  s.kind = parse_shape_kind(j.at("kind").get<std::string>());
  s.resolution = j.value("resolution", s.resolution);
  s.angular_resolution = j.value("angular_resolution", s.angular_resolution);
  s.level = j.value("level", s.level);
  s.angle = j.value("angle", s.angle);
  s.inner_radius = j.value("inner_radius", s.inner_radius);
  s.outer_radius = j.value("outer_radius", s.outer_radius);
  s.major_radius = j.value("major_radius", s.major_radius);
  s.minor_radius = j.value("minor_radius", s.minor_radius);
  return s;
}

inline nlohmann::json to_json(const RunManifest& m) {
  return {{"shape", to_json(m.shape)},
          {"scales", m.scales},
          {"solver",
           {{"method", std::string(to_string(m.options.method))},
            {"residual_gate", m.options.solve.residual_gate},
            {"refinement_steps", m.options.solve.refinement_steps},
            {"torus_penguin",
             m.options.torus == TorusPenguin::surface_area ? "surface_area" : "printed_caption"}}},
          {"outputs", {{"table", m.output_table}}}};
}

inline RunManifest manifest_from_json(const nlohmann::json& j) {
  try {
    RunManifest m;
    m.shape = shape_from_json(j.at("shape"));
    m.scales = j.at("scales").get<std::vector<double>>();
    if (j.contains("solver")) {
      const auto& s = j.at("solver");
      const auto method = s.value("method", std::string("dense"));
      detail::require(method == "dense" || method == "reduced", "unknown solver method '" + method + "'");
      m.options.method = method == "dense" ? SolveMethod::dense : SolveMethod::reduced;
      m.options.solve.residual_gate = s.value("residual_gate", m.options.solve.residual_gate);
      m.options.solve.refinement_steps = s.value("refinement_steps", m.options.solve.refinement_steps);
      const auto torus = s.value("torus_penguin", std::string("surface_area"));
      detail::require(torus == "surface_area" || torus == "printed_caption",
                      "unknown torus_penguin '" + torus + "'");
      m.options.torus = torus == "surface_area" ? TorusPenguin::surface_area : TorusPenguin::printed_caption;
    }
    if (j.contains("outputs")) m.output_table = j.at("outputs").value("table", std::string());
    validate(m.shape);
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::invalid_argument, std::string("malformed manifest: ") + e.what());
  }
}

inline RunManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open manifest '" + path.string() + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::invalid_argument, std::string("malformed manifest: ") + e.what());
  }
  return manifest_from_json(j);
}

inline void write_manifest(const RunManifest& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io, "cannot open '" + path.string() + "' for writing");
  out << to_json(m).dump(2) << '\n';
}

}  // namespace magnitude
