// SPDX-License-Identifier: Apache-2.0

#ifndef FANO_CONFIG_HPP
#define FANO_CONFIG_HPP

#include <string>

#include <json.hpp>

#include "fano/geometry.hpp"
#include "fano/scattering.hpp"

namespace fano
{

// Geometry documents:
// {"L": 1.5, "d": 1.0, "obstacles": [{"x0":..,"x1":..,"y0":..,"y1":..}],
//  "perturbation": {"mode": "obstacle_shift"|"wall_bump", "epsilon": 0.0,
//                   "bump": {"wall": "top", "support": [s0, s1], "coeffs": [..]}},
//  "mesh": {"h": 0.01, "order": 2, "grading_levels": 0}}
GeometryDescription parse_geometry_description(const nlohmann::json &doc);
GeometryDescription load_geometry_description(const std::string &path);
nlohmann::json to_json(const GeometryDescription &desc);

// A bare bump document {"wall":..,"support":..,"coeffs":..}, or a full geometry
// document carrying perturbation.bump.
PerturbationProfile parse_profile(const nlohmann::json &doc);
PerturbationProfile load_profile(const std::string &path);
nlohmann::json to_json(const PerturbationProfile &p);

nlohmann::json to_json(const WaveguideGeometry &g);

// Mesh block of the description as solver settings (other fields at defaults).
SolverSettings solver_settings(const GeometryDescription &desc);

// Short stable fingerprint of a geometry (hex FNV-1a over its JSON dump).
std::string geometry_hash(const WaveguideGeometry &g);

}  // namespace fano

#endif  // FANO_CONFIG_HPP
