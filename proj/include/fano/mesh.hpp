// SPDX-License-Identifier: Apache-2.0

#ifndef FANO_MESH_HPP
#define FANO_MESH_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fano/geometry.hpp"
#include "fano/types.hpp"

namespace fano
{

enum class BoundaryTag : std::uint8_t
{
  wall,
  port_left,
  port_right,
  pml_interface
};

enum class Region : std::uint8_t
{
  physical,
  pml_left,
  pml_right
};

struct MeshEdge
{
  int a = -1, b = -1;  // vertex indices, a < b
  int mid = -1;        // midpoint node for P2, -1 for P1
};

struct TaggedEdge
{
  int a = -1, b = -1, mid = -1;
  BoundaryTag tag = BoundaryTag::wall;
  int triangle = -1;  // adjacent triangle (on the physical side for pml_interface)
};

struct MeshOptions
{
  double h = 0.02;
  int order = 2;
  std::optional<double> pml_thickness;
  double pml_max_spacing = 0.1;  // cell widths grow geometrically from h up to this
  double pml_growth = 1.25;
  int grading_levels = 0;  // extra lines at c +- s*f^k next to obstacle edge lines c
  double grading_factor = 0.5;
};

//
// Structured triangulation of the (perturbed) guide. Nodes are ordered vertices
// first, then one midpoint per edge when order == 2. Local node layout per
// triangle: 0,1,2 vertices (counterclockwise), 3,4,5 midpoints of edges
// 01, 12, 20; unused slots are -1 for P1.
//
struct Mesh
{
  int order = 2;
  double h = 0.0;
  double L = 0.0;
  double pml_thickness = 0.0;
  int num_vertices = 0;
  std::vector<Point2> nodes;
  std::vector<std::array<int, 6>> triangles;
  std::vector<Region> regions;
  std::vector<MeshEdge> edges;
  std::vector<TaggedEdge> tagged_edges;
  std::vector<double> xlines, ylines;  // reference grid lines before wall stretching

  int nodes_per_triangle() const { return order == 1 ? 3 : 6; }
  int num_dofs() const { return static_cast<int>(nodes.size()); }
  int num_triangles() const { return static_cast<int>(triangles.size()); }
  bool has_pml() const { return pml_thickness > 0.0; }
  double triangle_area(int t) const;
};

Mesh generate_mesh(const WaveguideGeometry &g, const MeshOptions &opts);

struct MeshReport
{
  bool conforming = true;
  bool positive = true;
  bool ports_complete = true;
  double area = 0.0;
  double min_area = 0.0;
  std::string message;

  bool ok() const { return conforming && positive && ports_complete; }
};

MeshReport check_mesh(const Mesh &mesh);

// Throws InvalidMesh if check_mesh fails.
void validate_mesh(const Mesh &mesh);

// Sorted node indices (vertices and midpoints) lying on edges with the tag.
std::vector<int> tagged_nodes(const Mesh &mesh, BoundaryTag tag);

}  // namespace fano

#endif  // FANO_MESH_HPP
