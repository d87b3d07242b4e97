// Plain-text mesh exchange format:
//
//   # comment
//   polymesh 2d
//   vertices
//   <index> <x> <y>
//   faces
//   <index>: <v0> <v1> [d0|d1|neumann]
//   cells
//   <index>: <f0> <f1> ... [@ <cx> <cy>]
//
// Indices are file order and must be consecutive from 0.  Untagged boundary
// faces default to neumann; tags on interior faces are rejected.  The
// optional trailing "@ cx cy" fixes the cell center (default: centroid).
#pragma once

#include <hfvdd/mesh.hpp>

#include <iosfwd>
#include <string>

namespace hfvdd {

Mesh load_mesh(const std::string& path);
Mesh read_mesh(std::istream& in, const std::string& origin = "<stream>");

void save_mesh(const Mesh& mesh, const std::string& path);
void write_mesh(const Mesh& mesh, std::ostream& out);

// Builder shorthands: "cart:NXxNY" | "tri:LEVEL" | "hex:NXxNY[:TILT]".
Mesh build_from_spec(const std::string& spec);

// Accepts either "builder:<spec>" or a file path.
Mesh load_mesh_source(const std::string& source);

}  // namespace hfvdd
