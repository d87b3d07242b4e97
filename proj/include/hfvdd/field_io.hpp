// Snapshot serialisation.  Cell fields go to legacy VTK (polygon cells,
// CELL_DATA scalars) or to CSV "cell, x, y, <name>..." with centroid
// coordinates; face values go to a companion CSV "face, x, y, tag, <name>..."
// since VTK has no face slot.  All numbers print as %.17g, so CSV round
// trips are bit exact.
#pragma once

#include <hfvdd/mesh.hpp>

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace hfvdd {

using NamedFields = std::vector<std::pair<std::string, Vector>>;

void write_fields_vtk(const Mesh& mesh, const NamedFields& cell_fields,
                      const std::string& path,
                      const std::string& title = "fields");

void write_cell_fields_csv(const Mesh& mesh, const NamedFields& cell_fields,
                           std::ostream& out);
void write_cell_fields_csv(const Mesh& mesh, const NamedFields& cell_fields,
                           const std::string& path);

// Reads back what write_cell_fields_csv wrote: the x, y columns and every
// named field, in file order.
NamedFields read_cell_fields_csv(std::istream& in,
                                 const std::string& origin = "<stream>");
NamedFields read_cell_fields_csv(const std::string& path);

void write_face_fields_csv(const Mesh& mesh, const NamedFields& face_fields,
                           std::ostream& out);
void write_face_fields_csv(const Mesh& mesh, const NamedFields& face_fields,
                           const std::string& path);

}  // namespace hfvdd
