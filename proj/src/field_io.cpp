#include <hfvdd/field_io.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace hfvdd {

namespace {

std::string fmt(Real v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void check_fields(const NamedFields& fields, Index expected,
                  const char* what) {
  for (const auto& [name, values] : fields) {
    if (name.empty() || name.find_first_of(", \t\r\n") != std::string::npos)
      throw InvalidInput(std::string(what) + ": bad field name '" + name +
                         "'");
    if (values.size() != expected)
      throw InvalidInput(std::string(what) + ": field '" + name + "' has " +
                         std::to_string(values.size()) + " values, expected " +
                         std::to_string(expected));
  }
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

}  // namespace

void write_fields_vtk(const Mesh& mesh, const NamedFields& cell_fields,
                      const std::string& path, const std::string& title) {
  check_fields(cell_fields, mesh.n_cells(), "vtk");
  std::ofstream out = open_out(path);
  out << "# vtk DataFile Version 2.0\n";
  out << title << "\n";
  out << "ASCII\n";
  out << "DATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.vertex.size() << " double\n";
  for (const Vec2& v : mesh.vertex)
    out << fmt(v.x()) << " " << fmt(v.y()) << " 0\n";
  std::size_t list_size = 0;
  for (int K = 0; K < mesh.n_cells(); ++K)
    list_size += 1 + mesh.loop_of(K).size();
  out << "CELLS " << mesh.n_cells() << " " << list_size << "\n";
  for (int K = 0; K < mesh.n_cells(); ++K) {
    const auto loop = mesh.loop_of(K);
    out << loop.size();
    for (int v : loop) out << " " << v;
    out << "\n";
  }
  out << "CELL_TYPES " << mesh.n_cells() << "\n";
  for (int K = 0; K < mesh.n_cells(); ++K) out << "7\n";  // VTK_POLYGON
  if (!cell_fields.empty()) {
    out << "CELL_DATA " << mesh.n_cells() << "\n";
    for (const auto& [name, values] : cell_fields) {
      out << "SCALARS " << name << " double 1\n";
      out << "LOOKUP_TABLE default\n";
      for (Index K = 0; K < values.size(); ++K) out << fmt(values[K]) << "\n";
    }
  }
  if (!out) throw IoError("write failed on '" + path + "'");
}

void write_cell_fields_csv(const Mesh& mesh, const NamedFields& cell_fields,
                           std::ostream& out) {
  check_fields(cell_fields, mesh.n_cells(), "cell csv");
  out << "cell, x, y";
  for (const auto& [name, values] : cell_fields) out << ", " << name;
  out << "\n";
  for (int K = 0; K < mesh.n_cells(); ++K) {
    out << K << ", " << fmt(mesh.cell[K].center.x()) << ", "
        << fmt(mesh.cell[K].center.y());
    for (const auto& [name, values] : cell_fields)
      out << ", " << fmt(values[K]);
    out << "\n";
  }
}

void write_cell_fields_csv(const Mesh& mesh, const NamedFields& cell_fields,
                           const std::string& path) {
  std::ofstream out = open_out(path);
  write_cell_fields_csv(mesh, cell_fields, out);
  if (!out) throw IoError("write failed on '" + path + "'");
}

NamedFields read_cell_fields_csv(std::istream& in, const std::string& origin) {
  std::string line;
  if (!std::getline(in, line))
    throw InvalidInput(origin + ": empty cell field file");
  std::vector<std::string> names;
  {
    std::istringstream head(line);
    std::string item;
    while (std::getline(head, item, ',')) {
      const auto a = item.find_first_not_of(" \t\r");
      const auto b = item.find_last_not_of(" \t\r");
      names.push_back(a == std::string::npos
                          ? ""
                          : item.substr(a, b - a + 1));
    }
  }
  if (names.size() < 3 || names[0] != "cell" || names[1] != "x" ||
      names[2] != "y")
    throw InvalidInput(origin + ": expected header 'cell, x, y, ...'");
  std::vector<std::vector<Real>> columns(names.size() - 1);
  int row = 0;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream cells(line);
    std::string item;
    std::size_t col = 0;
    while (std::getline(cells, item, ',')) {
      std::size_t used = 0;
      Real v = 0;
      try {
        v = std::stod(item, &used);
      } catch (const std::exception&) {
        throw InvalidInput(origin + ":" + std::to_string(lineno) +
                           ": not a number: '" + item + "'");
      }
      while (used < item.size() &&
             (item[used] == ' ' || item[used] == '\t' || item[used] == '\r'))
        ++used;
      if (used != item.size())
        throw InvalidInput(origin + ":" + std::to_string(lineno) +
                           ": trailing characters in '" + item + "'");
      if (col == 0) {
        if (v != static_cast<Real>(row))
          throw InvalidInput(origin + ":" + std::to_string(lineno) +
                             ": cell indices must be consecutive from 0");
      } else if (col <= columns.size()) {
        columns[col - 1].push_back(v);
      }
      ++col;
    }
    if (col != names.size())
      throw InvalidInput(origin + ":" + std::to_string(lineno) + ": expected " +
                         std::to_string(names.size()) + " columns, got " +
                         std::to_string(col));
    ++row;
  }
  NamedFields out;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    Vector v(static_cast<Index>(columns[c].size()));
    for (std::size_t i = 0; i < columns[c].size(); ++i)
      v[static_cast<Index>(i)] = columns[c][i];
    out.emplace_back(names[c + 1], std::move(v));
  }
  return out;
}

NamedFields read_cell_fields_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  return read_cell_fields_csv(in, path);
}

void write_face_fields_csv(const Mesh& mesh, const NamedFields& face_fields,
                           std::ostream& out) {
  check_fields(face_fields, mesh.n_faces(), "face csv");
  out << "face, x, y, tag";
  for (const auto& [name, values] : face_fields) out << ", " << name;
  out << "\n";
  for (int s = 0; s < mesh.n_faces(); ++s) {
    const Face& f = mesh.face[s];
    out << s << ", " << fmt(f.center.x()) << ", " << fmt(f.center.y()) << ", "
        << tag_name(f.tag);
    for (const auto& [name, values] : face_fields)
      out << ", " << fmt(values[s]);
    out << "\n";
  }
}

void write_face_fields_csv(const Mesh& mesh, const NamedFields& face_fields,
                           const std::string& path) {
  std::ofstream out = open_out(path);
  write_face_fields_csv(mesh, face_fields, out);
  if (!out) throw IoError("write failed on '" + path + "'");
}

}  // namespace hfvdd
