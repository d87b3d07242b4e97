#include <hfvdd/mesh_io.hpp>

#include <array>
#include <fstream>
#include <sstream>

namespace hfvdd {
namespace {

struct LineReader {
  std::istream& in;
  std::string origin;
  int number = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw InvalidInput(origin + ":" + std::to_string(number) + ": " + msg);
  }

  // Next non-empty line with comments stripped; false at EOF.
  bool next(std::string& out) {
    std::string line;
    while (std::getline(in, line)) {
      ++number;
      auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      std::istringstream probe(line);
      std::string word;
      if (probe >> word) {
        out = line;
        return true;
      }
    }
    return false;
  }
};

FaceTag parse_tag(const std::string& word, LineReader& r) {
  if (word == "d0") return FaceTag::Dirichlet0;
  if (word == "d1") return FaceTag::Dirichlet1;
  if (word == "neumann") return FaceTag::Neumann;
  r.fail("unknown boundary tag '" + word + "' (expected d0 | d1 | neumann)");
}

// "<idx>:" prefix whose index must equal `expected`.
void check_index(std::istringstream& ls, int expected, LineReader& r,
                 bool colon) {
  std::string tok;
  if (!(ls >> tok)) r.fail("missing index");
  if (colon) {
    if (tok.size() < 2 || tok.back() != ':')
      r.fail("expected '<index>:', got '" + tok + "'");
    tok.pop_back();
  }
  try {
    if (std::stoi(tok) != expected)
      r.fail("indices must be consecutive file order; expected " +
             std::to_string(expected) + ", got " + tok);
  } catch (const InvalidInput&) {
    throw;
  } catch (const std::exception&) {
    r.fail("cannot parse index '" + tok + "'");
  }
}

}  // namespace

Mesh read_mesh(std::istream& in, const std::string& origin) {
  LineReader reader{in, origin};
  std::string line;
  if (!reader.next(line)) reader.fail("empty mesh file");
  {
    std::istringstream ls(line);
    std::string a, b;
    ls >> a >> b;
    if (a != "polymesh" || b != "2d")
      reader.fail("expected header 'polymesh 2d'");
  }

  std::vector<Vec2> vertices;
  std::vector<std::array<int, 2>> face_vertices;
  std::vector<FaceTag> face_tags;
  std::vector<std::vector<int>> cell_faces;
  std::vector<std::pair<bool, Vec2>> centers;

  enum Section { None, Vertices, Faces, Cells } section = None;
  while (reader.next(line)) {
    std::istringstream ls(line);
    std::string first;
    ls >> first;
    if (first == "vertices") {
      section = Vertices;
      continue;
    }
    if (first == "faces") {
      section = Faces;
      continue;
    }
    if (first == "cells") {
      section = Cells;
      continue;
    }
    ls.clear();
    ls.seekg(0);
    switch (section) {
      case None:
        reader.fail("content before the first section");
      case Vertices: {
        check_index(ls, static_cast<int>(vertices.size()), reader, false);
        Real x, y;
        if (!(ls >> x >> y)) reader.fail("vertex needs two coordinates");
        std::string extra;
        if (ls >> extra) reader.fail("trailing characters '" + extra + "'");
        vertices.emplace_back(x, y);
        break;
      }
      case Faces: {
        check_index(ls, static_cast<int>(face_vertices.size()), reader, true);
        int v0, v1;
        if (!(ls >> v0 >> v1)) reader.fail("face needs two vertex indices");
        FaceTag tag = FaceTag::Interior;
        std::string word;
        if (ls >> word) {
          tag = parse_tag(word, reader);
          if (ls >> word) reader.fail("trailing characters '" + word + "'");
        }
        face_vertices.push_back({v0, v1});
        face_tags.push_back(tag);
        break;
      }
      case Cells: {
        check_index(ls, static_cast<int>(cell_faces.size()), reader, true);
        std::vector<int> faces;
        std::pair<bool, Vec2> center{false, Vec2::Zero()};
        std::string tok;
        while (ls >> tok) {
          if (tok == "@") {
            Real cx, cy;
            if (!(ls >> cx >> cy)) reader.fail("'@' needs two coordinates");
            center = {true, Vec2(cx, cy)};
            if (ls >> tok) reader.fail("trailing characters '" + tok + "'");
            break;
          }
          try {
            faces.push_back(std::stoi(tok));
          } catch (const std::exception&) {
            reader.fail("cannot parse face index '" + tok + "'");
          }
        }
        if (faces.empty()) reader.fail("cell lists no faces");
        cell_faces.push_back(std::move(faces));
        centers.push_back(center);
        break;
      }
    }
  }
  if (vertices.empty()) reader.fail("mesh has no vertices section");
  if (cell_faces.empty()) reader.fail("mesh has no cells section");

  Mesh mesh;
  try {
    mesh = from_face_lists(std::move(vertices), face_vertices, face_tags,
                           cell_faces, centers);
    validate(mesh);
  } catch (const InvalidInput& e) {
    throw InvalidInput(origin + ": " + e.what());
  }
  return mesh;
}

Mesh load_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open mesh file '" + path + "'");
  return read_mesh(in, path);
}

void write_mesh(const Mesh& mesh, std::ostream& out) {
  out << "polymesh 2d\n";
  char buf[128];
  out << "vertices\n";
  for (size_t i = 0; i < mesh.vertex.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu %.17g %.17g\n", i, mesh.vertex[i].x(),
                  mesh.vertex[i].y());
    out << buf;
  }
  out << "faces\n";
  for (int fi = 0; fi < mesh.n_faces(); ++fi) {
    const Face& f = mesh.face[fi];
    out << fi << ": " << f.v0 << ' ' << f.v1;
    if (f.tag != FaceTag::Interior) out << ' ' << tag_name(f.tag);
    out << '\n';
  }
  out << "cells\n";
  for (int K = 0; K < mesh.n_cells(); ++K) {
    out << K << ':';
    for (int fi : mesh.faces_of(K)) out << ' ' << fi;
    out << '\n';
  }
}

void save_mesh(const Mesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_mesh(mesh, out);
  if (!out.flush()) throw IoError("failed writing '" + path + "'");
}

Mesh build_from_spec(const std::string& spec) {
  auto split = [](const std::string& s) {
    std::vector<std::string> parts;
    size_t pos = 0;
    while (pos <= s.size()) {
      size_t colon = s.find(':', pos);
      if (colon == std::string::npos) colon = s.size();
      parts.push_back(s.substr(pos, colon - pos));
      pos = colon + 1;
    }
    return parts;
  };
  auto parse_dims = [&](const std::string& arg, int& nx, int& ny) {
    size_t x = arg.find('x');
    if (x == std::string::npos)
      throw InvalidInput("mesh spec '" + spec + "': expected <NX>x<NY>");
    try {
      nx = std::stoi(arg.substr(0, x));
      ny = std::stoi(arg.substr(x + 1));
    } catch (const std::exception&) {
      throw InvalidInput("mesh spec '" + spec + "': cannot parse dimensions");
    }
  };
  std::vector<std::string> parts = split(spec);
  if (parts.size() < 2)
    throw InvalidInput("mesh spec '" + spec +
                       "': expected cart:NXxNY | tri:LEVEL | hex:NXxNY[:TILT]");
  if (parts[0] == "cart" && parts.size() == 2) {
    int nx, ny;
    parse_dims(parts[1], nx, ny);
    return build_cartesian(nx, ny);
  }
  if (parts[0] == "tri" && parts.size() == 2) {
    try {
      return build_triangular(std::stoi(parts[1]));
    } catch (const InvalidInput&) {
      throw;
    } catch (const std::exception&) {
      throw InvalidInput("mesh spec '" + spec + "': cannot parse level");
    }
  }
  if (parts[0] == "hex" && (parts.size() == 2 || parts.size() == 3)) {
    int nx, ny;
    parse_dims(parts[1], nx, ny);
    Real tilt = 0.2;
    if (parts.size() == 3) {
      try {
        tilt = std::stod(parts[2]);
      } catch (const std::exception&) {
        throw InvalidInput("mesh spec '" + spec + "': cannot parse tilt");
      }
    }
    return build_hexagonal(nx, ny, {}, tilt);
  }
  throw InvalidInput("mesh spec '" + spec +
                     "': expected cart:NXxNY | tri:LEVEL | hex:NXxNY[:TILT]");
}

Mesh load_mesh_source(const std::string& source) {
  if (source.rfind("builder:", 0) == 0) return build_from_spec(source.substr(8));
  return load_mesh(source);
}

}  // namespace hfvdd
