#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include "mae/error.hpp"
#include "mae/mesh.hpp"

namespace mae {

namespace {

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  /// Next non-blank line, tokenized. Throws at end of input.
  std::istringstream next(const char* expecting) {
    std::string text;
    while (std::getline(in_, text)) {
      ++line_;
      if (text.find_first_not_of(" \t\r") != std::string::npos) return std::istringstream(text);
    }
    throw ParseError(std::string("unexpected end of file, expecting ") + expecting, line_ + 1);
  }

  int line() const { return line_; }

 private:
  std::istream& in_;
  int line_ = 0;
};

template <typename... Ts>
void read_fields(std::istringstream& fields, int line, const char* what, Ts&... values) {
  ((fields >> values), ...);
  if (fields.fail()) throw ParseError(std::string("malformed ") + what, line);
  std::string extra;
  if (fields >> extra) throw ParseError(std::string("trailing data after ") + what, line);
}

}  // namespace

void save_mesh(const TriMesh& mesh, std::ostream& out) {
  out << mesh.num_vertices() << ' ' << mesh.num_triangles() << '\n';
  out << std::setprecision(17);
  for (int k = 0; k < mesh.num_vertices(); ++k) {
    const Point& p = mesh.vertex(k);
    out << p.x() << ' ' << p.y() << ' ' << (mesh.is_boundary(k) ? 1 : 0) << '\n';
  }
  for (const auto& t : mesh.triangles()) out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

void save_mesh(const TriMesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  save_mesh(mesh, out);
  if (!out) throw Error("failed writing " + path.string());
}

TriMesh load_mesh(std::istream& in) {
  LineReader reader(in);
  long long nv = 0;
  long long nt = 0;
  {
    auto header = reader.next("header 'nv nt'");
    read_fields(header, reader.line(), "header 'nv nt'", nv, nt);
    if (nv < 3 || nt < 1) throw ParseError("vertex/triangle counts out of range", reader.line());
  }

  std::vector<Point> vertices;
  std::vector<bool> boundary;
  vertices.reserve(nv);
  boundary.reserve(nv);
  for (long long k = 0; k < nv; ++k) {
    auto fields = reader.next("vertex line 'x y flag'");
    double x = 0;
    double y = 0;
    int flag = 0;
    read_fields(fields, reader.line(), "vertex line 'x y flag'", x, y, flag);
    if (flag != 0 && flag != 1) throw ParseError("boundary flag must be 0 or 1", reader.line());
    vertices.emplace_back(x, y);
    boundary.push_back(flag == 1);
  }

  std::vector<Triangle> triangles;
  triangles.reserve(nt);
  for (long long t = 0; t < nt; ++t) {
    auto fields = reader.next("triangle line 'i j k'");
    long long i = 0;
    long long j = 0;
    long long k = 0;
    read_fields(fields, reader.line(), "triangle line 'i j k'", i, j, k);
    for (long long v : {i, j, k}) {
      if (v < 0 || v >= nv)
        throw ParseError("vertex index " + std::to_string(v) + " out of range [0, " +
                             std::to_string(nv) + ")",
                         reader.line());
    }
    const Triangle tri{static_cast<int>(i), static_cast<int>(j), static_cast<int>(k)};
    if (!(signed_area(vertices[i], vertices[j], vertices[k]) > 0.0))
      throw ParseError("triangle is inverted or degenerate (must be counterclockwise)", reader.line());
    triangles.push_back(tri);
  }

  std::string rest;
  while (std::getline(in, rest)) {
    if (rest.find_first_not_of(" \t\r") != std::string::npos)
      throw ParseError("unexpected data after the last triangle", reader.line() + 1);
  }
  return TriMesh(std::move(vertices), std::move(triangles), std::move(boundary));
}

TriMesh load_mesh(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open mesh file " + path.string());
  return load_mesh(in);
}

}  // namespace mae
