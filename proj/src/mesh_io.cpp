#include "vmesh/mesh_io.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include "vmesh/errors.hpp"

namespace vmesh {
namespace {

static_assert(std::endian::native == std::endian::little, "binary PLY I/O assumes a little-endian host");

InputError io_error(const std::filesystem::path& path, const std::string& what) {
  return InputError(path.string() + ": " + what);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

template <typename T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

void write_ply(const TriMesh& s, std::ostream& os, bool ascii) {
  os << "ply\n" << (ascii ? "format ascii 1.0\n" : "format binary_little_endian 1.0\n");
  os << "element vertex " << s.vertices.size() << "\n"
     << "property double x\nproperty double y\nproperty double z\n"
     << "element face " << s.faces.size() << "\n"
     << "property list uchar int vertex_indices\n"
     << "end_header\n";
  if (ascii) {
    os << std::setprecision(17);
    for (const auto& p : s.vertices) os << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
    for (const auto& f : s.faces) os << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
    return;
  }
  for (const auto& p : s.vertices) {
    put(os, p.x());
    put(os, p.y());
    put(os, p.z());
  }
  for (const auto& f : s.faces) {
    put(os, std::uint8_t{3});
    for (std::uint32_t i : f) put(os, static_cast<std::int32_t>(i));
  }
}

void write_obj(const TriMesh& s, std::ostream& os) {
  os << std::setprecision(17);
  for (const auto& p : s.vertices) os << "v " << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
  for (const auto& f : s.faces) {
    os << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
  }
}

// ---- PLY reading ----

enum class Scalar { I8, U8, I16, U16, I32, U32, F32, F64 };

Scalar parse_scalar(const std::string& name, const std::filesystem::path& path) {
  if (name == "char" || name == "int8") return Scalar::I8;
  if (name == "uchar" || name == "uint8") return Scalar::U8;
  if (name == "short" || name == "int16") return Scalar::I16;
  if (name == "ushort" || name == "uint16") return Scalar::U16;
  if (name == "int" || name == "int32") return Scalar::I32;
  if (name == "uint" || name == "uint32") return Scalar::U32;
  if (name == "float" || name == "float32") return Scalar::F32;
  if (name == "double" || name == "float64") return Scalar::F64;
  throw io_error(path, "unknown PLY scalar type '" + name + "'");
}

template <typename T>
T get(std::istream& is) {
  T v;
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  return v;
}

double read_scalar(std::istream& is, Scalar t, bool ascii) {
  if (ascii) {
    double v;
    is >> v;
    return v;
  }
  switch (t) {
    case Scalar::I8: return get<std::int8_t>(is);
    case Scalar::U8: return get<std::uint8_t>(is);
    case Scalar::I16: return get<std::int16_t>(is);
    case Scalar::U16: return get<std::uint16_t>(is);
    case Scalar::I32: return get<std::int32_t>(is);
    case Scalar::U32: return get<std::uint32_t>(is);
    case Scalar::F32: return get<float>(is);
    case Scalar::F64: return get<double>(is);
  }
  return 0.0;
}

struct PlyProperty {
  std::string name;
  Scalar type = Scalar::F32;
  bool is_list = false;
  Scalar count_type = Scalar::U8;
};

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<PlyProperty> props;
};

void add_polygon(TriMesh& mesh, const std::vector<std::int64_t>& idx, const std::filesystem::path& path) {
  if (idx.size() < 3) throw io_error(path, "face with fewer than 3 corners");
  for (std::int64_t i : idx) {
    if (i < 0 || static_cast<std::size_t>(i) >= mesh.vertices.size()) {
      throw io_error(path, "face index " + std::to_string(i) + " out of range");
    }
  }
  for (std::size_t k = 1; k + 1 < idx.size(); ++k) {
    mesh.faces.push_back({static_cast<std::uint32_t>(idx[0]), static_cast<std::uint32_t>(idx[k]),
                          static_cast<std::uint32_t>(idx[k + 1])});
  }
}

TriMesh read_ply(std::istream& is, const std::filesystem::path& path) {
  std::string line;
  std::getline(is, line);
  if (line.rfind("ply", 0) != 0) throw io_error(path, "missing 'ply' magic");
  bool ascii = false;
  bool have_format = false;
  std::vector<PlyElement> elements;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string word;
    ls >> word;
    if (word == "end_header") break;
    if (word == "comment" || word == "obj_info" || word.empty()) continue;
    if (word == "format") {
      std::string fmt;
      ls >> fmt;
      if (fmt == "ascii") {
        ascii = true;
      } else if (fmt != "binary_little_endian") {
        throw io_error(path, "unsupported PLY format '" + fmt + "'");
      }
      have_format = true;
    } else if (word == "element") {
      PlyElement e;
      ls >> e.name >> e.count;
      if (!ls) throw io_error(path, "bad element line");
      elements.push_back(e);
    } else if (word == "property") {
      if (elements.empty()) throw io_error(path, "property before element");
      PlyProperty p;
      std::string type;
      ls >> type;
      if (type == "list") {
        std::string ct, it;
        ls >> ct >> it >> p.name;
        p.is_list = true;
        p.count_type = parse_scalar(ct, path);
        p.type = parse_scalar(it, path);
      } else {
        p.type = parse_scalar(type, path);
        ls >> p.name;
      }
      elements.back().props.push_back(p);
    } else {
      throw io_error(path, "unexpected header line '" + line + "'");
    }
  }
  if (!have_format) throw io_error(path, "missing format line");

  TriMesh mesh;
  for (const auto& e : elements) {
    for (std::size_t n = 0; n < e.count; ++n) {
      Point3 p = Point3::Zero();
      std::vector<std::int64_t> idx;
      for (const auto& prop : e.props) {
        if (prop.is_list) {
          const auto count = static_cast<std::int64_t>(read_scalar(is, prop.count_type, ascii));
          if (count < 0 || count > 1024) throw io_error(path, "implausible list length");
          std::vector<std::int64_t> values;
          for (std::int64_t k = 0; k < count; ++k) values.push_back(static_cast<std::int64_t>(read_scalar(is, prop.type, ascii)));
          if (e.name == "face" && (prop.name == "vertex_indices" || prop.name == "vertex_index")) idx = std::move(values);
        } else {
          const double v = read_scalar(is, prop.type, ascii);
          if (prop.name == "x") p.x() = v;
          if (prop.name == "y") p.y() = v;
          if (prop.name == "z") p.z() = v;
        }
      }
      if (!is) throw io_error(path, "truncated " + e.name + " data");
      if (e.name == "vertex") mesh.vertices.push_back(p);
      if (e.name == "face") add_polygon(mesh, idx, path);
    }
  }
  return mesh;
}

TriMesh read_obj(std::istream& is, const std::filesystem::path& path) {
  TriMesh mesh;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "v") {
      Point3 p;
      ls >> p.x() >> p.y() >> p.z();
      if (!ls) throw io_error(path, "bad vertex on line " + std::to_string(line_no));
      mesh.vertices.push_back(p);
    } else if (tag == "f") {
      std::vector<std::int64_t> idx;
      std::string tok;
      while (ls >> tok) {
        // Accept v, v/vt, v//vn and v/vt/vn; negative indices are relative.
        std::int64_t i = 0;
        try {
          i = std::stoll(tok.substr(0, tok.find('/')));
        } catch (const std::exception&) {
          throw io_error(path, "bad face index '" + tok + "' on line " + std::to_string(line_no));
        }
        idx.push_back(i < 0 ? static_cast<std::int64_t>(mesh.vertices.size()) + i : i - 1);
      }
      add_polygon(mesh, idx, path);
    }
  }
  return mesh;
}

}  // namespace

MeshFormat mesh_format_for(const std::filesystem::path& path, bool ascii) {
  const std::string ext = lower(path.extension().string());
  if (ext == ".ply") return ascii ? MeshFormat::PlyAscii : MeshFormat::PlyBinary;
  if (ext == ".obj") return MeshFormat::Obj;
  throw InputError(path.string() + ": unsupported mesh extension (expected .ply or .obj)");
}

TriMesh to_tri_mesh(const MeshSnapshot& snapshot) {
  TriMesh mesh;
  mesh.vertices.reserve(snapshot.vertices.size());
  for (const auto& [id, p] : snapshot.vertices) mesh.vertices.push_back(p);
  mesh.faces.reserve(snapshot.faces.size());
  for (const auto& f : snapshot.faces) mesh.faces.push_back(f.indices);
  return mesh;
}

void write_mesh(const TriMesh& mesh, const std::filesystem::path& path, MeshFormat format) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw io_error(path, "cannot open for writing");
  if (format == MeshFormat::Obj) {
    write_obj(mesh, os);
  } else {
    write_ply(mesh, os, format == MeshFormat::PlyAscii);
  }
  if (!os) throw io_error(path, "write failed");
}

void export_mesh(const MeshSnapshot& snapshot, const std::filesystem::path& path, MeshFormat format) {
  write_mesh(to_tri_mesh(snapshot), path, format);
  std::filesystem::path idmap = path;
  idmap += ".idmap";
  std::ofstream os(idmap);
  if (!os) throw io_error(idmap, "cannot open for writing");
  for (const auto& [id, p] : snapshot.vertices) os << id << '\n';
  if (!os) throw io_error(idmap, "write failed");
}

TriMesh read_mesh(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw io_error(path, "cannot open for reading");
  const std::string ext = lower(path.extension().string());
  if (ext == ".ply") return read_ply(is, path);
  if (ext == ".obj") return read_obj(is, path);
  throw io_error(path, "unsupported mesh extension (expected .ply or .obj)");
}

}  // namespace vmesh
