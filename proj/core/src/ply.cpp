// PLY / XYZ ingestion and PLY output. Only vertex positions are kept.

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "advreg/error.hpp"
#include "advreg/pointcloud.hpp"

namespace advreg {

namespace {

enum class ScalarType { int8, uint8, int16, uint16, int32, uint32, float32, float64 };

std::optional<ScalarType> parse_scalar_type(std::string_view name) {
  if (name == "char" || name == "int8") return ScalarType::int8;
  if (name == "uchar" || name == "uint8") return ScalarType::uint8;
  if (name == "short" || name == "int16") return ScalarType::int16;
  if (name == "ushort" || name == "uint16") return ScalarType::uint16;
  if (name == "int" || name == "int32") return ScalarType::int32;
  if (name == "uint" || name == "uint32") return ScalarType::uint32;
  if (name == "float" || name == "float32") return ScalarType::float32;
  if (name == "double" || name == "float64") return ScalarType::float64;
  return std::nullopt;
}

std::size_t scalar_size(ScalarType t) {
  switch (t) {
    case ScalarType::int8:
    case ScalarType::uint8: return 1;
    case ScalarType::int16:
    case ScalarType::uint16: return 2;
    case ScalarType::int32:
    case ScalarType::uint32:
    case ScalarType::float32: return 4;
    case ScalarType::float64: return 8;
  }
  return 0;
}

struct Property {
  std::string name;
  ScalarType type = ScalarType::float32;
  bool is_list = false;
  ScalarType count_type = ScalarType::uint8;
};

struct Element {
  std::string name;
  std::size_t count = 0;
  std::vector<Property> properties;
};

struct Header {
  bool binary = false;
  std::vector<Element> elements;
  std::size_t data_offset = 0;
};

template <typename T>
T read_le(const unsigned char* p) {
  T value;
  std::memcpy(&value, p, sizeof(T));
  if constexpr (std::endian::native == std::endian::big && sizeof(T) > 1) {
    auto* bytes = reinterpret_cast<unsigned char*>(&value);
    std::reverse(bytes, bytes + sizeof(T));
  }
  return value;
}

double read_scalar(const unsigned char* p, ScalarType t) {
  switch (t) {
    case ScalarType::int8: return read_le<std::int8_t>(p);
    case ScalarType::uint8: return read_le<std::uint8_t>(p);
    case ScalarType::int16: return read_le<std::int16_t>(p);
    case ScalarType::uint16: return read_le<std::uint16_t>(p);
    case ScalarType::int32: return read_le<std::int32_t>(p);
    case ScalarType::uint32: return read_le<std::uint32_t>(p);
    case ScalarType::float32: return read_le<float>(p);
    case ScalarType::float64: return read_le<double>(p);
  }
  return 0.0;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

bool parse_double(std::string_view token, double& out) {
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

std::string read_file(const std::string& path) {
  if (!std::filesystem::exists(path)) throw MissingFile("no such file: " + path, path);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingFile("cannot open file: " + path, path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Header parse_header(const std::string& data, const std::string& path) {
  auto malformed = [&](const std::string& why) { return MalformedFile("malformed PLY header in " + path + ": " + why, path); };
  Header header;
  std::size_t pos = 0;
  bool saw_format = false;
  int line_no = 0;
  while (true) {
    const std::size_t eol = data.find('\n', pos);
    if (eol == std::string::npos) throw malformed("missing end_header");
    std::string_view line(data.data() + pos, eol - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos = eol + 1;
    ++line_no;
    const auto tok = split_ws(line);
    if (line_no == 1) {
      if (tok.size() != 1 || tok[0] != "ply") throw malformed("missing 'ply' magic");
      continue;
    }
    if (tok.empty() || tok[0] == "comment" || tok[0] == "obj_info") continue;
    if (tok[0] == "end_header") break;
    if (tok[0] == "format") {
      if (tok.size() != 3) throw malformed("bad format line");
      if (tok[1] == "ascii") {
        header.binary = false;
      } else if (tok[1] == "binary_little_endian") {
        header.binary = true;
      } else if (tok[1] == "binary_big_endian") {
        throw UnsupportedFormat("binary_big_endian PLY is not supported: " + path, path);
      } else {
        throw malformed("unknown format '" + std::string(tok[1]) + "'");
      }
      saw_format = true;
    } else if (tok[0] == "element") {
      if (tok.size() != 3) throw malformed("bad element line");
      Element e;
      e.name = tok[1];
      double count = 0;
      if (!parse_double(tok[2], count) || count < 0) throw malformed("bad element count");
      e.count = static_cast<std::size_t>(count);
      header.elements.push_back(std::move(e));
    } else if (tok[0] == "property") {
      if (header.elements.empty()) throw malformed("property before element");
      Property prop;
      if (tok.size() == 5 && tok[1] == "list") {
        auto ct = parse_scalar_type(tok[2]);
        auto it = parse_scalar_type(tok[3]);
        if (!ct || !it) throw malformed("bad list property type");
        prop.is_list = true;
        prop.count_type = *ct;
        prop.type = *it;
        prop.name = tok[4];
      } else if (tok.size() == 3) {
        auto t = parse_scalar_type(tok[1]);
        if (!t) throw malformed("unknown property type '" + std::string(tok[1]) + "'");
        prop.type = *t;
        prop.name = tok[2];
      } else {
        throw malformed("bad property line");
      }
      header.elements.back().properties.push_back(std::move(prop));
    } else {
      throw malformed("unexpected keyword '" + std::string(tok[0]) + "'");
    }
  }
  if (!saw_format) throw malformed("missing format line");
  header.data_offset = pos;
  return header;
}

struct XyzSlots {
  int x = -1, y = -1, z = -1;
};

XyzSlots locate_xyz(const Element& vertex, const std::string& path) {
  XyzSlots s;
  for (std::size_t i = 0; i < vertex.properties.size(); ++i) {
    const auto& p = vertex.properties[i];
    int* slot = p.name == "x" ? &s.x : p.name == "y" ? &s.y : p.name == "z" ? &s.z : nullptr;
    if (!slot) continue;
    if (p.is_list || (p.type != ScalarType::float32 && p.type != ScalarType::float64))
      throw MalformedFile("vertex " + p.name + " must be float or double in " + path, path);
    *slot = static_cast<int>(i);
  }
  if (s.x < 0 || s.y < 0 || s.z < 0) throw MalformedFile("vertex element lacks x/y/z in " + path, path);
  return s;
}

PointCloud read_ply_ascii(const std::string& data, const Header& header, const std::string& path) {
  PointCloud cloud;
  std::size_t pos = header.data_offset;
  auto next_line = [&]() -> std::string_view {
    while (pos < data.size()) {
      std::size_t eol = data.find('\n', pos);
      if (eol == std::string::npos) eol = data.size();
      std::string_view line(data.data() + pos, eol - pos);
      pos = eol + 1;
      if (!split_ws(line).empty()) return line;
    }
    throw MalformedFile("unexpected end of PLY data in " + path, path);
  };
  for (const auto& element : header.elements) {
    const bool is_vertex = element.name == "vertex";
    XyzSlots slots;
    if (is_vertex) {
      slots = locate_xyz(element, path);
      cloud.points.reserve(element.count);
    }
    for (std::size_t n = 0; n < element.count; ++n) {
      const auto line = next_line();
      if (!is_vertex) continue;
      const auto tok = split_ws(line);
      // Walk the properties; list properties consume a variable number of tokens.
      std::size_t t = 0;
      Vec3 p = Vec3::Zero();
      for (std::size_t k = 0; k < element.properties.size(); ++k) {
        const auto& prop = element.properties[k];
        if (t >= tok.size()) throw MalformedFile("short vertex line in " + path, path);
        double value = 0;
        if (!parse_double(tok[t], value)) throw MalformedFile("bad number '" + std::string(tok[t]) + "' in " + path, path);
        if (prop.is_list) {
          t += 1 + static_cast<std::size_t>(value);
          continue;
        }
        if (static_cast<int>(k) == slots.x) p.x() = value;
        if (static_cast<int>(k) == slots.y) p.y() = value;
        if (static_cast<int>(k) == slots.z) p.z() = value;
        ++t;
      }
      cloud.points.push_back(p);
    }
    if (is_vertex) break;
  }
  return cloud;
}

PointCloud read_ply_binary(const std::string& data, const Header& header, const std::string& path) {
  PointCloud cloud;
  const auto* bytes = reinterpret_cast<const unsigned char*>(data.data());
  std::size_t pos = header.data_offset;
  auto need = [&](std::size_t n) {
    if (pos + n > data.size()) throw MalformedFile("truncated PLY body in " + path, path);
  };
  for (const auto& element : header.elements) {
    const bool is_vertex = element.name == "vertex";
    XyzSlots slots;
    if (is_vertex) {
      slots = locate_xyz(element, path);
      cloud.points.reserve(element.count);
    }
    for (std::size_t n = 0; n < element.count; ++n) {
      Vec3 p = Vec3::Zero();
      for (std::size_t k = 0; k < element.properties.size(); ++k) {
        const auto& prop = element.properties[k];
        if (prop.is_list) {
          const std::size_t cs = scalar_size(prop.count_type);
          need(cs);
          const double count = read_scalar(bytes + pos, prop.count_type);
          pos += cs;
          const std::size_t len = static_cast<std::size_t>(count) * scalar_size(prop.type);
          need(len);
          pos += len;
          continue;
        }
        const std::size_t sz = scalar_size(prop.type);
        need(sz);
        if (is_vertex) {
          const double value = read_scalar(bytes + pos, prop.type);
          if (static_cast<int>(k) == slots.x) p.x() = value;
          if (static_cast<int>(k) == slots.y) p.y() = value;
          if (static_cast<int>(k) == slots.z) p.z() = value;
        }
        pos += sz;
      }
      if (is_vertex) cloud.points.push_back(p);
    }
    if (is_vertex) break;
  }
  return cloud;
}

PointCloud load_ply(const std::string& path) {
  const std::string data = read_file(path);
  const Header header = parse_header(data, path);
  const bool has_vertex = std::any_of(header.elements.begin(), header.elements.end(),
                                      [](const Element& e) { return e.name == "vertex"; });
  if (!has_vertex) throw MalformedFile("PLY has no vertex element: " + path, path);
  PointCloud cloud = header.binary ? read_ply_binary(data, header, path) : read_ply_ascii(data, header, path);
  if (cloud.empty()) throw EmptyCloud("PLY has zero vertices: " + path, path);
  return cloud;
}

PointCloud load_xyz(const std::string& path) {
  const std::string data = read_file(path);
  PointCloud cloud;
  std::istringstream in(data);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto tok = split_ws(line);
    if (tok.empty() || tok[0].front() == '#') continue;
    if (tok.size() < 3)
      throw MalformedFile(path + ":" + std::to_string(line_no) + ": expected 'x y z'", path);
    Vec3 p;
    for (int i = 0; i < 3; ++i)
      if (!parse_double(tok[static_cast<std::size_t>(i)], p[i]))
        throw MalformedFile(path + ":" + std::to_string(line_no) + ": bad number", path);
    cloud.points.push_back(p);
  }
  if (cloud.empty()) throw EmptyCloud("XYZ file has no points: " + path, path);
  return cloud;
}

}  // namespace

CloudFormat format_from_path(const std::string& path) {
  std::string ext = std::filesystem::path(path).extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return (ext == ".xyz" || ext == ".txt") ? CloudFormat::xyz : CloudFormat::ply;
}

PointCloud load_point_cloud(const std::string& path, CloudFormat format) {
  PointCloud cloud = format == CloudFormat::ply ? load_ply(path) : load_xyz(path);
  for (const auto& p : cloud.points)
    if (!p.allFinite()) throw MalformedFile("non-finite coordinate in " + path, path);
  cloud.source_path = path;
  return cloud;
}

PointCloud load_point_cloud(const std::string& path) {
  return load_point_cloud(path, format_from_path(path));
}

void write_ply(const std::string& path, const PointCloud& cloud, PlyEncoding encoding) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path, path);
  const bool binary = encoding == PlyEncoding::binary_little_endian;
  out << "ply\n"
      << "format " << (binary ? "binary_little_endian" : "ascii") << " 1.0\n"
      << "element vertex " << cloud.size() << "\n"
      << "property double x\nproperty double y\nproperty double z\n"
      << "end_header\n";
  if (binary) {
    for (const auto& p : cloud.points) {
      for (int i = 0; i < 3; ++i) {
        double v = p[i];
        unsigned char buf[8];
        std::memcpy(buf, &v, 8);
        if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + 8);
        out.write(reinterpret_cast<const char*>(buf), 8);
      }
    }
  } else {
    char buf[96];
    for (const auto& p : cloud.points) {
      std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g\n", p.x(), p.y(), p.z());
      out << buf;
    }
  }
  if (!out) throw IoError("write failed: " + path, path);
}

void write_xyz(const std::string& path, const PointCloud& cloud) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path, path);
  char buf[96];
  for (const auto& p : cloud.points) {
    std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g\n", p.x(), p.y(), p.z());
    out << buf;
  }
  if (!out) throw IoError("write failed: " + path, path);
}

}  // namespace advreg
