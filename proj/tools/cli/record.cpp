#include "cli/record.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "advreg/error.hpp"

namespace advreg::cli {

namespace {

std::string real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string triple(const Vec3& v) { return real(v.x()) + ' ' + real(v.y()) + ' ' + real(v.z()); }

Vec3 read_triple(std::istringstream& line, const std::string& key) {
  Vec3 v;
  if (!(line >> v.x() >> v.y() >> v.z())) throw InvalidArgument("record: bad " + key);
  return v;
}

}  // namespace

void write_record(std::ostream& out, const TransformRecord& r) {
  out << "advreg-transform 1\n";
  out << "method " << r.method << '\n';
  if (r.mode) out << "mode " << *r.mode << '\n';
  if (r.seed) out << "seed " << *r.seed << '\n';
  out << "rotation_matrix\n";
  for (int i = 0; i < 3; ++i) out << "  " << triple(r.rotation.row(i).transpose()) << '\n';
  out << "rotation_vector " << triple(r.rotation_vector) << '\n';
  out << "translation " << triple(r.translation) << '\n';
  out << "epochs " << r.epochs << '\n';
  for (const auto& [key, value] : r.scalars) out << key << ' ' << real(value) << '\n';
  char wall[32];
  std::snprintf(wall, sizeof wall, "%.3f", r.wall_time_s);
  out << "wall_time_s " << wall << '\n';
}

TransformRecord read_record(std::istream& in) {
  TransformRecord r;
  std::string text;
  if (!std::getline(in, text) || text != "advreg-transform 1") throw InvalidArgument("record: missing header");
  while (std::getline(in, text)) {
    std::istringstream line(text);
    std::string key;
    if (!(line >> key)) continue;
    if (key == "method") {
      line >> r.method;
    } else if (key == "mode") {
      r.mode.emplace();
      line >> *r.mode;
    } else if (key == "seed") {
      r.seed.emplace();
      line >> *r.seed;
    } else if (key == "rotation_matrix") {
      for (int i = 0; i < 3; ++i) {
        std::string row;
        if (!std::getline(in, row)) throw InvalidArgument("record: truncated rotation_matrix");
        std::istringstream rs(row);
        r.rotation.row(i) = read_triple(rs, "rotation_matrix").transpose();
      }
    } else if (key == "rotation_vector") {
      r.rotation_vector = read_triple(line, key);
    } else if (key == "translation") {
      r.translation = read_triple(line, key);
    } else if (key == "epochs") {
      line >> r.epochs;
    } else if (key == "wall_time_s") {
      line >> r.wall_time_s;
    } else {
      double v = 0.0;
      if (!(line >> v)) throw InvalidArgument("record: bad value for " + key);
      r.scalars.emplace_back(key, v);
    }
  }
  return r;
}

}  // namespace advreg::cli
