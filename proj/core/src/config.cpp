#include "advreg/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "advreg/error.hpp"

namespace advreg {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& value) {
  double out = 0;
  const char* first = value.data();
  const char* last = first + value.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last) throw InvalidArgument("bad number for " + key + ": '" + value + "'");
  return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& value) {
  std::uint64_t out = 0;
  const char* first = value.data();
  const char* last = first + value.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last) throw InvalidArgument("bad integer for " + key + ": '" + value + "'");
  return out;
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  throw InvalidArgument("bad boolean for " + key + ": '" + value + "'");
}

Schedule to_schedule(const std::string& key, const std::string& value) {
  // A bare number means a constant schedule.
  double x = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), x);
  if (ec == std::errc() && ptr == value.data() + value.size()) return Schedule::constant(x);
  try {
    return parse_schedule(value);
  } catch (const InvalidArgument&) {
    throw InvalidArgument("bad schedule for " + key + ": '" + value + "'");
  }
}

std::string fmt(double x) {
  std::ostringstream o;
  o.precision(17);
  o << x;
  return o.str();
}

}  // namespace

KeyValues KeyValues::parse(const std::string& text, const std::string& origin) {
  KeyValues kv;
  kv.origin_ = origin;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw InvalidArgument(origin + ":" + std::to_string(line_no) + ": expected key = value");
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (key.empty()) throw InvalidArgument(origin + ":" + std::to_string(line_no) + ": empty key");
    kv.entries_.emplace_back(std::move(key), std::move(value));
  }
  return kv;
}

KeyValues KeyValues::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MissingFile("cannot open config file: " + path, path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path);
}

bool apply_train_key(TrainConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "n_epochs") cfg.n_epochs = to_u64(key, value);
  else if (key == "k_critic") cfg.k_critic = to_u64(key, value);
  else if (key == "k_generator") cfg.k_generator = to_u64(key, value);
  else if (key == "batch_size") cfg.batch_size = to_schedule(key, value);
  else if (key == "lr_critic") cfg.lr_critic = to_schedule(key, value);
  else if (key == "lr_generator") cfg.lr_generator = to_schedule(key, value);
  else if (key == "lambda_gp") cfg.lambda_gp = to_double(key, value);
  else if (key == "mode") cfg.mode = parse_mode(value);
  else if (key == "augment_shift_sigma") cfg.augment_shift_sigma = to_double(key, value);
  else if (key == "augment_scale_min") cfg.augment_scale_min = to_double(key, value);
  else if (key == "augment_scale_max") cfg.augment_scale_max = to_double(key, value);
  else if (key == "normalize_inputs") cfg.normalize_inputs = to_bool(key, value);
  else if (key == "seed") cfg.seed = to_u64(key, value);
  else if (key == "success_threshold_deg") cfg.success_threshold = deg_to_rad(to_double(key, value));
  else if (key == "critic_width") cfg.critic_width = to_u64(key, value);
  else if (key == "critic_depth") cfg.critic_depth = to_u64(key, value);
  else if (key == "plateau_patience") cfg.plateau_patience = to_u64(key, value);
  else if (key == "plateau_tolerance") cfg.plateau_tolerance = to_double(key, value);
  else return false;
  return true;
}

bool apply_icp_key(IcpConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "max_iterations") cfg.max_iterations = to_u64(key, value);
  else if (key == "convergence_epsilon") cfg.convergence_epsilon = to_double(key, value);
  else return false;
  return true;
}

TrainConfig parse_train_config(const KeyValues& kv, TrainConfig cfg) {
  for (const auto& [key, value] : kv.entries())
    if (!apply_train_key(cfg, key, value)) throw InvalidArgument(kv.origin() + ": unknown key '" + key + "'");
  cfg.validate();
  return cfg;
}

TrainConfig load_train_config(const std::string& path) { return parse_train_config(KeyValues::load(path)); }

std::string format_train_config(const TrainConfig& cfg) {
  std::ostringstream o;
  o << "n_epochs = " << cfg.n_epochs << '\n'
    << "k_critic = " << cfg.k_critic << '\n'
    << "k_generator = " << cfg.k_generator << '\n'
    << "batch_size = " << format_schedule(cfg.batch_size) << '\n'
    << "lr_critic = " << format_schedule(cfg.lr_critic) << '\n'
    << "lr_generator = " << format_schedule(cfg.lr_generator) << '\n'
    << "lambda_gp = " << fmt(cfg.lambda_gp) << '\n'
    << "mode = " << to_string(cfg.mode) << '\n'
    << "augment_shift_sigma = " << fmt(cfg.augment_shift_sigma) << '\n'
    << "augment_scale_min = " << fmt(cfg.augment_scale_min) << '\n'
    << "augment_scale_max = " << fmt(cfg.augment_scale_max) << '\n'
    << "normalize_inputs = " << (cfg.normalize_inputs ? "true" : "false") << '\n'
    << "seed = " << cfg.seed << '\n'
    << "success_threshold_deg = " << fmt(rad_to_deg(cfg.success_threshold)) << '\n'
    << "critic_width = " << cfg.critic_width << '\n'
    << "critic_depth = " << cfg.critic_depth << '\n'
    << "plateau_patience = " << cfg.plateau_patience << '\n'
    << "plateau_tolerance = " << fmt(cfg.plateau_tolerance) << '\n';
  return o.str();
}

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    out.push_back(to_double("list", item));
  }
  return out;
}

BenchmarkSpecFile parse_benchmark_spec(const KeyValues& kv) {
  BenchmarkSpecFile file;
  bool have_kind = false, have_levels = false;
  for (const auto& [key, value] : kv.entries()) {
    if (key.rfind("train.", 0) == 0) {
      if (!apply_train_key(file.options.train, key.substr(6), value))
        throw InvalidArgument(kv.origin() + ": unknown key '" + key + "'");
    } else if (key.rfind("icp.", 0) == 0) {
      if (!apply_icp_key(file.options.icp, key.substr(4), value))
        throw InvalidArgument(kv.origin() + ": unknown key '" + key + "'");
    } else if (key == "kind") {
      file.spec.kind = bench::parse_kind(value);
      have_kind = true;
    } else if (key == "levels") {
      file.spec.levels = parse_number_list(value);
      have_levels = true;
    } else if (key == "trials_per_level") {
      file.spec.trials_per_level = to_u64(key, value);
    } else if (key == "base_rotation_deg") {
      file.spec.base_rotation_deg = to_double(key, value);
    } else if (key == "seed") {
      file.spec.seed = to_u64(key, value);
    } else if (key == "translation_sigma") {
      file.spec.translation_sigma = to_double(key, value);
    } else if (key == "gaussian_rotations") {
      file.spec.gaussian_rotations = to_bool(key, value);
    } else if (key == "allow_any_noise") {
      file.spec.allow_any_noise = to_bool(key, value);
    } else if (key == "jobs") {
      file.options.jobs = to_u64(key, value);
    } else if (key == "methods") {
      file.options.methods.clear();
      std::istringstream in(value);
      std::string item;
      while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) file.options.methods.push_back(bench::parse_method(item));
      }
    } else {
      throw InvalidArgument(kv.origin() + ": unknown key '" + key + "'");
    }
  }
  if (!have_kind || !have_levels) throw InvalidArgument(kv.origin() + ": benchmark spec needs 'kind' and 'levels'");
  file.spec.validate();
  file.options.train.validate();
  file.options.icp.validate();
  if (file.options.methods.empty()) throw InvalidArgument(kv.origin() + ": no methods listed");
  return file;
}

BenchmarkSpecFile load_benchmark_spec(const std::string& path) { return parse_benchmark_spec(KeyValues::load(path)); }

}  // namespace advreg
