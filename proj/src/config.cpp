#include "pinwheel/config.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace pw {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class Reader {
 public:
  explicit Reader(const ConfigDocument& d) : doc_(d) {}

  bool has_section(const std::string& s) const { return doc_.values.count(s) > 0; }
  bool has(const std::string& s, const std::string& k) const {
    auto it = doc_.values.find(s);
    return it != doc_.values.end() && it->second.count(k);
  }

  std::string str(const std::string& s, const std::string& k) {
    used_.insert(s + "." + k);
    auto it = doc_.values.find(s);
    if (it == doc_.values.end() || !it->second.count(k))
      throw ConfigError("missing key '" + s + "." + k + "'", s + "." + k, 0);
    return it->second.at(k);
  }

  double num(const std::string& s, const std::string& k) {
    const std::string v = str(s, k);
    char* end = nullptr;
    errno = 0;
    const double d = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0' || errno == ERANGE || !std::isfinite(d)) fail(s, k, "expected a number");
    return d;
  }

  std::int64_t integer(const std::string& s, const std::string& k) {
    const std::string v = str(s, k);
    std::int64_t out = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size()) fail(s, k, "expected an integer");
    return out;
  }

  std::uint64_t unsigned_integer(const std::string& s, const std::string& k) {
    const std::string v = str(s, k);
    std::uint64_t out = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size()) fail(s, k, "expected a non-negative integer");
    return out;
  }

  [[noreturn]] void fail(const std::string& s, const std::string& k, const std::string& why) const {
    const std::string key = s + "." + k;
    auto it = doc_.lines.find(key);
    throw ConfigError(key + ": " + why, key, it == doc_.lines.end() ? 0 : it->second);
  }

  void reject_unused() const {
    for (const auto& [s, kv] : doc_.values)
      for (const auto& [k, v] : kv) {
        const std::string key = s + "." + k;
        if (!used_.count(key)) {
          auto it = doc_.lines.find(key);
          throw ConfigError("unknown key '" + key + "'", key, it == doc_.lines.end() ? 0 : it->second);
        }
      }
  }

 private:
  const ConfigDocument& doc_;
  std::set<std::string> used_;
};

std::vector<StimulusPoint> parse_points(Reader& r, const std::string& text) {
  std::vector<StimulusPoint> pts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    item = trim(item);
    if (item.empty()) continue;
    std::vector<double> v;
    std::stringstream is(item);
    std::string tok;
    while (std::getline(is, tok, ',')) {
      char* end = nullptr;
      const std::string t = trim(tok);
      const double d = std::strtod(t.c_str(), &end);
      if (end == t.c_str() || *end != '\0') r.fail("stimulus", "points", "malformed point '" + item + "'");
      v.push_back(d);
    }
    if (v.size() != 2 && v.size() != 3) r.fail("stimulus", "points", "points are x,y or x,y,arm_theta");
    StimulusPoint p{v[0], v[1], std::nullopt};
    if (v.size() == 3) p.arm_theta = v[2];
    pts.push_back(p);
  }
  return pts;
}

}  // namespace

ConfigDocument parse_config_document(const std::string& text) {
  ConfigDocument doc;
  std::stringstream ss(text);
  std::string raw, section;
  int line = 0;
  while (std::getline(ss, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string l = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (l.empty()) continue;
    if (l.front() == '[') {
      if (l.back() != ']' || l.size() < 3) throw ConfigError("malformed section header", "", line);
      section = trim(l.substr(1, l.size() - 2));
      doc.values[section];
      continue;
    }
    const auto eq = l.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", "", line);
    if (section.empty()) throw ConfigError("key outside of a section", "", line);
    const std::string key = trim(l.substr(0, eq));
    const std::string value = trim(l.substr(eq + 1));
    if (key.empty()) throw ConfigError("empty key", "", line);
    const std::string full = section + "." + key;
    if (doc.values[section].count(key)) throw ConfigError("duplicate key '" + full + "'", full, line);
    doc.values[section][key] = value;
    doc.lines[full] = line;
  }
  return doc;
}

ExperimentConfig parse_experiment_config(const std::string& text) {
  const ConfigDocument doc = parse_config_document(text);
  Reader r(doc);
  ExperimentConfig c;

  c.grid.n = static_cast<int>(r.integer("grid", "n"));
  c.grid.p = r.num("grid", "p");

  const auto K = static_cast<int>(r.integer("freqs", "K"));
  const double wmax = r.num("freqs", "omega_max"), wstep = r.num("freqs", "omega_step");
  const double ar = r.num("freqs", "alpha_rho"), aR = r.num("freqs", "alpha_r");
  try {
    c.freqs = FrequencyConfig::make(K, wmax, wstep, ar, aR);
  } catch (const DomainError& e) {
    r.fail("freqs", "K", e.what());
  }
  const std::string taper = r.str("freqs", "taper");
  if (taper == "none") c.taper = Taper::None;
  else if (taper == "fejer") c.taper = Taper::Fejer;
  else r.fail("freqs", "taper", "expected none or fejer");

  c.polar.n_phi = static_cast<int>(r.integer("polar", "n_theta"));
  c.polar.n_logrho = static_cast<int>(r.integer("polar", "n_speed"));
  c.polar.logrho_min = r.num("polar", "log_speed_min");
  c.polar.logrho_max = r.num("polar", "log_speed_max");

  c.filter_position.n_phi = static_cast<int>(r.integer("filter", "n_phi"));
  c.filter_position.n_logrho = static_cast<int>(r.integer("filter", "n_logrho"));
  c.filter_position.logrho_min = r.num("filter", "log_rho_min");
  c.filter_position.logrho_max = r.num("filter", "log_rho_max");

  c.process.T = r.num("process", "T");
  c.process.tau = r.num("process", "tau");
  c.process.corner_weight = r.num("process", "corner_weight");
  c.process.n_particles = r.integer("process", "n_particles");
  c.process.step = r.num("process", "step");
  c.process.max_length = r.num("process", "max_length");
  c.process.seed = r.unsigned_integer("process", "seed");

  c.bias.sigma_rho = r.num("bias", "sigma_rho");
  c.bias.sigma_r = r.num("bias", "sigma_r");
  c.bias.gamma = r.num("bias", "gamma");
  c.bias.sigma_theta = r.num("bias", "sigma_theta");

  c.iterations = static_cast<int>(r.integer("run", "iterations"));

  const std::string kind = r.str("stimulus", "kind");
  StimulusSpec& s = c.stimulus;
  if (kind == "circle") {
    s.kind = StimulusKind::Circle;
    s.n_dots = static_cast<int>(r.integer("stimulus", "n_dots"));
    s.radius = r.num("stimulus", "radius");
    s.cx = r.num("stimulus", "cx");
    s.cy = r.num("stimulus", "cy");
  } else if (kind == "koffka") {
    s.kind = StimulusKind::Koffka;
    s.arm_distance = r.num("stimulus", "arm_distance");
    s.arm_width = r.num("stimulus", "arm_width");
    s.cx = r.num("stimulus", "cx");
    s.cy = r.num("stimulus", "cy");
  } else if (kind == "avocado") {
    s.kind = StimulusKind::Avocado;
    s.contour_points = static_cast<int>(r.integer("stimulus", "contour_points"));
    s.noise_points = static_cast<int>(r.integer("stimulus", "noise_points"));
    s.size = r.num("stimulus", "size");
    s.noise_seed = r.unsigned_integer("stimulus", "noise_seed");
    s.cx = r.num("stimulus", "cx");
    s.cy = r.num("stimulus", "cy");
  } else if (kind == "points") {
    s.kind = StimulusKind::Points;
    s.points = parse_points(r, r.str("stimulus", "points"));
  } else {
    r.fail("stimulus", "kind", "expected circle, koffka, avocado or points");
  }

  if (r.has_section("transform")) {
    StimulusTransform t;
    if (r.has("transform", "reflection_angle")) t.reflection_angle = r.num("transform", "reflection_angle");
    t.similarity.dtheta = r.num("transform", "rotation");
    t.similarity.a = r.num("transform", "scale");
    t.similarity.dx = r.num("transform", "tx");
    t.similarity.dy = r.num("transform", "ty");
    c.transform = t;
  }
  r.reject_unused();
  try {
    c.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("invalid configuration: ") + e.what(), "", 0);
  }
  return c;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'", "", 0);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_experiment_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& c) {
  std::ostringstream o;
  o << "[grid]\n"
    << "n = " << c.grid.n << "\n"
    << "p = " << fmt(c.grid.p) << "\n\n";
  o << "[freqs]\n"
    << "K = " << c.freqs.max_abs_angular() << "\n"
    << "omega_max = " << fmt(-c.freqs.radial.front()) << "\n"
    << "omega_step = " << fmt(c.freqs.d_omega()) << "\n"
    << "alpha_rho = " << fmt(c.freqs.alpha_rho) << "\n"
    << "alpha_r = " << fmt(c.freqs.alpha_r) << "\n"
    << "taper = " << (c.taper == Taper::Fejer ? "fejer" : "none") << "\n\n";
  o << "[polar]\n"
    << "n_theta = " << c.polar.n_phi << "\n"
    << "n_speed = " << c.polar.n_logrho << "\n"
    << "log_speed_min = " << fmt(c.polar.logrho_min) << "\n"
    << "log_speed_max = " << fmt(c.polar.logrho_max) << "\n\n";
  o << "[filter]\n"
    << "n_phi = " << c.filter_position.n_phi << "\n"
    << "n_logrho = " << c.filter_position.n_logrho << "\n"
    << "log_rho_min = " << fmt(c.filter_position.logrho_min) << "\n"
    << "log_rho_max = " << fmt(c.filter_position.logrho_max) << "\n\n";
  o << "[process]\n"
    << "T = " << fmt(c.process.T) << "\n"
    << "tau = " << fmt(c.process.tau) << "\n"
    << "corner_weight = " << fmt(c.process.corner_weight) << "\n"
    << "n_particles = " << c.process.n_particles << "\n"
    << "step = " << fmt(c.process.step) << "\n"
    << "max_length = " << fmt(c.process.max_length) << "\n"
    << "seed = " << c.process.seed << "\n\n";
  o << "[bias]\n"
    << "sigma_rho = " << fmt(c.bias.sigma_rho) << "\n"
    << "sigma_r = " << fmt(c.bias.sigma_r) << "\n"
    << "gamma = " << fmt(c.bias.gamma) << "\n"
    << "sigma_theta = " << fmt(c.bias.sigma_theta) << "\n\n";
  o << "[run]\n"
    << "iterations = " << c.iterations << "\n\n";
  const StimulusSpec& s = c.stimulus;
  o << "[stimulus]\n";
  switch (s.kind) {
    case StimulusKind::Circle:
      o << "kind = circle\nn_dots = " << s.n_dots << "\nradius = " << fmt(s.radius) << "\ncx = " << fmt(s.cx)
        << "\ncy = " << fmt(s.cy) << "\n";
      break;
    case StimulusKind::Koffka:
      o << "kind = koffka\narm_distance = " << fmt(s.arm_distance) << "\narm_width = " << fmt(s.arm_width)
        << "\ncx = " << fmt(s.cx) << "\ncy = " << fmt(s.cy) << "\n";
      break;
    case StimulusKind::Avocado:
      o << "kind = avocado\ncontour_points = " << s.contour_points << "\nnoise_points = " << s.noise_points
        << "\nsize = " << fmt(s.size) << "\nnoise_seed = " << s.noise_seed << "\ncx = " << fmt(s.cx)
        << "\ncy = " << fmt(s.cy) << "\n";
      break;
    case StimulusKind::Points: {
      o << "kind = points\npoints = ";
      for (std::size_t i = 0; i < s.points.size(); ++i) {
        if (i) o << "; ";
        o << fmt(s.points[i].x) << "," << fmt(s.points[i].y);
        if (s.points[i].arm_theta) o << "," << fmt(*s.points[i].arm_theta);
      }
      o << "\n";
      break;
    }
  }
  if (c.transform) {
    o << "\n[transform]\n";
    if (c.transform->reflection_angle) o << "reflection_angle = " << fmt(*c.transform->reflection_angle) << "\n";
    o << "rotation = " << fmt(c.transform->similarity.dtheta) << "\n"
      << "scale = " << fmt(c.transform->similarity.a) << "\n"
      << "tx = " << fmt(c.transform->similarity.dx) << "\n"
      << "ty = " << fmt(c.transform->similarity.dy) << "\n";
  }
  return o.str();
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : serialize_config(cfg)) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace pw
