#include "qlab/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

namespace qlab {
namespace {

using Setter = std::function<void(const std::string&)>;

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& text) {
  std::string t = trim(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    throw ConfigError("expected a number, got '" + text + "'");
  }
  if (used != t.size()) throw ConfigError("expected a number, got '" + text + "'");
  return v;
}

long long parse_integer(const std::string& text) {
  std::string t = trim(text);
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(t, &used);
  } catch (const std::exception&) {
    throw ConfigError("expected an integer, got '" + text + "'");
  }
  if (used != t.size()) throw ConfigError("expected an integer, got '" + text + "'");
  return v;
}

std::vector<std::string> split(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  if (out.empty()) throw ConfigError("empty list");
  return out;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& s : split(text)) out.push_back(parse_double(s));
  return out;
}

template <class T>
std::array<T, 4> parse_quad(const std::string& text) {
  auto items = split(text);
  if (items.size() != 4) throw ConfigError("expected four comma-separated entries, got '" + text + "'");
  std::array<T, 4> out{};
  for (int i = 0; i < 4; ++i) {
    if constexpr (std::is_integral_v<T>) out[i] = static_cast<T>(parse_integer(items[i]));
    else out[i] = parse_double(items[i]);
  }
  return out;
}

Setter real(double& x) {
  return [&x](const std::string& v) { x = parse_double(v); };
}
Setter integer(int& x) {
  return [&x](const std::string& v) {
    long long n = parse_integer(v);
    if (n < std::numeric_limits<int>::min() || n > std::numeric_limits<int>::max())
      throw ConfigError("integer out of range: " + v);
    x = static_cast<int>(n);
  };
}
Setter list(std::vector<double>& x) {
  return [&x](const std::string& v) { x = parse_list(v); };
}

std::map<std::string, Setter> setters(Config& c) {
  std::map<std::string, Setter> m;
  m["general.seed"] = [&c](const std::string& v) {
    long long n = parse_integer(v);
    if (n < 0) throw ConfigError("seed must be non-negative");
    c.seed = static_cast<std::uint64_t>(n);
  };

  m["bubble-check.samples"] = integer(c.bubble.samples);
  m["bubble-check.max_radius"] = real(c.bubble.max_radius);
  m["bubble-check.height_min"] = real(c.bubble.height_min);
  m["bubble-check.height_max"] = real(c.bubble.height_max);
  m["bubble-check.tolerance"] = real(c.bubble.tolerance);

  m["kernel-check.samples"] = integer(c.kernel.samples);
  m["kernel-check.max_radius"] = real(c.kernel.max_radius);
  m["kernel-check.tolerance"] = real(c.kernel.tolerance);

  m["mass.height"] = real(c.mass.height);
  m["mass.radius"] = real(c.mass.radius);
  m["mass.band"] = real(c.mass.band);

  m["pohozaev.radius"] = real(c.pohozaev.radius);
  m["pohozaev.tolerance"] = real(c.pohozaev.tolerance);
  m["pohozaev.curved_eps"] = list(c.pohozaev.curved_eps);
  m["pohozaev.curved_radius"] = real(c.pohozaev.curved_radius);
  m["pohozaev.slope_band"] = real(c.pohozaev.slope_band);
  m["pohozaev.radial_cases"] = integer(c.pohozaev.radial_cases);
  m["pohozaev.radial_tolerance"] = real(c.pohozaev.radial_tolerance);

  m["green-fit.modes"] = integer(c.green.modes);
  m["green-fit.side"] = real(c.green.side);
  m["green-fit.tolerance"] = real(c.green.tolerance);
  m["green-fit.symmetry_tolerance"] = real(c.green.symmetry_tolerance);

  m["represent.modes"] = integer(c.represent.modes);
  m["represent.fields"] = integer(c.represent.fields);
  m["represent.tolerance"] = real(c.represent.tolerance);

  m["cnc.jets"] = integer(c.cnc.jets);

  m["distance.eps"] = list(c.distance.eps);
  m["distance.c_band"] = real(c.distance.c_band);
  m["distance.exponent_band"] = real(c.distance.exponent_band);

  m["longrange.eps"] = real(c.longrange.eps);
  m["longrange.height"] = real(c.longrange.height);
  m["longrange.delta1"] = real(c.longrange.delta1);
  m["longrange.slope_band"] = real(c.longrange.slope_band);
  m["longrange.ring_band"] = real(c.longrange.ring_band);

  auto& s = c.sequence;
  m["sequence.eps_list"] = list(s.eps_list);
  m["sequence.height"] = real(s.height);
  m["sequence.correction"] = [&s](const std::string& v) {
    try {
      s.correction = correction_kind_from_string(trim(v));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  };
  m["sequence.amplitude"] = real(s.correction_amplitude);
  m["sequence.wave"] = [&s](const std::string& v) { s.correction_wave = parse_quad<double>(v); };
  m["sequence.delta1"] = real(s.delta1);
  m["sequence.tau"] = real(s.tau);
  m["sequence.sigma"] = real(s.sigma);
  m["sequence.n_r"] = integer(s.n_r);
  m["sequence.n_t"] = integer(s.n_t);
  m["sequence.n_phi"] = integer(s.n_phi);

  m["alpha-sweep.band"] = real(c.alpha_band);
  m["alpha-sweep.eps_max"] = real(c.alpha_eps_max);
  m["mainest.ratio"] = real(c.mainest_ratio);

  m["vrate.side"] = real(c.vrate.side);
  m["vrate.modes"] = integer(c.vrate.modes);
  m["vrate.mode"] = [&c](const std::string& v) { c.vrate.mode = parse_quad<int>(v); };
  m["vrate.h0"] = real(c.vrate.h0);
  m["vrate.h_amplitude"] = real(c.vrate.h_amplitude);
  m["vrate.green_modes"] = integer(c.vrate.green_modes);
  m["vrate.tolerance"] = real(c.vrate.tolerance);
  m["vrate.eps"] = list(c.vrate.eps);
  return m;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

bool decreasing_positive(const std::vector<double>& v) {
  if (v.empty() || !(v.front() > 0.0)) return false;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] > 0.0 && v[i] < v[i - 1])) return false;
  return true;
}

}  // namespace

void Config::validate() const {
  require(bubble.samples > 0 && kernel.samples > 0, "sample counts must be positive");
  require(bubble.max_radius > 0 && kernel.max_radius > 0, "sampling radii must be positive");
  require(bubble.height_min >= kMinHeight && bubble.height_max >= bubble.height_min,
          "bubble heights must satisfy min_height <= height_min <= height_max");
  require(mass.height >= kMinHeight && mass.radius > 0 && mass.band > 0, "mass settings must be positive");
  require(pohozaev.radius > 0 && pohozaev.curved_radius > 0, "pohozaev radii must be positive");
  require(pohozaev.curved_eps.size() >= 2 && decreasing_positive(pohozaev.curved_eps),
          "pohozaev.curved_eps needs at least two strictly decreasing positive entries");
  require(pohozaev.radial_cases > 0, "pohozaev.radial_cases must be positive");
  require(green.modes >= 8 && green.modes % 2 == 0 && green.side > 0, "green-fit needs an even mode count >= 8");
  require(represent.modes >= 4 && represent.fields > 0, "represent settings out of range");
  require(cnc.jets > 0, "cnc.jets must be positive");
  require(distance.eps.size() >= 2 && decreasing_positive(distance.eps),
          "distance.eps needs at least two strictly decreasing positive entries");
  require(longrange.eps > 0 && longrange.eps < 1 && longrange.delta1 > 0 && longrange.height >= kMinHeight,
          "longrange settings out of range");
  require(alpha_band > 0 && alpha_eps_max > 0 && mainest_ratio >= 1, "alpha-sweep and mainest bands out of range");
  require(vrate.side > 0 && vrate.modes >= 2 && vrate.h0 > std::abs(vrate.h_amplitude) && vrate.green_modes >= 2,
          "vrate settings out of range (h0 must exceed |h_amplitude|)");
  require(vrate.mode != std::array<int, 4>{0, 0, 0, 0}, "vrate.mode must be nonzero");
  require(vrate.eps.empty() || decreasing_positive(vrate.eps), "vrate.eps must be strictly decreasing and positive");
  try {
    sequence.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("sequence: ") + e.what());
  }
}

Config parse_config(std::istream& in) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  Config c;
  auto table = setters(c);
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError("key '" + section + "' outside any section");
    for (const auto& [key, value] : body) {
      std::string name = section + "." + key;
      auto it = table.find(name);
      if (it == table.end()) throw ConfigError("unknown config key '" + name + "'");
      try {
        it->second(value.data());
      } catch (const ConfigError& e) {
        throw ConfigError(name + ": " + e.what());
      }
    }
  }
  c.validate();
  return c;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path + "'");
  return parse_config(in);
}

std::vector<std::string> config_keys() {
  Config c;
  std::vector<std::string> out;
  for (const auto& [k, _] : setters(c)) out.push_back(k);
  return out;
}

}  // namespace qlab
