#include "entamp/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>

namespace entamp {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

class Reader {
 public:
  explicit Reader(ConfigTable table) : table_(std::move(table)) {}

  std::optional<std::string> raw(const std::string& section, const std::string& key) {
    used_.insert(section + "." + key);
    const auto s = table_.find(section);
    if (s == table_.end()) return std::nullopt;
    const auto k = s->second.find(key);
    if (k == s->second.end()) return std::nullopt;
    return k->second;
  }

  double number(const std::string& section, const std::string& key, std::optional<double> def = {}) {
    const auto v = raw(section, key);
    if (!v) {
      if (def) return *def;
      throw ConfigError(section + "." + key + ": missing required key");
    }
    double x = 0.0;
    const auto res = std::from_chars(v->data(), v->data() + v->size(), x);
    if (res.ec != std::errc() || res.ptr != v->data() + v->size() || !std::isfinite(x)) {
      throw ConfigError(section + "." + key + ": expected a finite number, got '" + *v + "'");
    }
    return x;
  }

  long long integer(const std::string& section, const std::string& key,
                    std::optional<long long> def = {}) {
    const auto v = raw(section, key);
    if (!v) {
      if (def) return *def;
      throw ConfigError(section + "." + key + ": missing required key");
    }
    long long x = 0;
    const auto res = std::from_chars(v->data(), v->data() + v->size(), x);
    if (res.ec != std::errc() || res.ptr != v->data() + v->size()) {
      throw ConfigError(section + "." + key + ": expected an integer, got '" + *v + "'");
    }
    return x;
  }

  bool boolean(const std::string& section, const std::string& key, bool def) {
    const auto v = raw(section, key);
    if (!v) return def;
    if (*v == "true" || *v == "1") return true;
    if (*v == "false" || *v == "0") return false;
    throw ConfigError(section + "." + key + ": expected true or false, got '" + *v + "'");
  }

  std::string text(const std::string& section, const std::string& key, const std::string& def) {
    const auto v = raw(section, key);
    return v ? *v : def;
  }

  void reject_unknown() const {
    for (const auto& [section, keys] : table_) {
      for (const auto& [key, value] : keys) {
        if (!used_.count(section + "." + key)) {
          throw ConfigError(section + "." + key + ": unknown key");
        }
      }
    }
  }

 private:
  ConfigTable table_;
  std::set<std::string> used_;
};

}  // namespace

ConfigTable parse_table(std::istream& in, const std::string& source) {
  static const std::set<std::string> sections = {"system", "protocol", "noise", "leakage", "output"};
  ConfigTable table;
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string body = trim(strip_comment(line));
    if (body.empty()) continue;
    const std::string where = source + ":" + std::to_string(lineno);
    if (body.front() == '[') {
      if (body.back() != ']') throw ConfigError(where + ": malformed section header");
      section = trim(body.substr(1, body.size() - 2));
      if (!sections.count(section)) throw ConfigError(section + ": unknown section (" + where + ")");
      table[section];
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    if (section.empty()) throw ConfigError(where + ": key outside any section");
    const std::string key = trim(body.substr(0, eq));
    std::string value = trim(body.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    if (key.empty()) throw ConfigError(where + ": empty key");
    if (!table[section].emplace(key, value).second) {
      throw ConfigError(section + "." + key + ": duplicate key (" + where + ")");
    }
  }
  return table;
}

RunConfig parse_config(std::istream& in, const std::string& source) {
  Reader r(parse_table(in, source));
  RunConfig c;
  ParameterSet& p = c.params;

  const long long n = r.integer("system", "N");
  if (n < 1 || n > 1000000) throw ConfigError("system.N: must be a positive atom count");
  p.n_atoms = static_cast<int>(n);
  p.eta = r.number("system", "eta");
  p.kappa_mhz = r.number("system", "kappa_mhz");
  p.gamma_mhz = r.number("system", "gamma_mhz");
  p.delta_over_gamma = r.number("system", "delta_over_gamma");

  p.omega_mhz = r.number("protocol", "omega_mhz");
  for (int i = 0; i < 4; ++i) {
    const std::string key = "t" + std::to_string(i + 1) + "_us";
    p.t_us[i] = r.number("protocol", key);
    if (p.t_us[i] < 0.0) throw ConfigError("protocol." + key + ": duration must be >= 0");
  }
  p.phi3 = r.number("protocol", "phi3");
  p.phi4 = r.number("protocol", "phi4");
  p.delta2_mhz = r.number("protocol", "delta2_mhz");
  p.delta4_mhz = r.number("protocol", "delta4_mhz");
  p.ideal_boundary = r.boolean("protocol", "ideal_boundary", false);
  if (p.omega_mhz < 0.0) throw ConfigError("protocol.omega_mhz: Rabi rate must be >= 0");
  if (p.delta2_mhz == 0.0) throw ConfigError("protocol.delta2_mhz: drive must be nonzero");
  if (p.delta4_mhz == 0.0) throw ConfigError("protocol.delta4_mhz: drive must be nonzero");

  NoiseConfig& nz = c.noise;
  nz.sigma_t = r.number("noise", "sigma_t_us", nz.sigma_t);
  nz.sigma_amp = r.number("noise", "sigma_amp", nz.sigma_amp);
  nz.epsilon_rms = r.number("noise", "epsilon_rms", nz.epsilon_rms);
  nz.shot_noise = r.boolean("noise", "shot_noise", nz.shot_noise);
  nz.jitter_kappa = r.number("noise", "jitter_kappa", nz.jitter_kappa);
  nz.photon_scale = r.number("noise", "photon_scale", nz.photon_scale);
  nz.trials = static_cast<int>(r.integer("noise", "trials", nz.trials));
  nz.seed = static_cast<std::uint64_t>(r.integer("noise", "seed", 1));
  nz.validate();

  LeakageSettings& lk = c.leakage;
  lk.mirror1_ppm = r.number("leakage", "mirror1_ppm", lk.mirror1_ppm);
  lk.mirror2_ppm = r.number("leakage", "mirror2_ppm", lk.mirror2_ppm);
  lk.kbar1_min = r.number("leakage", "kbar1_min", lk.kbar1_min);
  lk.kbar1_max = r.number("leakage", "kbar1_max", lk.kbar1_max);
  lk.kbar1_points = static_cast<int>(r.integer("leakage", "kbar1_points", lk.kbar1_points));
  lk.trials = static_cast<int>(r.integer("leakage", "trials", lk.trials));
  lk.step4 = r.boolean("leakage", "step4", lk.step4);
  if (!(lk.mirror1_ppm > 0.0)) throw ConfigError("leakage.mirror1_ppm: must be positive");
  if (!(lk.mirror2_ppm > 0.0)) throw ConfigError("leakage.mirror2_ppm: must be positive");
  if (!(lk.kbar1_min > 0.0)) throw ConfigError("leakage.kbar1_min: must be positive");
  if (!(lk.kbar1_max >= lk.kbar1_min)) throw ConfigError("leakage.kbar1_max: must be >= kbar1_min");
  if (lk.kbar1_points < 1) throw ConfigError("leakage.kbar1_points: must be at least 1");
  if (lk.trials < 1) throw ConfigError("leakage.trials: must be at least 1");

  c.out_dir = r.text("output", "dir", c.out_dir);
  c.seed = static_cast<std::uint64_t>(r.integer("output", "seed", 1));

  r.reject_unknown();
  (void)p.cavity();  // eta > 0, Delta != 0, ... with the key named
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  return parse_config(in, path);
}

}  // namespace entamp
