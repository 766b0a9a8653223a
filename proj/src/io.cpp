#include "entamp/io.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

namespace entamp {

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

Json to_json(const GhzReport& r) {
  Json j;
  j["rho_pp"] = r.rho_pp;
  j["rho_mm"] = r.rho_mm;
  j["rho_pm"] = {{"re", r.rho_pm.real()}, {"im", r.rho_pm.imag()}};
  j["fidelity"] = r.fidelity;
  j["survival"] = r.survival;
  j["p_decay"] = r.p_decay;
  j["qfi_normalized"] = r.qfi_normalized;
  j["qfi_weighted"] = r.qfi_weighted;
  j["parity_visibility"] = r.parity_visibility;
  return j;
}

Json to_json(const McResult& r) {
  Json j = to_json(r.mean);
  j["std_error"] = r.std_error;
  j["trials"] = r.trials;
  return j;
}

Json to_json(const LinearFit& f) {
  return {{"intercept", f.intercept}, {"slope", f.slope}, {"r_squared", f.r_squared}, {"points", f.points}};
}

Json to_json(const ScalingReport& r) {
  Json j;
  j["delta2_over_omega"] = to_json(r.delta2_over_omega);
  j["delta4_over_omega"] = to_json(r.delta4_over_omega);
  j["omega_t2"] = to_json(r.omega_t2);
  j["omega_t3"] = to_json(r.omega_t3);
  j["pi_minus_omega_t1"] = to_json(r.pi_minus_omega_t1);
  j["pi_minus_omega_t4"] = to_json(r.pi_minus_omega_t4);
  j["p_decay_vs_ln_n"] = to_json(r.p_decay_vs_ln_n);
  return j;
}

Json to_json(const ParameterSet& p) {
  Json j;
  j["N"] = p.n_atoms;
  j["eta"] = p.eta;
  j["kappa_mhz"] = p.kappa_mhz;
  j["gamma_mhz"] = p.gamma_mhz;
  j["delta_over_gamma"] = p.delta_over_gamma;
  j["omega_mhz"] = p.omega_mhz;
  j["t_us"] = p.t_us;
  j["phi3"] = p.phi3;
  j["phi4"] = p.phi4;
  j["delta2_mhz"] = p.delta2_mhz;
  j["delta4_mhz"] = p.delta4_mhz;
  j["ideal_boundary"] = p.ideal_boundary;
  return j;
}

Json derived_quantities(const CavityConfig& cfg, const ProtocolSchedule& schedule) {
  Json j;
  j["omega_s_rad_per_us"] = cfg.omega_s();
  j["omega_s_mhz"] = to_mhz(cfg.omega_s());
  j["g_squared"] = cfg.g_squared();
  Json steps = Json::array();
  for (std::size_t i = 0; i < schedule.steps.size(); ++i) {
    const auto& st = schedule.steps[i];
    Json s;
    s["step"] = i + 1;
    s["mean_photons"] = st.drive ? mean_photons(*st.drive, cfg) : 0.0;
    steps.push_back(s);
  }
  j["steps"] = steps;
  return j;
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream s(line);
  while (std::getline(s, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string{} : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& text, const std::string& key, const std::string& where) {
  double x = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), x);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size() || !std::isfinite(x)) {
    throw ConfigError(key + ": expected a finite number, got '" + text + "' (" + where + ")");
  }
  return x;
}

}  // namespace

std::vector<ParameterSet> read_parameter_table(std::istream& in, const std::string& source) {
  std::string line;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    header = split_csv(line);
    break;
  }
  if (header.empty()) return {};
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;

  static const std::map<std::string, std::string> section = {
      {"N", "system"},          {"eta", "system"},        {"kappa_mhz", "system"},
      {"gamma_mhz", "system"},  {"delta_over_gamma", "system"}, {"omega_mhz", "protocol"},
      {"t1_us", "protocol"},    {"t2_us", "protocol"},    {"t3_us", "protocol"},
      {"t4_us", "protocol"},    {"phi3", "protocol"},     {"phi4", "protocol"},
      {"delta2_mhz", "protocol"}, {"delta4_mhz", "protocol"}, {"ideal_boundary", "protocol"},
      {"F_ref", "table"}};
  for (const auto& h : header) {
    if (!section.count(h)) throw ConfigError("table." + h + ": unknown column (" + source + ")");
  }
  for (const auto& [key, sec] : section) {
    const bool optional = key == "kappa_mhz" || key == "gamma_mhz" || key == "ideal_boundary" || key == "F_ref";
    if (!optional && !col.count(key)) {
      throw ConfigError(sec + "." + key + ": missing column (" + source + ")");
    }
  }

  std::vector<ParameterSet> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#' || line.find_first_not_of(" \t\r,") == std::string::npos) continue;
    const auto cells = split_csv(line);
    const std::string where = source + ":" + std::to_string(lineno);
    if (cells.size() != header.size()) throw ConfigError("table: wrong column count (" + where + ")");
    auto get = [&](const std::string& key) {
      return parse_number(cells[col.at(key)], section.at(key) + "." + key, where);
    };
    ParameterSet p;
    const double n = get("N");
    if (n < 1 || n != std::floor(n)) throw ConfigError("system.N: must be a positive integer (" + where + ")");
    p.n_atoms = static_cast<int>(n);
    p.eta = get("eta");
    if (col.count("kappa_mhz")) p.kappa_mhz = get("kappa_mhz");
    if (col.count("gamma_mhz")) p.gamma_mhz = get("gamma_mhz");
    p.delta_over_gamma = get("delta_over_gamma");
    p.omega_mhz = get("omega_mhz");
    for (int i = 0; i < 4; ++i) p.t_us[i] = get("t" + std::to_string(i + 1) + "_us");
    p.phi3 = get("phi3");
    p.phi4 = get("phi4");
    p.delta2_mhz = get("delta2_mhz");
    p.delta4_mhz = get("delta4_mhz");
    if (col.count("ideal_boundary")) p.ideal_boundary = get("ideal_boundary") != 0.0;
    if (col.count("F_ref") && !cells[col.at("F_ref")].empty()) p.reference_fidelity = get("F_ref");
    rows.push_back(p);
  }
  return rows;
}

std::vector<ParameterSet> read_parameter_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("table: cannot open '" + path + "'");
  return read_parameter_table(in, path);
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepPoint>& points) {
  out << "N,eta,delta_over_gamma,omega_mhz,t1_us,t2_us,t3_us,t4_us,phi3,phi4,delta2_mhz,delta4_mhz,"
         "F,F3,F_ref,survival,p_decay,qfi_normalized,qfi_weighted,parity_visibility,error\n";
  for (const auto& p : points) {
    const auto& s = p.params;
    out << s.n_atoms << ',' << format_double(s.eta) << ',' << format_double(s.delta_over_gamma) << ','
        << format_double(s.omega_mhz);
    for (double t : s.t_us) out << ',' << format_double(t);
    out << ',' << format_double(s.phi3) << ',' << format_double(s.phi4) << ','
        << format_double(s.delta2_mhz) << ',' << format_double(s.delta4_mhz) << ',';
    if (p.ok()) {
      const auto& r = *p.report;
      std::ostringstream f3;
      f3 << std::fixed << std::setprecision(3) << r.fidelity;
      out << format_double(r.fidelity) << ',' << f3.str() << ',';
      if (s.reference_fidelity) out << format_double(*s.reference_fidelity);
      out << ',' << format_double(r.survival) << ',' << format_double(r.p_decay) << ','
          << format_double(r.qfi_normalized) << ',' << format_double(r.qfi_weighted) << ','
          << format_double(r.parity_visibility) << ",\n";
    } else {
      out << ",,";
      if (s.reference_fidelity) out << format_double(*s.reference_fidelity);
      std::string msg = p.error;
      for (auto& c : msg) {
        if (c == ',' || c == '\n') c = ';';
      }
      out << ",,,,,," << msg << '\n';
    }
  }
}

void write_populations_csv(std::ostream& out, const std::vector<RVector>& populations) {
  out << "n";
  for (std::size_t k = 0; k < populations.size(); ++k) out << ",after_step_" << k;
  out << '\n';
  if (populations.empty()) return;
  for (Eigen::Index n = 0; n < populations.front().size(); ++n) {
    out << n;
    for (const auto& p : populations) out << ',' << format_double(p[n]);
    out << '\n';
  }
}

void write_leakage_csv(std::ostream& out, const std::vector<LeakageResult>& rows) {
  out << "kbar1,kbar1_transmitted,kbar2_transmitted,fidelity_leak,fidelity_shot,fidelity_overall,"
         "fidelity_multiplicative,std_error_overall,completeness_error,branches\n";
  for (const auto& r : rows) {
    out << format_double(r.kbar1) << ',' << format_double(r.kbar.size() > 1 ? r.kbar[1] : 0.0) << ','
        << format_double(r.kbar.size() > 2 ? r.kbar[2] : 0.0) << ',' << format_double(r.fidelity_leak)
        << ',' << format_double(r.fidelity_shot) << ',' << format_double(r.fidelity_overall) << ','
        << format_double(r.fidelity_multiplicative) << ',' << format_double(r.std_error_overall) << ','
        << format_double(r.completeness_error) << ',' << r.branches << '\n';
  }
}

void write_file(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

}  // namespace entamp
