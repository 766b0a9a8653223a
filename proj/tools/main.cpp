// entamp command-line front end. See README.md for the subcommands.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "entamp/config.hpp"
#include "entamp/io.hpp"
#include "entamp/leakage.hpp"
#include "entamp/noise.hpp"
#include "entamp/sweep.hpp"

using namespace entamp;
namespace fs = std::filesystem;

namespace {

struct Common {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  int jobs = 0;
  bool json = false;
  std::optional<int> trials;
};

std::string default_table(const char* name) {
  return (fs::path(ENTAMP_DATA_DIR) / name).string();
}

RunConfig need_config(const Common& c) {
  if (c.config.empty()) throw ConfigError("--config: a config file is required");
  return load_config(c.config);
}

// Writes to the --out path when set; otherwise stdout gets it unless --json
// has already claimed stdout.
void emit(const Common& c, const std::string& text, const std::string& fallback_name = {}) {
  if (!c.out.empty()) {
    fs::path p = c.out;
    if (!fallback_name.empty() && (fs::is_directory(p) || c.out.back() == '/')) p /= fallback_name;
    write_file(p.string(), text);
  } else if (!c.json) {
    std::cout << text;
  }
}

void print_json(const Json& j) { std::cout << j.dump(2) << '\n'; }

std::vector<double> parse_list(const std::string& text, const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError(key + ": cannot parse '" + item + "'");
    }
  }
  return out;
}

// "a:b:n" (n evenly spaced values) or "x,y,z".
std::vector<double> parse_grid(const std::string& text, const std::string& key) {
  if (text.find(':') == std::string::npos) return parse_list(text, key);
  std::string spec = text;
  std::replace(spec.begin(), spec.end(), ':', ',');
  const auto v = parse_list(spec, key);
  if (v.size() != 3 || v[2] < 1 || v[2] != std::floor(v[2])) throw ConfigError(key + ": expected lo:hi:count");
  const int n = static_cast<int>(v[2]);
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = n == 1 ? v[0] : v[0] + (v[1] - v[0]) * i / (n - 1);
  return out;
}

int cmd_run(const Common& c, bool populations) {
  const RunConfig rc = need_config(c);
  const CavityConfig cfg = rc.cavity();
  const ProtocolSchedule s = rc.schedule();
  for (const auto& w : schedule_warnings(cfg, s)) std::cerr << "warning: " << w << '\n';
  const GhzReport r = make_report(run_protocol(cfg, s));
  Json j;
  j["command"] = "run";
  j["parameters"] = to_json(rc.params);
  j["derived"] = derived_quantities(cfg, s);
  j["report"] = to_json(r);
  const std::string text = j.dump(2) + "\n";
  const fs::path dir = c.out.empty() ? fs::path(rc.out_dir) : fs::path(c.out);
  write_file((dir / "report.json").string(), text);
  if (populations) {
    std::ostringstream csv;
    write_populations_csv(csv, step_populations(cfg, s));
    write_file((dir / "populations.csv").string(), csv.str());
  }
  if (c.json) {
    std::cout << text;
  } else {
    std::cout << "fidelity " << format_double(r.fidelity) << "  survival " << format_double(r.survival)
              << "  report " << (dir / "report.json").string() << '\n';
  }
  return 0;
}

int cmd_table(const Common& c, const std::string& table, bool parity) {
  const auto rows = read_parameter_table(table.empty() ? default_table("n_sweep.csv") : table);
  SweepOptions opts;
  opts.parity = parity;
  const auto points = run_table(rows, opts);
  std::ostringstream csv;
  write_sweep_csv(csv, points);
  emit(c, csv.str(), "table.csv");
  if (c.json) {
    Json arr = Json::array();
    for (const auto& p : points) {
      Json row = to_json(p.params);
      if (p.ok()) row["report"] = to_json(*p.report);
      else row["error"] = p.error;
      if (p.params.reference_fidelity) row["F_ref"] = *p.params.reference_fidelity;
      arr.push_back(row);
    }
    print_json(Json{{"command", "table"}, {"rows", arr}});
  }
  int failed = 0;
  for (const auto& p : points) {
    if (!p.ok()) {
      std::cerr << "row N=" << p.params.n_atoms << " eta=" << p.params.eta << " failed: " << p.error << '\n';
      ++failed;
    }
  }
  return failed ? 3 : 0;
}

int cmd_parity(const Common& c, const std::vector<std::string>& windows, int points) {
  const RunConfig rc = need_config(c);
  if (points < 2) throw ConfigError("--points: need at least 2");
  const DickeState psi = run_protocol(rc.cavity(), rc.schedule());
  std::vector<std::pair<double, double>> win;
  if (windows.empty()) {
    win = {{-0.03, 0.03}, {0.47, 0.53}};
  } else {
    for (const auto& w : windows) {
      const auto v = parse_list(w, "--window");
      if (v.size() != 2 || !(v[1] > v[0])) throw ConfigError("--window: expected lo,hi in units of pi");
      win.emplace_back(v[0], v[1]);
    }
  }
  std::ostringstream csv;
  csv << "window,theta,parity\n";
  Json jw = Json::array();
  for (std::size_t w = 0; w < win.size(); ++w) {
    std::vector<double> th(points);
    for (int i = 0; i < points; ++i) {
      th[i] = std::numbers::pi * (win[w].first + (win[w].second - win[w].first) * i / (points - 1));
    }
    const auto p = parity_scan(psi, th);
    for (int i = 0; i < points; ++i) csv << w << ',' << format_double(th[i]) << ',' << format_double(p[i]) << '\n';
    jw.push_back({{"theta", th}, {"parity", p}});
  }
  emit(c, csv.str(), "parity.csv");
  if (c.json) {
    const GhzReport r = make_report(psi);
    print_json({{"command", "parity"},
                {"period", kTwoPi / psi.n_atoms()},
                {"visibility", r.parity_visibility},
                {"pole_contrast", r.survival > 0 ? 2.0 * std::abs(r.rho_pm) / r.survival : 0.0},
                {"windows", jw}});
  }
  return 0;
}

int cmd_husimi(const Common& c, int step, int n_theta, int n_phi, const std::string& format) {
  const RunConfig rc = need_config(c);
  const CavityConfig cfg = rc.cavity();
  ProtocolSchedule s = rc.schedule();
  if (step < 0 || step > static_cast<int>(s.steps.size())) throw ConfigError("--step: out of range");
  s.steps.resize(step);
  const HusimiMap map = husimi_map(run_protocol(cfg, s), n_theta, n_phi);
  const fs::path dir = c.out.empty() ? fs::path(rc.out_dir) : fs::path(c.out);
  fs::create_directories(dir);
  const std::string base = "husimi_step" + std::to_string(step);
  std::string path;
  if (format == "csv") {
    path = (dir / (base + ".csv")).string();
    write_husimi_csv(map, path);
  } else if (format == "bin") {
    path = (dir / (base + ".bin")).string();
    write_husimi_binary(map, path);
  } else {
    throw ConfigError("--format: expected csv or bin");
  }
  if (c.json) {
    print_json({{"command", "husimi"}, {"path", path}, {"n_theta", n_theta}, {"n_phi", n_phi},
                {"integral", map.integral()}});
  } else {
    std::cout << path << '\n';
  }
  return 0;
}

int cmd_fisher(const Common& c, const std::string& table) {
  std::vector<ParameterSet> rows;
  if (!table.empty()) rows = read_parameter_table(table);
  else rows = {need_config(c).params};
  const auto points = run_table(rows);
  std::ostringstream csv;
  csv << "N,eta,qfi_normalized,qfi_weighted,survival\n";
  Json arr = Json::array();
  int failed = 0;
  for (const auto& p : points) {
    if (!p.ok()) {
      std::cerr << "row N=" << p.params.n_atoms << " failed: " << p.error << '\n';
      ++failed;
      continue;
    }
    csv << p.params.n_atoms << ',' << format_double(p.params.eta) << ',' << format_double(p.report->qfi_normalized)
        << ',' << format_double(p.report->qfi_weighted) << ',' << format_double(p.report->survival) << '\n';
    arr.push_back({{"N", p.params.n_atoms}, {"eta", p.params.eta}, {"qfi_normalized", p.report->qfi_normalized},
                   {"qfi_weighted", p.report->qfi_weighted}});
  }
  emit(c, csv.str(), "fisher.csv");
  if (c.json) print_json({{"command", "fisher"}, {"rows", arr}});
  return failed ? 3 : 0;
}

int cmd_noise(const Common& c, const std::string& table, const std::string& n_list,
              const std::vector<std::string>& channels_in) {
  std::vector<ParameterSet> rows;
  NoiseConfig base;
  if (!c.config.empty()) {
    const RunConfig rc = need_config(c);
    base = rc.noise;
    if (table.empty()) rows = {rc.params};
  }
  if (!table.empty() || rows.empty()) {
    const auto all = read_parameter_table(table.empty() ? default_table("n_sweep.csv") : table);
    const auto wanted = parse_list(n_list, "--n-list");
    for (const double n : wanted) {
      const auto it = std::find_if(all.begin(), all.end(), [n](const ParameterSet& p) { return p.n_atoms == n; });
      if (it == all.end()) throw ConfigError("--n-list: no table row with N = " + format_double(n));
      rows.push_back(*it);
    }
  }
  if (c.trials) base.trials = *c.trials;
  if (c.seed) base.seed = *c.seed;

  const std::vector<std::string> channels =
      channels_in.empty() ? std::vector<std::string>{"timing", "shot", "jitter", "combined"} : channels_in;
  std::ostringstream csv;
  csv << "N,channel,fidelity,std_error,trials\n";
  Json out = Json::array();
  for (const auto& row : rows) {
    const CavityConfig cfg = row.cavity();
    const ProtocolSchedule s = row.schedule();
    Json jr;
    jr["N"] = row.n_atoms;
    jr["noiseless"] = ghz_fidelity(run_protocol(cfg, s)).fidelity;
    for (const auto& ch : channels) {
      NoiseConfig n;
      if (ch == "timing") n = NoiseConfig::timing_amplitude();
      else if (ch == "shot") n = NoiseConfig::shot_inhomogeneous();
      else if (ch == "jitter") n = NoiseConfig::jitter();
      else if (ch == "combined") n = NoiseConfig::combined();
      else throw ConfigError("--channel: unknown channel '" + ch + "'");
      n.trials = base.trials;
      n.seed = base.seed;
      n.photon_scale = base.photon_scale;
      const McResult r = mc_fidelity(cfg, s, n);
      csv << row.n_atoms << ',' << ch << ',' << format_double(r.mean.fidelity) << ','
          << format_double(r.std_error) << ',' << r.trials << '\n';
      jr[ch] = to_json(r);
    }
    out.push_back(jr);
  }
  emit(c, csv.str(), "noise_mc.csv");
  if (c.json) print_json({{"command", "noise-mc"}, {"seed", base.seed}, {"rows", out}});
  return 0;
}

int cmd_leakage(const Common& c, const std::string& mirrors, const std::string& grid, bool step4,
                bool multiplicative) {
  const RunConfig rc = need_config(c);
  const LeakageSettings& ls = rc.leakage;
  MirrorConfig m = MirrorConfig::from_ppm(ls.mirror1_ppm, ls.mirror2_ppm);
  if (!mirrors.empty()) {
    const auto v = parse_list(mirrors, "--mirrors");
    if (v.size() != 2) throw ConfigError("--mirrors: expected ppm1,ppm2");
    m = MirrorConfig::from_ppm(v[0], v[1]);
  }
  std::vector<double> kgrid;
  if (!grid.empty()) {
    kgrid = parse_grid(grid, "--kbar-grid");
  } else {
    kgrid = parse_grid(format_double(ls.kbar1_min) + ":" + format_double(ls.kbar1_max) + ":" +
                           std::to_string(ls.kbar1_points),
                       "leakage.kbar1_points");
  }
  LeakageOptions opts;
  opts.trials = c.trials.value_or(ls.trials);
  opts.seed = c.seed.value_or(rc.seed);
  opts.step4_leakage = step4 || ls.step4;
  opts.simultaneous = !multiplicative;
  const auto rows = leakage_tradeoff(rc.cavity(), rc.schedule(), m, kgrid, opts);
  std::ostringstream csv;
  write_leakage_csv(csv, rows);
  emit(c, csv.str(), "leakage.csv");
  const auto best = std::max_element(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return a.fidelity_overall < b.fidelity_overall;
  });
  if (c.json) {
    print_json({{"command", "leakage"},
                {"transmission_factor", m.transmission_factor()},
                {"optimum", {{"kbar1", best->kbar1}, {"fidelity_overall", best->fidelity_overall}}}});
  } else if (!c.out.empty()) {
    std::cout << "optimum kbar1 " << format_double(best->kbar1) << " fidelity "
              << format_double(best->fidelity_overall) << '\n';
  }
  return 0;
}

int cmd_fit_scaling(const Common& c, const std::string& table) {
  const auto rows = read_parameter_table(table.empty() ? default_table("n_sweep.csv") : table);
  const auto points = run_table(rows);
  const ScalingReport r = fit_scalings(points);
  Json j = {{"command", "fit-scaling"}, {"fits", to_json(r)}};
  const std::string text = j.dump(2) + "\n";
  if (!c.out.empty()) emit(c, text, "fit_scaling.json");
  std::cout << text;
  return 0;
}

int cmd_fit_empirical(const Common& c, const std::string& table, const std::string& by_eta,
                      const std::string& fixed) {
  std::vector<ParameterSet> rows;
  if (!table.empty()) {
    rows = read_parameter_table(table);
  } else {
    const auto by_n = read_parameter_table(default_table("n_sweep.csv"));
    auto by_eta_rows = read_parameter_table(by_eta.empty() ? default_table("eta_sweep.csv") : by_eta);
    std::erase_if(by_eta_rows, [](const ParameterSet& p) { return p.eta < 200.0; });
    std::vector<int> ns;
    for (double v : parse_list(fixed, "--fixed-n")) ns.push_back(static_cast<int>(v));
    rows = empirical_grid(by_n, by_eta_rows, ns);
  }
  const auto points = run_table(rows);
  const LinearFit f = fit_empirical(points);
  Json j = {{"command", "fit-empirical"}, {"fit", to_json(f)}};
  const std::string text = j.dump(2) + "\n";
  if (!c.out.empty()) emit(c, text, "fit_empirical.json");
  std::cout << text;
  return 0;
}

int cmd_optimize(const Common& c, int max_evals, int seeds, double time_box, double phase_box,
                 double drive_box) {
  const RunConfig rc = need_config(c);
  OptimizeOptions o;
  o.max_evaluations = max_evals;
  o.time_box = time_box;
  o.phase_box = phase_box;
  o.drive_box = drive_box;
  std::vector<std::uint64_t> s;
  const std::uint64_t base = c.seed.value_or(rc.seed);
  for (int i = 0; i < std::max(1, seeds); ++i) s.push_back(base + static_cast<std::uint64_t>(i));
  const OptimizeResult r = optimize_multistart(rc.cavity(), rc.params.protocol(), s, o);
  ParameterSet best = rc.params;
  best.t_us = r.params.t;
  best.phi3 = r.params.phi3;
  best.phi4 = r.params.phi4;
  best.delta2_mhz = to_mhz(r.params.delta2);
  best.delta4_mhz = to_mhz(r.params.delta4);
  Json j = {{"command", "optimize"},
            {"initial_fidelity", r.initial_fidelity},
            {"fidelity", r.fidelity},
            {"evaluations", r.evaluations},
            {"parameters", to_json(best)}};
  const std::string text = j.dump(2) + "\n";
  if (!c.out.empty()) emit(c, text, "optimize.json");
  std::cout << text;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"entamp: GHZ-state creation by entanglement amplification in a cavity"};
  app.require_subcommand(1);
  Common c;
  if (const char* env = std::getenv("ENTAMP_JOBS")) {
    try {
      c.jobs = std::stoi(env);
    } catch (const std::exception&) {
      std::cerr << "error: ENTAMP_JOBS: expected an integer\n";
      return 2;
    }
  }
  std::uint64_t seed = 0;
  int trials = 0;
  app.add_option("--config", c.config, "Run configuration file");
  app.add_option("--out", c.out, "Output file or directory");
  auto* seed_opt = app.add_option("--seed", seed, "Base RNG seed");
  app.add_option("--jobs", c.jobs, "Worker cap (default: ENTAMP_JOBS or all cores)");
  app.add_flag("--json", c.json, "Print a machine-readable JSON summary to stdout");
  auto* trials_opt = app.add_option("--trials", trials, "Monte Carlo trials")->check(CLI::PositiveNumber);
  app.fallthrough();

  auto* run = app.add_subcommand("run", "Propagate one schedule and write a report");
  bool populations = false;
  run->add_flag("--populations", populations, "Also write per-step populations");

  auto* table = app.add_subcommand("table", "Run every row of a parameter table");
  std::string table_path;
  bool parity_col = false;
  table->add_option("--table", table_path, "Parameter CSV (default: bundled N-sweep rows)");
  table->add_flag("--parity", parity_col, "Also compute parity visibility");

  auto* parity = app.add_subcommand("parity", "Parity scan of the final state");
  std::vector<std::string> windows;
  int parity_points = 201;
  parity->add_option("--window", windows, "lo,hi in units of pi (repeatable)");
  parity->add_option("--points", parity_points, "Samples per window");

  auto* husimi = app.add_subcommand("husimi", "Husimi-Q map after a given step");
  int h_step = 4, h_theta = 256, h_phi = 512;
  std::string h_format = "csv";
  husimi->add_option("--step", h_step, "Number of steps applied (0 = initial state)");
  husimi->add_option("--theta-points", h_theta, "Grid rows");
  husimi->add_option("--phi-points", h_phi, "Grid columns");
  husimi->add_option("--format", h_format, "csv or bin");

  auto* fisher = app.add_subcommand("fisher", "Quantum Fisher information");
  std::string fisher_table;
  fisher->add_option("--table", fisher_table, "Parameter CSV (default: the --config point)");

  auto* noise = app.add_subcommand("noise-mc", "Monte Carlo noise study");
  std::string noise_table, n_list = "100,500,1000,2000";
  std::vector<std::string> channels;
  noise->add_option("--table", noise_table, "Parameter CSV to pick rows from");
  noise->add_option("--n-list", n_list, "Atom numbers to run from the table");
  noise->add_option("--channel", channels, "timing, shot, jitter or combined (repeatable)");

  auto* leak = app.add_subcommand("leakage", "Leakage / shot-noise tradeoff");
  std::string mirrors, kgrid;
  bool step4 = false, multiplicative = false;
  leak->add_option("--mirrors", mirrors, "Mirror power transmissions ppm1,ppm2");
  leak->add_option("--kbar-grid", kgrid, "lo:hi:count or a comma list of kbar1 values");
  leak->add_flag("--step4", step4, "Also apply the photon-count POVM after the last drive step");
  leak->add_flag("--multiplicative", multiplicative, "Combine leakage and shot noise as a product");

  auto* fscale = app.add_subcommand("fit-scaling", "Power-law fits over a table");
  std::string fs_table;
  fscale->add_option("--table", fs_table, "Parameter CSV (default: bundled N-sweep rows)");

  auto* femp = app.add_subcommand("fit-empirical", "Fit F against ln(N)/eta");
  std::string fe_table, fe_eta, fe_fixed = "100,400,800,1200";
  femp->add_option("--table", fe_table, "Explicit parameter CSV of all points");
  femp->add_option("--eta-table", fe_eta, "(eta, Delta) rows for the fixed-N families");
  femp->add_option("--fixed-n", fe_fixed, "Atom numbers of the fixed-N families");

  auto* opt = app.add_subcommand("optimize", "Nelder-Mead polish of a schedule");
  int max_evals = 400, n_seeds = 1;
  double time_box = 0.1, phase_box = 0.2, drive_box = 0.2;
  opt->add_option("--max-evals", max_evals, "Objective evaluations per seed");
  opt->add_option("--seeds", n_seeds, "Independent starts");
  opt->add_option("--time-box", time_box, "Relative half-width for t1..t4");
  opt->add_option("--phase-box", phase_box, "Half-width for phi3, phi4 (rad)");
  opt->add_option("--drive-box", drive_box, "Relative half-width for delta2, delta4");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (seed_opt->count()) c.seed = seed;
  if (trials_opt->count()) c.trials = trials;

  try {
    if (c.jobs < 0) throw ConfigError("--jobs: must be >= 0");
    set_max_jobs(c.jobs);
    if (run->parsed()) return cmd_run(c, populations);
    if (table->parsed()) return cmd_table(c, table_path, parity_col);
    if (parity->parsed()) return cmd_parity(c, windows, parity_points);
    if (husimi->parsed()) return cmd_husimi(c, h_step, h_theta, h_phi, h_format);
    if (fisher->parsed()) return cmd_fisher(c, fisher_table);
    if (noise->parsed()) return cmd_noise(c, noise_table, n_list, channels);
    if (leak->parsed()) return cmd_leakage(c, mirrors, kgrid, step4, multiplicative);
    if (fscale->parsed()) return cmd_fit_scaling(c, fs_table);
    if (femp->parsed()) return cmd_fit_empirical(c, fe_table, fe_eta, fe_fixed);
    if (opt->parsed()) return cmd_optimize(c, max_evals, n_seeds, time_box, phase_box, drive_box);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const PropagationError& e) {
    std::cerr << "propagation failure: " << e.what() << '\n';
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
