#pragma once

// Run configuration files: [section] headers followed by key = value lines.
// '#' starts a comment, strings may be quoted. Every key is validated and
// errors name it as section.key.
//
//   [system]   N, eta, kappa_mhz, gamma_mhz, delta_over_gamma
//   [protocol] omega_mhz, t1_us..t4_us, phi3, phi4, delta2_mhz, delta4_mhz,
//              ideal_boundary (optional)
//   [noise]    sigma_t_us, sigma_amp, epsilon_rms, shot_noise, jitter_kappa,
//              photon_scale, trials, seed (all optional)
//   [leakage]  mirror1_ppm, mirror2_ppm, kbar1_min, kbar1_max, kbar1_points,
//              trials, step4 (all optional)
//   [output]   dir, seed (optional)
//
// Frequencies carrying an _mhz suffix are in MHz and multiplied by 2 pi.

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <string>

#include "entamp/leakage.hpp"
#include "entamp/noise.hpp"
#include "entamp/sweep.hpp"

namespace entamp {

struct LeakageSettings {
  double mirror1_ppm = 1.0;
  double mirror2_ppm = 1.0;
  double kbar1_min = 1.0;
  double kbar1_max = 40.0;
  int kbar1_points = 12;
  int trials = 200;
  bool step4 = false;
};

struct RunConfig {
  ParameterSet params;
  NoiseConfig noise;
  LeakageSettings leakage;
  std::string out_dir = ".";
  std::uint64_t seed = 1;

  CavityConfig cavity() const { return params.cavity(); }
  ProtocolSchedule schedule() const { return params.schedule(); }
};

// `source` only labels error messages.
RunConfig parse_config(std::istream& in, const std::string& source = "<config>");
RunConfig load_config(const std::string& path);

// Raw sectioned key-value table; duplicate keys and malformed lines throw
// ConfigError.
using ConfigTable = std::map<std::string, std::map<std::string, std::string>>;
ConfigTable parse_table(std::istream& in, const std::string& source);

}  // namespace entamp
