#pragma once

// Serialization of reports, tables and fits. JSON doubles are written in
// shortest round-trip form, so identical inputs give byte-identical files.

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "entamp/leakage.hpp"
#include "entamp/noise.hpp"
#include "entamp/sweep.hpp"

namespace entamp {

using Json = nlohmann::ordered_json;

Json to_json(const GhzReport& r);
Json to_json(const McResult& r);
Json to_json(const LinearFit& f);
Json to_json(const ScalingReport& r);
Json to_json(const ParameterSet& p);

// omega_s, g^2 and the mean photon number of every drive step.
Json derived_quantities(const CavityConfig& cfg, const ProtocolSchedule& schedule);

// Table CSV with a header naming the config keys (N, eta, kappa_mhz, ...).
// kappa_mhz, gamma_mhz, ideal_boundary and F_ref are optional columns.
std::vector<ParameterSet> read_parameter_table(std::istream& in, const std::string& source);
std::vector<ParameterSet> read_parameter_table(const std::string& path);

// One row per point: inputs, then F, survival, p_decay, QFI, F_ref and error.
// Fidelities are rounded to 3 decimals in the F3 column.
void write_sweep_csv(std::ostream& out, const std::vector<SweepPoint>& points);

void write_populations_csv(std::ostream& out, const std::vector<RVector>& populations);

void write_leakage_csv(std::ostream& out, const std::vector<LeakageResult>& rows);

// Creates parent directories and writes `text` to `path`.
void write_file(const std::string& path, const std::string& text);

// Shortest text that reads back to the same double.
std::string format_double(double x);

}  // namespace entamp
