#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "ness/criticality.hpp"
#include "ness/experiments.hpp"
#include "ness/lattice_model.hpp"
#include "ness/solver.hpp"

namespace ness {

using Json = nlohmann::ordered_json;

// Canonical model document:
// {
//   "generators": [{"span": N, "odd": [{"nu":..,"g":..}...],
//                   "even": [{"nu":..,"g":..}...]}],
//   "hamiltonian": {"terms": [{"offset":d,"pair":"oe","coeff":x}]},   (optional)
//   "chain": "infinite" | {"finite": {"L": n, "periodic": true}}
// }
// Phases in radians; unknown keys are rejected.
LatticeModel model_from_json(const Json& doc);
Json model_to_json(const LatticeModel& model);
LatticeModel load_model(const std::filesystem::path& path);

Json rootset_to_json(const RootSet& rs);
Json report_to_json(const CriticalityReport& report);
Json family_to_json(const CriticalSolutionFamily& family);

struct CsvOptions {
    bool metadata = true; // leading '# key=value' comment lines
};

void write_profile_csv(const std::filesystem::path& path, const CorrelationProfile& profile,
                       const CsvOptions& opts = {});
void write_matrix_csv(const std::filesystem::path& path, const CorrelationMatrix& gamma,
                      const CsvOptions& opts = {});
void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepPoint>& points,
                     const CsvOptions& opts = {});
void write_spectrum_csv(const std::filesystem::path& path, const std::vector<double>& phi,
                        const std::vector<double>& rate, const CsvOptions& opts = {});

std::vector<SweepPoint> read_sweep_csv(const std::filesystem::path& path);

} // namespace ness
