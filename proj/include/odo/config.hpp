#pragma once

#include <string>
#include <vector>

#include "odo/bath.hpp"
#include "odo/decomp.hpp"
#include "odo/propagator.hpp"
#include "odo/system.hpp"

namespace odo {

// Parsed and validated simulation configuration (strict schema: unknown keys
// are errors, messages name the offending field).
struct RunSpec {
    SystemSpec system;
    Matrix rho0;
    SpectralDensityModel bath_model = SpectralDensityModel::drude(1.0, 1.0);
    BathThermalState thermal;
    std::string decomposition_method; // matsubara | pade | prony | discrete
    int decomposition_terms = 0;
    std::string samples_file; // optional, prony input
    Side side = Side::single;
    int tier = 0;
    PropagationConfig propagation;
    int snapshot_count = 0;
    std::vector<std::string> observables;
    std::string output_dir;
};

RunSpec parse_config_file(const std::string& path);
RunSpec parse_config_text(const std::string& text);

// CLI drivers; exit codes 0 = ok, 2 = invalid config, 3 = numerical failure,
// 4 = capacity.
int run_simulation(const std::string& config_path);
int run_decompose(const std::string& config_path);

// Builds the decomposition a RunSpec asks for (certified) — shared by both
// drivers and by tests.
BathDecomposition build_decomposition(const RunSpec& spec);

} // namespace odo
