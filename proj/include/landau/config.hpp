#pragma once

#include <string>
#include <vector>

#include "landau/solver.hpp"

namespace landau {

enum class InitialDataKind { maxwellian, bump_sum, file };

/// Full experiment configuration: solver settings plus grid, initial data,
/// output and verification controls. Every field has a default except gamma
/// and t_end.
struct RunConfig {
    SolverConfig solver;

    int dim_x = 0;
    int n_x = 1;
    double l_x = 1.0;
    int n_v = 16;
    double l_v = 4.0;

    InitialDataKind init = InitialDataKind::maxwellian;
    std::string init_file;
    double maxwell_c1 = 1.0;
    double maxwell_c2 = 1.0;
    int bump_count = 2;
    double bump_amp = 1.0;
    double bump_width = 0.8;
    double bump_radius = 1.5;
    double bump_x_mod = 0.0; // amplitude of a (1 + cos) modulation along x_1

    std::string out_dir = "out";

    PhaseGrid grid() const;
    DistributionField initial_data() const;
};

struct ParseResult {
    bool ok = false;
    RunConfig config;
    std::vector<std::string> errors;
};

/// "key = value" lines, '#' comments, unknown keys are errors; returns either
/// a fully validated config or the list of all violations.
ParseResult parse_config(const std::string& text);
ParseResult parse_config_file(const std::string& path);

}  // namespace landau
