#pragma once

#include "qlm/electron.hpp"

#include <optional>
#include <string>
#include <vector>

namespace qlm {

enum class SolverChoice { parametric, joint, both };
enum class FieldPath { grid, gaussian, both };

struct ElectronInit {
    double center = 0.0;
    double width = 1.0;
    double momentum = 0.0;
};

struct GridConfig {
    double x_min = -40.0;
    double x_max = 40.0;
    int x_points = 512;
    double q_half_width = 10.0;
    int q_points = 128;
};

struct TimeConfig {
    double t_end = 0.0;
    double dt = 0.0; // 0 = automatic step policy
};

struct OutputConfig {
    std::string directory = "out";
    int cadence = 32; // records per optical cycle of the slowest mode
};

// Flat sections/key=value scenario description. Per mode either beta or the
// quantization volume is given; the other is derived. All quantities in
// atomic units.
struct ScenarioConfig {
    std::vector<ModeSpec> modes;
    std::vector<double> mode_volumes; // 0 = beta given directly
    PotentialSpec potential;
    ElectronInit electron;
    GridConfig grid;
    TimeConfig time;
    SolverChoice solver = SolverChoice::parametric;
    FieldPath field_path = FieldPath::gaussian;
    bool strong_field = true; // drop the sine (local-substitution) term
    std::vector<double> sweep; // optional beta sweep
    OutputConfig output;

    // Collects every violation and throws one validation_error naming them all.
    void validate() const;

    std::vector<QuadratureGrid> quadrature_grids() const;
    SpatialGrid spatial_grid() const;
    double slowest_period() const;
    double step() const; // dt or the automatic policy
};

ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::string& path);
std::string serialize_config(const ScenarioConfig& cfg);

} // namespace qlm
