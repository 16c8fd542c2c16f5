#pragma once

#include "qlm/mode.hpp"

#include <vector>

namespace qlm {

struct QuadratureGrid {
    double q_min = 0.0;
    double q_max = 0.0;
    int n_points = 0;

    double spacing() const { return (q_max - q_min) / n_points; }
    double q(int i) const { return q_min + spacing() * i; }
    std::vector<double> points() const;
    void validate() const;

    // Centered at sqrt(2N). Half-width max(10, 6 + 4*sqrt(expected_squeeze));
    // point count raised above min_points until the spacing resolves phase
    // oscillations up to wavenumber ~sqrt(2N) with 2x oversampling.
    static QuadratureGrid for_mode(const ModeSpec& mode, double half_width = 0.0,
                                   int min_points = 256, double expected_squeeze = 1.0);

    // Symmetric variant covering the full Schroedinger-picture oscillation
    // range [-sqrt(2N)-w, sqrt(2N)+w].
    static QuadratureGrid for_mode_oscillating(const ModeSpec& mode,
                                               double half_width = 0.0,
                                               int min_points = 256);
};

struct SpatialGrid {
    double x_min = 0.0;
    double x_max = 0.0;
    int n_points = 0;

    double spacing() const { return (x_max - x_min) / n_points; }
    double x(int i) const { return x_min + spacing() * i; }
    std::vector<double> points() const;
    std::vector<double> wavenumbers() const; // conjugate periodic momentum grid
    void validate() const;                   // uniform, power-of-two count
};

} // namespace qlm
