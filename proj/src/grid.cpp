#include "qlm/grid.hpp"

#include "qlm/constants.hpp"
#include "qlm/errors.hpp"
#include "qlm/fft.hpp"

#include <algorithm>
#include <cmath>

namespace qlm {

namespace {
int next_pow2(int n) {
    int p = 1;
    while (p < n) p *= 2;
    return p;
}
} // namespace

std::vector<double> QuadratureGrid::points() const {
    std::vector<double> qs(n_points);
    for (int i = 0; i < n_points; ++i) qs[i] = q(i);
    return qs;
}

void QuadratureGrid::validate() const {
    if (n_points < 16) throw validation_error("QuadratureGrid: n_points must be >= 16");
    if (!(q_max > q_min)) throw validation_error("QuadratureGrid: q_max must exceed q_min");
}

QuadratureGrid QuadratureGrid::for_mode(const ModeSpec& mode, double half_width,
                                        int min_points, double expected_squeeze) {
    double center = mode.center();
    double w = std::max(10.0, 6.0 + 4.0 * std::sqrt(std::max(expected_squeeze, 0.0)));
    if (half_width > 0.0) w = std::max(w, half_width);
    // Phase components oscillate with wavenumber up to ~sqrt(2N); keep the
    // spacing at least 2x below that Nyquist limit.
    double k_max = center + 2.0;
    int n = std::max(min_points, next_pow2(static_cast<int>(
                                     std::ceil(2.0 * (2.0 * w) * k_max / pi))));
    QuadratureGrid g{center - w, center + w, n};
    g.validate();
    return g;
}

QuadratureGrid QuadratureGrid::for_mode_oscillating(const ModeSpec& mode,
                                                    double half_width, int min_points) {
    double center = mode.center();
    double w = std::max(10.0, half_width);
    double edge = center + w;
    double k_max = center + 2.0;
    int n = std::max(min_points, next_pow2(static_cast<int>(
                                     std::ceil(2.0 * (2.0 * edge) * k_max / pi))));
    QuadratureGrid g{-edge, edge, n};
    g.validate();
    return g;
}

std::vector<double> SpatialGrid::points() const {
    std::vector<double> xs(n_points);
    for (int i = 0; i < n_points; ++i) xs[i] = x(i);
    return xs;
}

std::vector<double> SpatialGrid::wavenumbers() const {
    return fft_wavenumbers(n_points, spacing());
}

void SpatialGrid::validate() const {
    if (n_points < 16 || (n_points & (n_points - 1)) != 0)
        throw validation_error("SpatialGrid: n_points must be a power of two >= 16");
    if (!(x_max > x_min)) throw validation_error("SpatialGrid: x_max must exceed x_min");
}

} // namespace qlm
