#pragma once

#include "qlm/grid.hpp"
#include "qlm/mode.hpp"

#include <complex>
#include <functional>
#include <string>
#include <vector>

namespace qlm {

using cplx = std::complex<double>;

// Complex amplitudes of the field wavefunction G on a tensor quadrature grid,
// row-major over modes (mode 0 slowest).
struct FieldStateGrid {
    std::vector<ModeSpec> modes;
    std::vector<QuadratureGrid> grids;
    std::vector<cplx> amplitudes;

    int n_modes() const { return static_cast<int>(modes.size()); }
    std::size_t size() const { return amplitudes.size(); }
    std::vector<int> shape() const;
    double cell() const; // product of grid spacings (quadrature weight)

    double norm() const;
    void normalize();
    void check_norm(double tol = 1e-8) const; // throws validation_error
    bool compatible_with(const FieldStateGrid& other) const;

    // Documented binary layout: f64 mode count; per mode f64
    // {omega, theta, n_photons, beta, kappa_dot_r, q_min, q_max, n_points};
    // payload interleaved re/im f64, row-major over modes.
    void save(const std::string& path) const;
    static FieldStateGrid load(const std::string& path);
};

// Inner product <a|b> including quadrature weights.
cplx inner(const FieldStateGrid& a, const FieldStateGrid& b);

// Apply fn to every 1-D line along `axis` of a row-major tensor. The line is
// gathered into a contiguous scratch buffer, transformed, and scattered back.
void for_each_line(std::vector<cplx>& data, const std::vector<int>& shape, int axis,
                   const std::function<void(cplx*, int)>& fn);

} // namespace qlm
