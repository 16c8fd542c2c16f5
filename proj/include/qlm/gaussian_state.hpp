#pragma once

#include "qlm/field_state.hpp"

#include <string>

namespace qlm {

// Multimode Gaussian field state G = exp(log_c + b.q + q.M.q) with complex
// symmetric M whose real part is negative definite. The diagonal entries of M
// are the per-mode quadratic coefficients a_j (coherent state: a_j = -1/2),
// the off-diagonal entries d_jk couple modes (nonzero = mode entanglement).
struct GaussianFieldState {
    std::vector<ModeSpec> modes;
    cplx log_c{};
    std::vector<cplx> b;
    std::vector<cplx> m; // n x n row-major symmetric

    int n_modes() const { return static_cast<int>(modes.size()); }
    cplx a(int j) const { return m[static_cast<std::size_t>(j) * modes.size() + j]; }
    cplx d(int j, int k) const {
        return m[static_cast<std::size_t>(j) * modes.size() + k];
    }
    void validate() const;

    // Static-gauge coherent state: Gaussian of unit width centered at sqrt(2N).
    static GaussianFieldState coherent(const std::vector<ModeSpec>& modes);

    double norm() const;
    void normalize(); // adjusts Re log_c only

    std::vector<double> mean_q() const;
    std::vector<double> mean_p() const;
    std::vector<double> cov_q() const; // n x n row-major
    double var_p(int mode) const;

    FieldStateGrid to_grid(const std::vector<QuadratureGrid>& grids) const;

    // Plain-text records, complex numbers as re,im pairs at 17 significant
    // digits (diffable regression fixtures).
    void save(const std::string& path) const;
    static GaussianFieldState load(const std::string& path);
};

// Closed-form <a|b> for Gaussian exponents of quadratic forms.
cplx overlap(const GaussianFieldState& a, const GaussianFieldState& b);

} // namespace qlm
