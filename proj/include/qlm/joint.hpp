#pragma once

#include "qlm/electron.hpp"
#include "qlm/field_state.hpp"

namespace qlm {

// Exact wavefunction on the combined grid, row-major [x][q_1][q_2]. The field
// coordinates are in the rotating (interaction) picture: the vector-potential
// operator carries the explicit cos/sin(omega t - theta) factors and the
// free-field rotation is absent.
struct JointWavefunction {
    SpatialGrid spatial;
    std::vector<ModeSpec> modes;
    std::vector<QuadratureGrid> quad;
    std::vector<cplx> amplitudes;

    std::size_t field_points() const;
    std::size_t size() const { return amplitudes.size(); }
    double cell() const;
    double norm() const;
    void normalize();
    void check_norm(double tol = 1e-8) const;
    void validate() const;
};

// Tensor product F0(x) * G0(q) initial state.
JointWavefunction joint_product(const ElectronWavefunction& f0,
                                const FieldStateGrid& g0);

// One step of the full coupled evolution. Splitting: half potential phase in
// x, then per electron momentum k (diagonal after the x FFT) the exact
// kinetic phase and a Crank-Nicolson step of the coupling operator
//   -(k/c) A + A^2/(2c^2)
// acting in q, then half potential phase. Unitary; second order in dt.
void joint_propagate(JointWavefunction& psi, const PotentialSpec& potential,
                     double t, double dt);

// Exact factorization Psi = F(x;q) G(q). |G| is the marginal amplitude; the
// phase of G is fixed by projecting each electron column on the column at the
// marginal maximum (any choice leaves Re<F|dF/dq> = 0; comparison metrics are
// gauge-insensitive). Columns whose marginal falls below 1e-12 of the peak
// are masked and excluded.
struct Factorization {
    ElectronEnsemble electron; // samples enumerate the field grid row-major
    FieldStateGrid field;
    std::vector<bool> masked;
    std::size_t n_masked = 0;
};
Factorization exact_factorize(const JointWavefunction& psi);

// Error report of the parametric approximation against the oracle.
struct ComparisonReport {
    double field_infidelity = 0.0;    // 1 - |<G_or|G_ap>| (normalized overlap)
    double electron_infidelity = 0.0; // per-q infidelity weighted by |G_or|^2
    double total_infidelity = 0.0;    // field + electron; leading-order product
                                      // infidelity, free of the per-q phase gauge
    double density_distance = 0.0;    // L2 distance of the q marginals
    std::size_t masked_points = 0;
};
ComparisonReport compare_to_parametric(const Factorization& oracle,
                                       const FieldStateGrid& approx_field,
                                       const ElectronEnsemble& approx_electron);

// Least-squares slope of log(y) against log(x) (error-scaling fits).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

} // namespace qlm
