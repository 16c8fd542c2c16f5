#pragma once

#include "qlm/coupling.hpp"
#include "qlm/grid.hpp"

#include <functional>
#include <string>
#include <vector>

namespace qlm {

// External potential U(x, t) acting on the electron (1D, polarization axis).
struct PotentialSpec {
    enum class Kind { free, quadratic, softcore };
    Kind kind = Kind::free;

    // quadratic: U = u(t) x^2; u_of_t overrides the constant when set.
    double u = 0.0;
    std::function<double(double)> u_of_t;

    // softcore: U = -depth / sqrt(x^2 + smoothing)
    double depth = 1.0;
    double smoothing = 2.0;

    double stiffness(double t) const;
    double value(double x, double t) const;
    void validate() const;
};

struct ElectronWavefunction {
    SpatialGrid grid;
    std::vector<cplx> psi;

    double norm() const;
    void normalize();
    void check_norm(double tol = 1e-8) const; // throws validation_error
};

// <a|b> with the trapezoidal (uniform periodic) weight dx.
cplx inner(const ElectronWavefunction& a, const ElectronWavefunction& b);

// Normalized Gaussian packet exp[-(x-center)^2/(2 width^2) + i momentum (x-center)].
ElectronWavefunction gaussian_packet(const SpatialGrid& grid, double center,
                                     double width, double momentum);

struct ElectronExpectations {
    double p = 0.0;         // canonical <p>
    double p2 = 0.0;        // <p^2>
    double x = 0.0;         // <x>
    double x2 = 0.0;        // <x^2>
    double potential = 0.0; // <U(x,t)>
};

ElectronExpectations electron_expectations(const ElectronWavefunction& f,
                                           const PotentialSpec& potential, double t);

// One Strang step in velocity gauge: half potential phase, full kinetic phase
// with shifted momentum (k - A(t+dt/2)/c)^2/2 in momentum space, half potential
// phase. Unitary. Throws guard_error when the A/c momentum shift approaches
// the grid Nyquist limit (aliasing).
ElectronWavefunction split_step(const ElectronWavefunction& f,
                                const std::function<double(double)>& a_of_t,
                                const PotentialSpec& potential, double t, double dt);

// Closed-form free-electron propagator: applies
// exp[-i t k^2/2 + (i/c) k int_0^t A dtau - (i/2c^2) int_0^t A^2 dtau]
// in momentum space. The A^2 term is a global phase per quadrature sample and
// is retained. Refuses non-free potentials.
ElectronWavefunction volkov_evolve(const ElectronWavefunction& f0, const CosSum& a,
                                   const PotentialSpec& potential, double t);

// Electron wavefunction per quadrature sample, plus the per-sample expectation
// values the field back-action needs. q_samples[j] holds one q value per mode.
struct ElectronEnsemble {
    PotentialSpec potential;
    SpatialGrid spatial;
    std::vector<std::vector<double>> q_samples;
    std::vector<ElectronWavefunction> samples;
    std::vector<ElectronExpectations> expectations;

    std::size_t size() const { return samples.size(); }
    void validate() const;
    void refresh_expectations(double t);

    // Checkpoint layout: f64 header {kind, u, depth, smoothing, x_min, x_max,
    // n_points, n_modes, n_samples}; per sample: q values, then interleaved
    // re/im f64 amplitudes. Time-dependent u(t) is not checkpointable.
    void save(const std::string& path) const;
    static ElectronEnsemble load(const std::string& path);
};

// Initial ensemble: the same packet replicated over the given q samples.
ElectronEnsemble make_ensemble(const PotentialSpec& potential, const SpatialGrid& grid,
                               std::vector<std::vector<double>> q_samples,
                               double center, double width, double momentum);

// Advances every sample by one split step with its own parametric A(q, t);
// expectations recomputed at t+dt. Deterministic sample order. Per-sample
// failures are rethrown with the sample index attached.
ElectronEnsemble ensemble_propagate(
    const ElectronEnsemble& ens,
    const std::function<ParametricField(const std::vector<double>&)>& pf_builder,
    double t, double dt);

// Finite-difference gauge diagnostic <F(t) | [F(t+dt) - F(t)]/dt> per sample.
// The real part vanishes by unitarity; the imaginary part carries the energy
// phase and is reported, not removed.
std::vector<cplx> static_gauge_residual(const ElectronEnsemble& prev,
                                        const ElectronEnsemble& next, double dt);

// Real part of the gauge residual with the finite-difference bias removed:
// a pure phase e^{-iE dt} gives r = (e^{-iE dt}-1)/dt whose raw real part is
// -E^2 dt/2 + O(dt^2); (|1 + r dt| - 1)/dt cancels that term exactly and
// isolates genuine norm drift.
double gauge_real_residual(cplx r, double dt);

// Fixed step dt = min(T_mode/400 over modes, T_grid/10) where T_grid is the
// period of the fastest grid momentum component.
double default_time_step(const std::vector<ModeSpec>& modes, const SpatialGrid& grid);

} // namespace qlm
