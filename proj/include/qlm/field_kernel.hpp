#pragma once

#include "qlm/field_state.hpp"

namespace qlm {

// Coordinate-representation coherent state of one mode at time t,
// Schroedinger picture. Evaluated through its log to stay finite at
// large photon numbers.
cplx coherent_amplitude(const ModeSpec& mode, double t, double q);

FieldStateGrid coherent_state_grid(const std::vector<ModeSpec>& modes, double t,
                                   const std::vector<QuadratureGrid>& grids);
FieldStateGrid coherent_state_grid(const ModeSpec& mode, double t,
                                   const QuadratureGrid& grid);

enum class Ladder { annihilation, creation, number };

// Applies a-hat, a-hat+ or N-hat = (a+a + 1/2) on mode `mode_index`.
// Derivatives are spectral; with check_resolution a half-resolution
// Richardson comparison guards against under-resolved grids.
FieldStateGrid apply_ladder(const FieldStateGrid& state, int mode_index, Ladder which,
                            bool check_resolution = false);

enum class FieldObservable { position, derivative, number, vector_potential };
enum class Picture { schroedinger, interaction };

// Quadrature-rule expectation values. vector_potential in the Schroedinger
// picture uses the static traveling-wave operator; in the interaction picture
// the operator carries explicit cos/sin(omega*t - theta - kappa_dot_r) factors.
cplx expectation(const FieldStateGrid& state, FieldObservable obs, int mode_index = 0,
                 double t = 0.0, Picture picture = Picture::schroedinger);

// exp(-i*angle*N_hat_j) on the axis of mode j. Exact harmonic-oscillator
// eigenbasis path when the grid permits it, split-operator fallback otherwise.
// tail_tol bounds the basis-projection residual (the local error estimate).
void apply_number_phase(FieldStateGrid& state, int mode_index, double angle,
                        double tail_tol = 1e-9);

// One step of i dG/dt = sum_j omega_j N_hat_j G.
FieldStateGrid evolve_vacuum(const FieldStateGrid& state, double dt,
                             double tail_tol = 1e-9);

// Spectral d^order/dq^order along one mode axis.
std::vector<cplx> axis_derivative(const FieldStateGrid& state, int mode_index, int order);

} // namespace qlm
