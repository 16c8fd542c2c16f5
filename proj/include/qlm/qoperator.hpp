#pragma once

#include "qlm/field_state.hpp"

namespace qlm {

// Hermitian operator on the field quadrature grid in the canonical form
//   H = V(q) + sum_j sym(L_j(q) * i d/dq_j) + sum_jk K_jk d2/dq_j dq_k
// with real tabulated V and L_j and a real symmetric constant K.
// sym(L i d) is discretized by the exactly Hermitian two-point stencil
//   H[i, i+1] = i (L_i + L_{i+1}) / (4h),  H[i+1, i] = conj,
// second derivatives by central stencils; Dirichlet boundaries (amplitudes
// are assumed to have decayed at the grid edges).
struct QOperator {
    std::vector<QuadratureGrid> grids;
    std::vector<double> v;              // size prod(n_points)
    std::vector<std::vector<double>> l; // per mode, same size (empty = zero)
    std::vector<double> k;              // n_modes x n_modes, row-major, symmetric

    int n_modes() const { return static_cast<int>(grids.size()); }
    std::vector<int> shape() const;
    std::size_t total() const;
    void validate() const;
};

// out = H g (dense tensor application of the stencils).
std::vector<cplx> apply_operator(const QOperator& op, const std::vector<cplx>& g);

// One unitary Crank-Nicolson step (1 + i dt/2 H) g' = (1 - i dt/2 H) g.
// The mean of V is split off as an exact global phase first, which keeps the
// remaining operator small. One mode: direct Thomas tridiagonal solve. Two
// modes (cross-derivative coupling): matrix-free fixed-point iteration;
// throws solver_error on non-convergence.
void crank_nicolson(const QOperator& op, std::vector<cplx>& g, double dt);

} // namespace qlm
