#include "qlm/field_propagator.hpp"

#include "qlm/errors.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>

namespace qlm {

namespace {

void check_grid_path(const FieldStateGrid& g) {
    if (g.n_modes() < 1 || g.n_modes() > 2)
        throw validation_error("propagate_field_grid: grid path supports 1 or 2 modes");
    for (const auto& q : g.grids)
        if (q.n_points > 256 && g.n_modes() == 2)
            throw validation_error("propagate_field_grid: two-mode grids capped at "
                                   "256 points per mode");
}

} // namespace

FieldStateGrid propagate_field_grid(const FieldStateGrid& g,
                                    const BackactionCoefficients& coeffs, double dt) {
    return propagate_field_grid(g, discretize(coeffs, g.grids), dt);
}

FieldStateGrid propagate_field_grid(const FieldStateGrid& g, const QOperator& op,
                                    double dt) {
    check_grid_path(g);
    if (op.total() != g.size())
        throw validation_error("propagate_field_grid: operator/state size mismatch");
    FieldStateGrid out = g;
    crank_nicolson(op, out.amplitudes, dt);
    return out;
}

namespace {

using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

struct GaussDeriv {
    cplx dlog;
    CVec db;
    CMat dm;
};

// Right-hand side of i d/dt (log_c, b, M) = polynomial coefficients of H_B G / G.
GaussDeriv derivative(const BackactionCoefficients& c, const cplx& /*log_c*/,
                      const CVec& b, const CMat& m) {
    int n = c.n_modes();
    CMat l1(n, n), k(n, n), alpha2(n, n);
    CVec l0(n), alpha1(n);
    for (int j = 0; j < n; ++j) {
        l0(j) = c.l0[j];
        alpha1(j) = c.v.c1[j];
        for (int i = 0; i < n; ++i) {
            l1(j, i) = c.l1[static_cast<std::size_t>(j) * n + i];
            k(j, i) = c.kmat[static_cast<std::size_t>(j) * n + i];
            alpha2(j, i) = c.v.c2[static_cast<std::size_t>(j) * n + i];
        }
    }
    const cplx im(0.0, 1.0);
    cplx cst = c.v.c0 + im * (l0.transpose() * b)(0, 0) + 0.5 * im * l1.trace() +
               2.0 * (k * m).trace() + (b.transpose() * k * b)(0, 0);
    CVec lin = alpha1 + im * (l1.transpose() * b) + 2.0 * im * (m * l0) +
               4.0 * (m * k * b);
    CMat lm = l1.transpose() * m;
    CMat quad = alpha2 + im * (lm + lm.transpose()) + 4.0 * (m * k * m);

    GaussDeriv d;
    d.dlog = -im * cst;
    d.db = -im * lin;
    d.dm = -im * quad;
    return d;
}

} // namespace

GaussianFieldState propagate_gaussian(const GaussianFieldState& g,
                                      const BackactionCoefficients& coeffs, double dt,
                                      double fit_tol) {
    g.validate();
    int n = g.n_modes();
    if (coeffs.n_modes() != n)
        throw validation_error("propagate_gaussian: mode count mismatch");
    if (coeffs.fit_residual > fit_tol)
        throw validation_error("propagate_gaussian: back-action is not quadratic "
                               "(fit residual " + std::to_string(coeffs.fit_residual) +
                               " exceeds tolerance)");
    CVec b(n);
    CMat m(n, n);
    for (int j = 0; j < n; ++j) {
        b(j) = g.b[j];
        for (int i = 0; i < n; ++i) m(j, i) = g.m[static_cast<std::size_t>(j) * n + i];
    }
    cplx lc = g.log_c;

    auto step = [&](const cplx& l, const CVec& bb, const CMat& mm) {
        return derivative(coeffs, l, bb, mm);
    };
    GaussDeriv k1 = step(lc, b, m);
    GaussDeriv k2 = step(lc + 0.5 * dt * k1.dlog, b + 0.5 * dt * k1.db,
                         m + 0.5 * dt * k1.dm);
    GaussDeriv k3 = step(lc + 0.5 * dt * k2.dlog, b + 0.5 * dt * k2.db,
                         m + 0.5 * dt * k2.dm);
    GaussDeriv k4 = step(lc + dt * k3.dlog, b + dt * k3.db, m + dt * k3.dm);

    GaussianFieldState out = g;
    out.log_c = lc + dt / 6.0 * (k1.dlog + 2.0 * k2.dlog + 2.0 * k3.dlog + k4.dlog);
    CVec bn = b + dt / 6.0 * (k1.db + 2.0 * k2.db + 2.0 * k3.db + k4.db);
    CMat mn = m + dt / 6.0 * (k1.dm + 2.0 * k2.dm + 2.0 * k3.dm + k4.dm);
    for (int j = 0; j < n; ++j) {
        out.b[j] = bn(j);
        for (int i = 0; i < n; ++i)
            out.m[static_cast<std::size_t>(j) * n + i] =
                0.5 * (mn(j, i) + mn(i, j)); // keep exact symmetry
    }
    return out;
}

double zeros_guard(const FieldStateGrid& g, const FieldStateGrid& g0,
                   double threshold) {
    if (!g.compatible_with(g0))
        throw validation_error("zeros_guard: incompatible states");
    double gmax = 0.0;
    for (const cplx& z : g.amplitudes) gmax = std::max(gmax, std::abs(z));
    double gmin = std::numeric_limits<double>::infinity();
    bool any = false;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (std::abs(g0.amplitudes[i]) <= 1e-6) continue;
        any = true;
        gmin = std::min(gmin, std::abs(g.amplitudes[i]));
    }
    if (!any || gmax <= 0.0)
        throw validation_error("zeros_guard: reference state has no populated region");
    double ratio = gmin / gmax;
    if (ratio < threshold)
        throw guard_error("zeros_guard: field state develops a node in the populated "
                          "region (ratio " + std::to_string(ratio) + ")");
    return ratio;
}

} // namespace qlm
