#include "qlm/analyzers.hpp"

#include "qlm/errors.hpp"
#include "qlm/field_kernel.hpp"
#include "qlm/kernels.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace qlm {

namespace {

using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

std::vector<double> axis_q_table(const FieldStateGrid& g, int mode) {
    auto shape = g.shape();
    std::size_t stride = 1;
    for (std::size_t i = mode + 1; i < shape.size(); ++i)
        stride *= static_cast<std::size_t>(shape[i]);
    std::vector<double> out(g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
        out[i] = g.grids[mode].q(static_cast<int>((i / stride) % shape[mode]));
    return out;
}

void require_mode(int mode, int n_modes, const char* op) {
    if (mode < 0 || mode >= n_modes)
        throw validation_error(std::string(op) + ": mode index out of range");
}

CMat m_matrix(const GaussianFieldState& g) {
    int n = g.n_modes();
    CMat out(n, n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) out(j, k) = g.d(j, k);
    return out;
}

// Complex quadratic form c + l.q + q.A.q; moments under the real Gaussian
// density follow from Wick contractions.
struct QuadForm {
    cplx c;
    CVec l;
    CMat a;
};

} // namespace

QuadratureReport quadrature_stats(const FieldStateGrid& g, int mode) {
    require_mode(mode, g.n_modes(), "quadrature_stats");
    g.check_norm(1e-6);
    QuadratureReport r;
    auto q = axis_q_table(g, mode);
    std::vector<double> q2(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) q2[i] = q[i] * q[i];
    double cell = g.cell();
    r.mean_q = kern::ops().weighted_abs2(g.amplitudes.data(), q.data(), g.size()) * cell;
    double eq2 = kern::ops().weighted_abs2(g.amplitudes.data(), q2.data(), g.size()) * cell;
    r.var_q = eq2 - r.mean_q * r.mean_q;

    auto dg = axis_derivative(g, mode, 1);
    cplx gd = kern::ops().cdot(g.amplitudes.data(), dg.data(), g.size()) * cell;
    r.mean_p = (cplx(0.0, -1.0) * gd).real();
    double ep2 = kern::ops().norm_sq(dg.data(), dg.size()) * cell;
    r.var_p = ep2 - r.mean_p * r.mean_p;
    return r;
}

QuadratureReport quadrature_stats(const GaussianFieldState& g, int mode) {
    require_mode(mode, g.n_modes(), "quadrature_stats");
    g.validate();
    GaussianFieldState gn = g;
    gn.normalize();
    int n = gn.n_modes();
    QuadratureReport r;
    r.mean_q = gn.mean_q()[mode];
    r.var_q = gn.cov_q()[static_cast<std::size_t>(mode) * n + mode];
    r.mean_p = gn.mean_p()[mode];
    r.var_p = gn.var_p(mode);
    return r;
}

std::vector<SqueezeMode> squeezing_detect(const GaussianFieldState& g) {
    g.validate();
    int n = g.n_modes();
    GaussianFieldState gn = g;
    gn.normalize();
    RMat re = m_matrix(gn).real();
    Eigen::SelfAdjointEigenSolver<RMat> es(re);
    auto cov = gn.cov_q();

    std::vector<SqueezeMode> out(n);
    // principal values sorted to pair the most squeezed axis with the mode
    // whose raw Re(a) is most negative (ordering is report-only)
    std::vector<int> mode_order(n), axis_order(n);
    for (int j = 0; j < n; ++j) mode_order[j] = axis_order[j] = j;
    std::sort(mode_order.begin(), mode_order.end(),
              [&](int a, int b) { return re(a, a) < re(b, b); });
    // eigenvalues() is ascending already
    for (int j = 0; j < n; ++j) {
        int mode = mode_order[j];
        SqueezeMode& s = out[mode];
        s.raw_a = gn.d(mode, mode);
        s.principal_a = es.eigenvalues()(j);
        s.factor = cov[static_cast<std::size_t>(mode) * n + mode] / 0.5;
        s.squeezed = s.principal_a < -0.5;
    }
    return out;
}

PhotonStatistics photon_statistics(const FieldStateGrid& g, int mode) {
    require_mode(mode, g.n_modes(), "photon_statistics");
    g.check_norm(1e-6);
    auto q = axis_q_table(g, mode);
    auto d2 = axis_derivative(g, mode, 2);
    std::vector<cplx> ng(g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
        ng[i] = 0.5 * (q[i] * q[i] * g.amplitudes[i] - d2[i]);
    double cell = g.cell();
    cplx raw = kern::ops().cdot(g.amplitudes.data(), ng.data(), g.size()) * cell;
    if (std::abs(raw.imag()) > 1e-6 * std::max(1.0, std::abs(raw.real())))
        throw guard_error("photon_statistics: number operator expectation has a "
                          "spurious imaginary part (grid under-resolved)");
    double n2 = kern::ops().norm_sq(ng.data(), ng.size()) * cell;
    PhotonStatistics r;
    r.raw_mean = raw.real();
    r.mean_n = r.raw_mean - 0.5;
    r.var_n = n2 - r.raw_mean * r.raw_mean;
    r.mandel_q = r.mean_n > 1e-12 ? (r.var_n - r.mean_n) / r.mean_n : 0.0;
    return r;
}

PhotonStatistics photon_statistics(const GaussianFieldState& g, int mode) {
    require_mode(mode, g.n_modes(), "photon_statistics");
    g.validate();
    GaussianFieldState gn = g;
    gn.normalize();
    int n = gn.n_modes();
    CMat m = m_matrix(gn);
    CVec b(n);
    for (int j = 0; j < n; ++j) b(j) = gn.b[j];

    // N_j psi = Q(q) psi with Q = q_j^2/2 - [(b_j + 2(Mq)_j)^2 + 2 M_jj]/2
    QuadForm f;
    CVec row = m.row(mode).transpose();
    f.a = CMat::Zero(n, n);
    f.a(mode, mode) = 0.5;
    f.a -= 2.0 * row * row.transpose();
    f.l = -2.0 * b(mode) * row;
    f.c = -0.5 * b(mode) * b(mode) - m(mode, mode);

    auto muv = gn.mean_q();
    auto cov = gn.cov_q();
    RVec mu(n);
    RMat s(n, n);
    for (int j = 0; j < n; ++j) {
        mu(j) = muv[j];
        for (int k = 0; k < n; ++k) s(j, k) = cov[static_cast<std::size_t>(j) * n + k];
    }
    CVec muc = mu.cast<cplx>();
    CMat sc = s.cast<cplx>();
    cplx eq = f.c + (f.l.transpose() * muc).value() + (muc.transpose() * f.a * muc).value() +
              (f.a * sc).trace();
    CVec grad = f.l + 2.0 * f.a * muc;
    cplx e2 = eq * std::conj(eq) + 2.0 * (f.a * sc * f.a.conjugate() * sc).trace() +
              (grad.transpose() * sc * grad.conjugate()).value();

    PhotonStatistics r;
    r.raw_mean = eq.real();
    r.mean_n = r.raw_mean - 0.5;
    r.var_n = e2.real() - r.raw_mean * r.raw_mean;
    r.mandel_q = r.mean_n > 1e-12 ? (r.var_n - r.mean_n) / r.mean_n : 0.0;
    return r;
}

EntanglementReport mode_entanglement(const FieldStateGrid& g) {
    if (g.n_modes() != 2)
        throw validation_error("mode_entanglement: exactly two modes required");
    g.check_norm(1e-6);
    auto shape = g.shape();
    int n1 = shape[0], n2 = shape[1];
    double h1 = g.grids[0].spacing(), h2 = g.grids[1].spacing();

    EntanglementReport r;
    // log-amplitude cross Hessian at the density peak -> q1 q2 coefficient
    std::size_t peak = 0;
    double best = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (std::norm(g.amplitudes[i]) > best) {
            best = std::norm(g.amplitudes[i]);
            peak = i;
        }
    int i1 = static_cast<int>(peak / n2), i2 = static_cast<int>(peak % n2);
    i1 = std::clamp(i1, 1, n1 - 2);
    i2 = std::clamp(i2, 1, n2 - 2);
    auto at = [&](int a, int b) { return g.amplitudes[static_cast<std::size_t>(a) * n2 + b]; };
    cplx cross = (std::log(at(i1 + 1, i2 + 1)) - std::log(at(i1 + 1, i2 - 1)) -
                  std::log(at(i1 - 1, i2 + 1)) + std::log(at(i1 - 1, i2 - 1))) /
                 (4.0 * h1 * h2);
    r.offdiag_d = std::abs(cross);

    // Tr rho_1^2 by double quadrature over the reduced kernel
    CMat rho = CMat::Zero(n1, n1);
    for (int a = 0; a < n1; ++a)
        for (int b = 0; b < n1; ++b) {
            cplx acc = kern::ops().cdot(g.amplitudes.data() + static_cast<std::size_t>(b) * n2,
                                        g.amplitudes.data() + static_cast<std::size_t>(a) * n2,
                                        static_cast<std::size_t>(n2));
            rho(a, b) = acc * h2;
        }
    double purity = 0.0;
    for (int a = 0; a < n1; ++a)
        for (int b = 0; b < n1; ++b) purity += std::norm(rho(a, b));
    r.reduced_purity = purity * h1 * h1;
    return r;
}

EntanglementReport mode_entanglement(const GaussianFieldState& g) {
    if (g.n_modes() != 2)
        throw validation_error("mode_entanglement: exactly two modes required");
    g.validate();
    GaussianFieldState gn = g;
    gn.normalize();
    EntanglementReport r;
    r.offdiag_d = std::abs(gn.d(0, 1) + gn.d(1, 0));

    // purity of the reduced mode-0 state from its (q,p) covariance:
    // Tr rho^2 = 1 / (2 sqrt(det Sigma))
    int n = 2;
    auto muv = gn.mean_q();
    auto cov = gn.cov_q();
    double vq = cov[0];
    double vp = gn.var_p(0);
    cplx qp = 0.0; // <q_0 p_0>
    for (int k = 0; k < n; ++k)
        qp += cplx(0.0, -2.0) * gn.d(0, k) * (cov[static_cast<std::size_t>(k)] + muv[0] * muv[k]);
    qp += cplx(0.0, -1.0) * gn.b[0] * muv[0];
    double cqp = qp.real() - muv[0] * gn.mean_p()[0];
    double det = vq * vp - cqp * cqp;
    if (det <= 0.0)
        throw validation_error("mode_entanglement: reduced covariance not positive");
    r.reduced_purity = 0.5 / std::sqrt(det);
    return r;
}

double fidelity(const FieldStateGrid& a, const FieldStateGrid& b) {
    if (!a.compatible_with(b))
        throw validation_error("fidelity: grid states are incompatible");
    return std::abs(inner(a, b)) / (a.norm() * b.norm());
}

double fidelity(const GaussianFieldState& a, const GaussianFieldState& b) {
    return std::abs(overlap(a, b)) / (a.norm() * b.norm());
}

double fidelity(const FieldStateGrid& a, const GaussianFieldState& b) {
    if (b.n_modes() != a.n_modes())
        throw validation_error("fidelity: mode counts differ");
    auto bg = b.to_grid(a.grids);
    return std::abs(inner(a, bg)) / (a.norm() * bg.norm());
}

} // namespace qlm
