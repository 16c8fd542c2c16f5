#include "qlm/backaction.hpp"

#include "qlm/constants.hpp"
#include "qlm/errors.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace qlm {

double QuadPoly::eval(const std::vector<double>& q) const {
    double s = c0;
    std::size_t n = q.size();
    for (std::size_t j = 0; j < n && j < c1.size(); ++j) s += c1[j] * q[j];
    if (!c2.empty())
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k) s += c2[j * n + k] * q[j] * q[k];
    return s;
}

namespace {

// Least-squares polynomial fit over the sample set; degree 1 or 2.
QuadPoly fit_poly(const std::vector<std::vector<double>>& samples,
                  const std::vector<double>& target, int n_modes, int degree,
                  double& rss) {
    std::size_t m = samples.size();
    int n_cols = 1 + n_modes;
    if (degree == 2) n_cols += n_modes * (n_modes + 1) / 2;
    if (static_cast<int>(m) < n_cols)
        throw validation_error("build_backaction: " + std::to_string(n_cols) +
                               " samples needed for the polynomial reduction, got " +
                               std::to_string(m));
    Eigen::MatrixXd design(m, n_cols);
    Eigen::VectorXd y(m);
    for (std::size_t s = 0; s < m; ++s) {
        const auto& q = samples[s];
        int col = 0;
        design(s, col++) = 1.0;
        for (int j = 0; j < n_modes; ++j) design(s, col++) = q[j];
        if (degree == 2)
            for (int j = 0; j < n_modes; ++j)
                for (int k = j; k < n_modes; ++k) design(s, col++) = q[j] * q[k];
        y(s) = target[s];
    }
    Eigen::VectorXd coef = design.colPivHouseholderQr().solve(y);
    rss += (design * coef - y).squaredNorm();

    QuadPoly p;
    int col = 0;
    p.c0 = coef(col++);
    p.c1.resize(n_modes);
    for (int j = 0; j < n_modes; ++j) p.c1[j] = coef(col++);
    if (degree == 2) {
        p.c2.assign(static_cast<std::size_t>(n_modes) * n_modes, 0.0);
        for (int j = 0; j < n_modes; ++j)
            for (int k = j; k < n_modes; ++k) {
                double v = coef(col++);
                if (j == k) {
                    p.c2[j * n_modes + j] = v;
                } else {
                    p.c2[j * n_modes + k] = 0.5 * v;
                    p.c2[k * n_modes + j] = 0.5 * v;
                }
            }
    }
    return p;
}

} // namespace

BackactionCoefficients build_backaction(const ElectronEnsemble& ens,
                                        const std::vector<ModeSpec>& modes, double t) {
    int n = static_cast<int>(modes.size());
    if (n == 0) throw validation_error("build_backaction: no modes");
    for (const auto& m : modes) m.validate();
    if (ens.expectations.size() != ens.q_samples.size() || ens.q_samples.empty())
        throw validation_error("build_backaction: missing expectation table");
    for (const auto& q : ens.q_samples)
        if (static_cast<int>(q.size()) != n)
            throw validation_error("build_backaction: sample arity does not match "
                                   "mode count");

    BackactionCoefficients c;
    c.modes = modes;
    c.t = t;

    std::vector<double> e_target(ens.size()), p_target(ens.size());
    for (std::size_t s = 0; s < ens.size(); ++s) {
        e_target[s] = 0.5 * ens.expectations[s].p2 + ens.expectations[s].potential;
        p_target[s] = ens.expectations[s].p;
    }
    double rss = 0.0;
    c.energy = fit_poly(ens.q_samples, e_target, n, 2, rss);
    c.momentum = fit_poly(ens.q_samples, p_target, n, 1, rss);
    c.fit_residual = std::sqrt(rss / static_cast<double>(2 * ens.size()));

    double cl = speed_of_light;
    std::vector<double> pi_(n), sg(n);
    for (int j = 0; j < n; ++j) {
        double ph = modes[j].field_phase(t);
        pi_[j] = modes[j].beta * std::cos(ph);
        sg[j] = modes[j].beta * std::sin(ph);
    }

    c.v.c0 = c.energy.c0;
    c.v.c1.resize(n);
    c.v.c2.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int j = 0; j < n; ++j) {
        c.v.c1[j] = (j < static_cast<int>(c.energy.c1.size()) ? c.energy.c1[j] : 0.0) -
                    c.momentum.c0 * pi_[j] / cl;
        for (int k = 0; k < n; ++k) {
            double e2 = c.energy.c2.empty() ? 0.0 : c.energy.c2[j * n + k];
            c.v.c2[j * n + k] = e2 + pi_[j] * pi_[k] / (2.0 * cl * cl) -
                                (c.momentum.c1[j] * pi_[k] + c.momentum.c1[k] * pi_[j]) /
                                    (2.0 * cl);
        }
    }
    c.l0.resize(n);
    c.l1.assign(static_cast<std::size_t>(n) * n, 0.0);
    c.kmat.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int k = 0; k < n; ++k) {
        c.l0[k] = -sg[k] * c.momentum.c0 / cl;
        for (int j = 0; j < n; ++j) {
            c.l1[k * n + j] = sg[k] * (pi_[j] / (cl * cl) - c.momentum.c1[j] / cl);
            c.kmat[k * n + j] = -sg[k] * sg[j] / (2.0 * cl * cl);
        }
    }
    return c;
}

namespace {

// Row-major walk over the tensor grid, invoking fn(index, q-vector).
void for_each_point(const std::vector<QuadratureGrid>& grids,
                    const std::function<void(std::size_t, const std::vector<double>&)>& fn) {
    int n = static_cast<int>(grids.size());
    std::vector<int> idx(n, 0);
    std::vector<double> q(n);
    for (int j = 0; j < n; ++j) q[j] = grids[j].q(0);
    std::size_t total = 1;
    for (const auto& g : grids) total *= static_cast<std::size_t>(g.n_points);
    for (std::size_t flat = 0; flat < total; ++flat) {
        fn(flat, q);
        for (int j = n - 1; j >= 0; --j) {
            if (++idx[j] < grids[j].n_points) {
                q[j] = grids[j].q(idx[j]);
                break;
            }
            idx[j] = 0;
            q[j] = grids[j].q(0);
        }
    }
}

} // namespace

QOperator discretize(const BackactionCoefficients& c,
                     const std::vector<QuadratureGrid>& grids) {
    int n = c.n_modes();
    if (static_cast<int>(grids.size()) != n)
        throw validation_error("discretize: grid count does not match mode count");
    QOperator op;
    op.grids = grids;
    op.k = c.kmat;
    std::size_t total = op.total();
    op.v.resize(total);
    op.l.assign(n, {});
    for (int k = 0; k < n; ++k) op.l[k].resize(total);
    for_each_point(grids, [&](std::size_t flat, const std::vector<double>& q) {
        op.v[flat] = c.v.eval(q);
        for (int k = 0; k < n; ++k) {
            double lv = c.l0[k];
            for (int j = 0; j < n; ++j) lv += c.l1[k * n + j] * q[j];
            op.l[k][flat] = lv;
        }
    });
    return op;
}

QOperator discretize_tabulated(const ElectronEnsemble& ens,
                               const std::vector<ModeSpec>& modes, double t,
                               const std::vector<QuadratureGrid>& grids) {
    int n = static_cast<int>(modes.size());
    if (static_cast<int>(grids.size()) != n)
        throw validation_error("discretize_tabulated: grid/mode count mismatch");
    QOperator op;
    op.grids = grids;
    std::size_t total = op.total();
    if (ens.q_samples.size() != total || ens.expectations.size() != total)
        throw validation_error("discretize_tabulated: ensemble must enumerate the "
                               "tensor grid");
    double cl = speed_of_light;
    std::vector<double> pi_(n), sg(n);
    for (int j = 0; j < n; ++j) {
        double ph = modes[j].field_phase(t);
        pi_[j] = modes[j].beta * std::cos(ph);
        sg[j] = modes[j].beta * std::sin(ph);
    }
    op.v.resize(total);
    op.l.assign(n, {});
    for (int k = 0; k < n; ++k) op.l[k].resize(total);
    op.k.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j) op.k[k * n + j] = -sg[k] * sg[j] / (2.0 * cl * cl);
    for_each_point(grids, [&](std::size_t flat, const std::vector<double>& q) {
        const auto& e = ens.expectations[flat];
        for (int j = 0; j < n; ++j)
            if (std::abs(ens.q_samples[flat][j] - q[j]) > 1e-9)
                throw validation_error("discretize_tabulated: sample order does not "
                                       "match row-major grid walk");
        double p_par = 0.0;
        for (int j = 0; j < n; ++j) p_par += pi_[j] * q[j];
        op.v[flat] = 0.5 * e.p2 + e.potential - e.p * p_par / cl +
                     p_par * p_par / (2.0 * cl * cl);
        for (int k = 0; k < n; ++k)
            op.l[k][flat] = sg[k] * (p_par / (cl * cl) - e.p / cl);
    });
    return op;
}

} // namespace qlm
