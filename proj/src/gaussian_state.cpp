#include "qlm/gaussian_state.hpp"

#include "qlm/constants.hpp"
#include "qlm/errors.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace qlm {

namespace {

using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

CMat as_matrix(const std::vector<cplx>& m, int n) {
    CMat out(n, n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) out(j, k) = m[static_cast<std::size_t>(j) * n + k];
    return out;
}

// log of int exp(q.S.q + J.q) d^n q for Re S negative definite; the log
// domain keeps large-N coherent states finite.
cplx log_gaussian_integral(const CMat& s, const CVec& j) {
    int n = static_cast<int>(s.rows());
    Eigen::PartialPivLU<CMat> lu(-s);
    cplx det = lu.determinant();
    CVec x = lu.solve(j); // (-S)^-1 J
    cplx quad = 0.0;
    for (int i = 0; i < n; ++i) quad += j(i) * x(i);
    return 0.5 * (static_cast<double>(n) * std::log(pi) - std::log(det)) + 0.25 * quad;
}

cplx log_overlap_impl(const GaussianFieldState& ga, const GaussianFieldState& gb) {
    int n = ga.n_modes();
    if (gb.n_modes() != n) throw validation_error("overlap: mode counts differ");
    CMat s = as_matrix(ga.m, n).conjugate() + as_matrix(gb.m, n);
    CVec j(n);
    for (int i = 0; i < n; ++i) j(i) = std::conj(ga.b[i]) + gb.b[i];
    return std::conj(ga.log_c) + gb.log_c + log_gaussian_integral(s, j);
}

} // namespace

void GaussianFieldState::validate() const {
    int n = n_modes();
    if (n == 0) throw validation_error("GaussianFieldState: no modes");
    if (static_cast<int>(b.size()) != n ||
        static_cast<int>(m.size()) != n * n)
        throw validation_error("GaussianFieldState: coefficient shape mismatch");
    for (int j = 0; j < n; ++j)
        for (int k = j + 1; k < n; ++k)
            if (std::abs(d(j, k) - d(k, j)) > 1e-12)
                throw validation_error("GaussianFieldState: M must be symmetric");
    RMat re = as_matrix(m, n).real();
    Eigen::SelfAdjointEigenSolver<RMat> es(re);
    if (es.eigenvalues().maxCoeff() >= 0.0)
        throw validation_error("GaussianFieldState: Re M must be negative definite "
                               "(state not normalizable)");
}

GaussianFieldState GaussianFieldState::coherent(const std::vector<ModeSpec>& modes) {
    int n = static_cast<int>(modes.size());
    GaussianFieldState g;
    g.modes = modes;
    g.b.resize(n);
    g.m.assign(static_cast<std::size_t>(n) * n, cplx{});
    cplx logc = 0.0;
    for (int j = 0; j < n; ++j) {
        modes[j].validate();
        double c = modes[j].center();
        g.b[j] = c;
        g.m[static_cast<std::size_t>(j) * n + j] = -0.5;
        logc += -0.25 * std::log(pi) - 0.5 * c * c;
    }
    g.log_c = logc;
    return g;
}

double GaussianFieldState::norm() const {
    return std::exp(0.5 * log_overlap_impl(*this, *this).real());
}

void GaussianFieldState::normalize() {
    double log_n2 = log_overlap_impl(*this, *this).real();
    if (!std::isfinite(log_n2))
        throw solver_error("GaussianFieldState: cannot normalize");
    log_c -= 0.5 * log_n2;
}

std::vector<double> GaussianFieldState::mean_q() const {
    int n = n_modes();
    RMat a = -4.0 * as_matrix(m, n).real();
    RVec j(n);
    for (int i = 0; i < n; ++i) j(i) = 2.0 * b[i].real();
    RVec mu = a.ldlt().solve(j);
    return std::vector<double>(mu.data(), mu.data() + n);
}

std::vector<double> GaussianFieldState::cov_q() const {
    int n = n_modes();
    RMat a = -4.0 * as_matrix(m, n).real();
    RMat cov = a.ldlt().solve(RMat::Identity(n, n));
    std::vector<double> out(static_cast<std::size_t>(n) * n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) out[static_cast<std::size_t>(j) * n + k] = cov(j, k);
    return out;
}

std::vector<double> GaussianFieldState::mean_p() const {
    int n = n_modes();
    auto mq = mean_q();
    CMat mm = as_matrix(m, n);
    std::vector<double> out(n);
    for (int k = 0; k < n; ++k) {
        cplx w = b[k];
        for (int j = 0; j < n; ++j) w += 2.0 * mm(k, j) * mq[j];
        out[k] = w.imag();
    }
    return out;
}

double GaussianFieldState::var_p(int mode) const {
    int n = n_modes();
    auto mq = mean_q();
    auto cov = cov_q();
    CMat mm = as_matrix(m, n);
    RMat sigma(n, n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) sigma(j, k) = cov[static_cast<std::size_t>(j) * n + k];
    cplx w = b[mode];
    for (int j = 0; j < n; ++j) w += 2.0 * mm(mode, j) * mq[j];
    CMat msm = mm * sigma.cast<cplx>() * mm;
    cplx p2 = -2.0 * mm(mode, mode) - w * w - 4.0 * msm(mode, mode);
    double mean = w.imag();
    return p2.real() - mean * mean;
}

FieldStateGrid GaussianFieldState::to_grid(const std::vector<QuadratureGrid>& grids) const {
    int n = n_modes();
    if (static_cast<int>(grids.size()) != n)
        throw validation_error("to_grid: grid count does not match mode count");
    FieldStateGrid out;
    out.modes = modes;
    out.grids = grids;
    std::size_t total = 1;
    for (const auto& g : grids) total *= static_cast<std::size_t>(g.n_points);
    out.amplitudes.resize(total);

    std::vector<int> idx(n, 0);
    std::vector<double> q(n);
    for (int j = 0; j < n; ++j) q[j] = grids[j].q(0);
    for (std::size_t flat = 0; flat < total; ++flat) {
        cplx e = log_c;
        for (int j = 0; j < n; ++j) {
            e += b[j] * q[j];
            for (int k = 0; k < n; ++k) e += d(j, k) * q[j] * q[k];
        }
        out.amplitudes[flat] = std::exp(e);
        for (int j = n - 1; j >= 0; --j) {
            if (++idx[j] < grids[j].n_points) {
                q[j] = grids[j].q(idx[j]);
                break;
            }
            idx[j] = 0;
            q[j] = grids[j].q(0);
        }
    }
    return out;
}

void GaussianFieldState::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw solver_error("GaussianFieldState: cannot open " + path);
    out << std::setprecision(17);
    int n = n_modes();
    out << "modes " << n << "\n";
    for (const auto& md : modes)
        out << "mode " << md.omega << " " << md.theta << " " << md.n_photons << " "
            << md.beta << " " << md.kappa_dot_r << "\n";
    out << "log_c " << log_c.real() << " " << log_c.imag() << "\n";
    for (int j = 0; j < n; ++j)
        out << "b " << b[j].real() << " " << b[j].imag() << "\n";
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
            out << "m " << d(j, k).real() << " " << d(j, k).imag() << "\n";
    if (!out) throw solver_error("GaussianFieldState: write failed for " + path);
}

GaussianFieldState GaussianFieldState::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw solver_error("GaussianFieldState: cannot open " + path);
    GaussianFieldState g;
    std::string tag;
    int n = 0;
    if (!(in >> tag >> n) || tag != "modes" || n < 1)
        throw solver_error("GaussianFieldState: bad header in " + path);
    for (int j = 0; j < n; ++j) {
        ModeSpec md;
        if (!(in >> tag >> md.omega >> md.theta >> md.n_photons >> md.beta >>
              md.kappa_dot_r) ||
            tag != "mode")
            throw solver_error("GaussianFieldState: bad mode record in " + path);
        g.modes.push_back(md);
    }
    double re, im;
    if (!(in >> tag >> re >> im) || tag != "log_c")
        throw solver_error("GaussianFieldState: bad log_c record in " + path);
    g.log_c = cplx(re, im);
    g.b.resize(n);
    for (int j = 0; j < n; ++j) {
        if (!(in >> tag >> re >> im) || tag != "b")
            throw solver_error("GaussianFieldState: bad b record in " + path);
        g.b[j] = cplx(re, im);
    }
    g.m.resize(static_cast<std::size_t>(n) * n);
    for (std::size_t i = 0; i < g.m.size(); ++i) {
        if (!(in >> tag >> re >> im) || tag != "m")
            throw solver_error("GaussianFieldState: bad m record in " + path);
        g.m[i] = cplx(re, im);
    }
    return g;
}

cplx overlap(const GaussianFieldState& ga, const GaussianFieldState& gb) {
    return std::exp(log_overlap_impl(ga, gb));
}

} // namespace qlm
