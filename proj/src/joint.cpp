#include "qlm/joint.hpp"

#include "qlm/constants.hpp"
#include "qlm/errors.hpp"
#include "qlm/fft.hpp"
#include "qlm/kernels.hpp"
#include "qlm/qoperator.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace qlm {

namespace {

FftAxis& joint_fft(const std::vector<int>& shape) {
    static std::map<std::vector<int>, FftAxis> cache;
    auto it = cache.find(shape);
    if (it == cache.end())
        it = cache.emplace(shape, FftAxis(shape, 0)).first;
    return it->second;
}

std::vector<double> field_q_table(const std::vector<QuadratureGrid>& quad, int mode,
                                  std::size_t total) {
    // q_mode at every row-major field grid point
    std::size_t inner = 1;
    for (std::size_t j = mode + 1; j < quad.size(); ++j)
        inner *= static_cast<std::size_t>(quad[j].n_points);
    int nj = quad[mode].n_points;
    std::vector<double> out(total);
    for (std::size_t i = 0; i < total; ++i)
        out[i] = quad[mode].q(static_cast<int>((i / inner) % nj));
    return out;
}

} // namespace

std::size_t JointWavefunction::field_points() const {
    std::size_t t = 1;
    for (const auto& g : quad) t *= static_cast<std::size_t>(g.n_points);
    return t;
}

double JointWavefunction::cell() const {
    double c = spatial.spacing();
    for (const auto& g : quad) c *= g.spacing();
    return c;
}

double JointWavefunction::norm() const {
    return std::sqrt(kern::ops().norm_sq(amplitudes.data(), amplitudes.size()) * cell());
}

void JointWavefunction::normalize() {
    double n = norm();
    if (!(n > 0.0) || !std::isfinite(n))
        throw validation_error("JointWavefunction: cannot normalize zero state");
    kern::ops().cscale(amplitudes.data(), 1.0 / n, amplitudes.size());
}

void JointWavefunction::check_norm(double tol) const {
    double n = norm();
    if (std::abs(n - 1.0) > tol)
        throw validation_error("JointWavefunction: norm " + std::to_string(n) +
                               " outside tolerance");
}

void JointWavefunction::validate() const {
    spatial.validate();
    if (modes.empty() || modes.size() > 2)
        throw validation_error("JointWavefunction: 1 or 2 modes supported");
    if (quad.size() != modes.size())
        throw validation_error("JointWavefunction: grid count does not match modes");
    for (const auto& m : modes) m.validate();
    for (const auto& g : quad) g.validate();
    if (amplitudes.size() != static_cast<std::size_t>(spatial.n_points) * field_points())
        throw validation_error("JointWavefunction: amplitude size mismatch");
}

JointWavefunction joint_product(const ElectronWavefunction& f0,
                                const FieldStateGrid& g0) {
    JointWavefunction psi;
    psi.spatial = f0.grid;
    psi.modes = g0.modes;
    psi.quad = g0.grids;
    std::size_t nq = g0.size();
    psi.amplitudes.resize(static_cast<std::size_t>(f0.grid.n_points) * nq);
    for (int ix = 0; ix < f0.grid.n_points; ++ix)
        for (std::size_t jq = 0; jq < nq; ++jq)
            psi.amplitudes[static_cast<std::size_t>(ix) * nq + jq] =
                f0.psi[ix] * g0.amplitudes[jq];
    psi.validate();
    return psi;
}

void joint_propagate(JointWavefunction& psi, const PotentialSpec& potential,
                     double t, double dt) {
    psi.validate();
    potential.validate();
    if (!(dt > 0.0)) throw validation_error("joint_propagate: dt must be positive");

    const double c = speed_of_light;
    const double tm = t + 0.5 * dt;
    const int nm = static_cast<int>(psi.modes.size());
    const int nx = psi.spatial.n_points;
    const std::size_t nq = psi.field_points();

    // Coupling tables at the step midpoint.
    std::vector<double> pivals(nm), sigmas(nm);
    for (int j = 0; j < nm; ++j) {
        double phi = psi.modes[j].field_phase(tm);
        pivals[j] = psi.modes[j].beta * std::cos(phi);
        sigmas[j] = psi.modes[j].beta * std::sin(phi);
    }
    std::vector<double> ptab(nq, 0.0);
    for (int j = 0; j < nm; ++j) {
        auto qj = field_q_table(psi.quad, j, nq);
        for (std::size_t i = 0; i < nq; ++i) ptab[i] += pivals[j] * qj[i];
    }

    auto kvals = psi.spatial.wavenumbers();
    double k_nyq = pi / psi.spatial.spacing();
    double p_max = 0.0;
    for (double p : ptab) p_max = std::max(p_max, std::abs(p));
    if (p_max / c > 0.5 * k_nyq)
        throw guard_error("joint_propagate: field momentum shift exceeds half the "
                          "spatial Nyquist limit (refine the x grid)");

    // Half potential phase (diagonal in x, constant across q).
    auto half_potential = [&]() {
        if (potential.kind == PotentialSpec::Kind::free) return;
        for (int ix = 0; ix < nx; ++ix) {
            cplx ph = std::exp(cplx(0.0, -0.5 * dt * potential.value(psi.spatial.x(ix), tm)));
            kern::ops().cscale(psi.amplitudes.data() + static_cast<std::size_t>(ix) * nq,
                               ph, nq);
        }
    };

    // Coupling operator template; per k only V and L change.
    QOperator op;
    op.grids = psi.quad;
    op.v.resize(nq);
    op.l.assign(nm, std::vector<double>(nq));
    op.k.resize(static_cast<std::size_t>(nm) * nm);
    for (int a = 0; a < nm; ++a)
        for (int b = 0; b < nm; ++b)
            op.k[static_cast<std::size_t>(a) * nm + b] = -sigmas[a] * sigmas[b] / (2.0 * c * c);

    std::vector<int> shape{nx};
    for (const auto& g : psi.quad) shape.push_back(g.n_points);
    FftAxis& fft = joint_fft(shape);

    half_potential();
    fft.forward(psi.amplitudes.data());
    std::vector<cplx> block(nq);
    for (int ix = 0; ix < nx; ++ix) {
        double k = kvals[ix];
        cplx* base = psi.amplitudes.data() + static_cast<std::size_t>(ix) * nq;
        // Exact kinetic phase; commutes with the k-diagonal coupling block.
        kern::ops().cscale(base, std::exp(cplx(0.0, -0.5 * dt * k * k)), nq);
        for (std::size_t i = 0; i < nq; ++i)
            op.v[i] = -k * ptab[i] / c + ptab[i] * ptab[i] / (2.0 * c * c);
        for (int j = 0; j < nm; ++j) {
            double* lj = op.l[j].data();
            for (std::size_t i = 0; i < nq; ++i)
                lj[i] = sigmas[j] * (ptab[i] / (c * c) - k / c);
        }
        std::copy(base, base + nq, block.begin());
        crank_nicolson(op, block, dt);
        std::copy(block.begin(), block.end(), base);
    }
    fft.backward(psi.amplitudes.data());
    half_potential();
}

Factorization exact_factorize(const JointWavefunction& psi) {
    psi.validate();
    const int nx = psi.spatial.n_points;
    const std::size_t nq = psi.field_points();
    const double dx = psi.spatial.spacing();
    const std::size_t stride = nq; // column (fixed q) elements are nq apart

    std::vector<double> rho(nq, 0.0);
    for (int ix = 0; ix < nx; ++ix) {
        const cplx* row = psi.amplitudes.data() + static_cast<std::size_t>(ix) * nq;
        for (std::size_t jq = 0; jq < nq; ++jq) rho[jq] += std::norm(row[jq]);
    }
    for (std::size_t jq = 0; jq < nq; ++jq) rho[jq] *= dx;

    std::size_t peak = static_cast<std::size_t>(
        std::max_element(rho.begin(), rho.end()) - rho.begin());
    if (!(rho[peak] > 0.0))
        throw validation_error("exact_factorize: state has no populated region");
    double g_floor = 1e-12 * std::sqrt(rho[peak]);

    std::vector<cplx> ref(nx);
    for (int ix = 0; ix < nx; ++ix)
        ref[ix] = psi.amplitudes[static_cast<std::size_t>(ix) * stride + peak];
    double ref_scale = 1.0 / std::sqrt(rho[peak] / dx);
    for (auto& a : ref) a *= ref_scale;

    Factorization out;
    out.field.modes = psi.modes;
    out.field.grids = psi.quad;
    out.field.amplitudes.assign(nq, cplx{});
    out.masked.assign(nq, false);

    out.electron.potential = PotentialSpec{};
    out.electron.spatial = psi.spatial;
    out.electron.q_samples.resize(nq);
    out.electron.samples.resize(nq);

    int nm = static_cast<int>(psi.quad.size());
    for (std::size_t jq = 0; jq < nq; ++jq) {
        std::vector<double> qv(nm);
        std::size_t rem = jq;
        for (int j = nm - 1; j >= 0; --j) {
            int nj = psi.quad[j].n_points;
            qv[j] = psi.quad[j].q(static_cast<int>(rem % nj));
            rem /= static_cast<std::size_t>(nj);
        }
        out.electron.q_samples[jq] = std::move(qv);
        out.electron.samples[jq].grid = psi.spatial;
        auto& f = out.electron.samples[jq].psi;
        f.assign(nx, cplx{});

        double g_abs = std::sqrt(rho[jq]);
        if (g_abs < g_floor) {
            out.masked[jq] = true;
            ++out.n_masked;
            continue;
        }
        cplx proj = 0.0;
        for (int ix = 0; ix < nx; ++ix)
            proj += std::conj(ref[ix]) * psi.amplitudes[static_cast<std::size_t>(ix) * stride + jq];
        cplx g = g_abs * std::exp(cplx(0.0, std::arg(proj)));
        out.field.amplitudes[jq] = g;
        for (int ix = 0; ix < nx; ++ix)
            f[ix] = psi.amplitudes[static_cast<std::size_t>(ix) * stride + jq] / g;
    }
    return out;
}

ComparisonReport compare_to_parametric(const Factorization& oracle,
                                       const FieldStateGrid& approx_field,
                                       const ElectronEnsemble& approx_electron) {
    if (!oracle.field.compatible_with(approx_field))
        throw validation_error("compare_to_parametric: field grids differ");
    std::size_t nq = oracle.field.size();
    if (approx_electron.size() != nq)
        throw validation_error("compare_to_parametric: ensemble does not enumerate "
                               "the field grid");
    for (std::size_t jq = 0; jq < nq; ++jq) {
        const auto& qa = oracle.electron.q_samples[jq];
        const auto& qb = approx_electron.q_samples[jq];
        if (qa.size() != qb.size())
            throw validation_error("compare_to_parametric: sample mode counts differ");
        for (std::size_t j = 0; j < qa.size(); ++j)
            if (std::abs(qa[j] - qb[j]) > 1e-9)
                throw validation_error("compare_to_parametric: sample q values differ");
    }

    ComparisonReport rep;
    rep.masked_points = oracle.n_masked;

    double no = oracle.field.norm(), na = approx_field.norm();
    rep.field_infidelity = 1.0 - std::abs(inner(oracle.field, approx_field)) / (no * na);

    double cell = oracle.field.cell();
    double wsum = 0.0, esum = 0.0, dsum = 0.0;
    for (std::size_t jq = 0; jq < nq; ++jq) {
        double po = std::norm(oracle.field.amplitudes[jq]) / (no * no);
        double pa = std::norm(approx_field.amplitudes[jq]) / (na * na);
        dsum += (po - pa) * (po - pa) * cell;
        if (oracle.masked[jq]) continue;
        const auto& fo = oracle.electron.samples[jq];
        const auto& fa = approx_electron.samples[jq];
        double fno = fo.norm(), fna = fa.norm();
        double fid = fno > 0.0 && fna > 0.0
                         ? std::abs(inner(fo, fa)) / (fno * fna)
                         : 0.0;
        double w = po * cell;
        wsum += w;
        esum += w * (1.0 - fid);
    }
    rep.density_distance = std::sqrt(dsum);
    rep.electron_infidelity = wsum > 0.0 ? esum / wsum : 0.0;
    rep.total_infidelity = rep.field_infidelity + rep.electron_infidelity;
    return rep;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw validation_error("loglog_slope: need at least two points");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0))
            throw validation_error("loglog_slope: values must be positive");
        double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    double denom = n * sxx - sx * sx;
    if (std::abs(denom) < 1e-30)
        throw validation_error("loglog_slope: degenerate abscissae");
    return (n * sxy - sx * sy) / denom;
}

} // namespace qlm
