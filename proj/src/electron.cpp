#include "qlm/electron.hpp"

#include "qlm/constants.hpp"
#include "qlm/errors.hpp"
#include "qlm/fft.hpp"
#include "qlm/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>

namespace qlm {

namespace {

// FFTW plan creation is not free; reuse one transform per grid size.
const FftAxis& spatial_fft(int n) {
    static std::map<int, FftAxis> cache;
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, FftAxis({n}, 0)).first;
    return it->second;
}

} // namespace

double PotentialSpec::stiffness(double t) const {
    if (u_of_t) return u_of_t(t);
    return u;
}

double PotentialSpec::value(double x, double t) const {
    switch (kind) {
    case Kind::free: return 0.0;
    case Kind::quadratic: return stiffness(t) * x * x;
    case Kind::softcore: return -depth / std::sqrt(x * x + smoothing);
    }
    return 0.0;
}

void PotentialSpec::validate() const {
    if (kind == Kind::quadratic && !u_of_t && !std::isfinite(u))
        throw validation_error("PotentialSpec: quadratic stiffness must be finite");
    if (kind == Kind::softcore && !(smoothing > 0.0))
        throw validation_error("PotentialSpec: softcore smoothing must be positive");
}

double ElectronWavefunction::norm() const {
    return std::sqrt(kern::ops().norm_sq(psi.data(), psi.size()) * grid.spacing());
}

void ElectronWavefunction::normalize() {
    double n = norm();
    if (n <= 0.0) throw solver_error("ElectronWavefunction: cannot normalize zero state");
    kern::ops().cscale(psi.data(), 1.0 / n, psi.size());
}

void ElectronWavefunction::check_norm(double tol) const {
    double n = norm();
    if (std::abs(n - 1.0) > tol)
        throw validation_error("ElectronWavefunction: norm " + std::to_string(n) +
                               " deviates from 1 beyond tolerance");
}

cplx inner(const ElectronWavefunction& a, const ElectronWavefunction& b) {
    if (a.psi.size() != b.psi.size())
        throw validation_error("inner: electron grids differ");
    return kern::ops().cdot(a.psi.data(), b.psi.data(), a.psi.size()) * a.grid.spacing();
}

ElectronWavefunction gaussian_packet(const SpatialGrid& grid, double center,
                                     double width, double momentum) {
    grid.validate();
    if (!(width > 0.0)) throw validation_error("gaussian_packet: width must be positive");
    ElectronWavefunction f{grid, std::vector<cplx>(grid.n_points)};
    double norm = std::pow(pi * width * width, -0.25);
    for (int i = 0; i < grid.n_points; ++i) {
        double dxc = grid.x(i) - center;
        f.psi[i] = norm * std::exp(cplx(-dxc * dxc / (2.0 * width * width),
                                        momentum * dxc));
    }
    return f;
}

ElectronExpectations electron_expectations(const ElectronWavefunction& f,
                                           const PotentialSpec& potential, double t) {
    f.check_norm(1e-6);
    const auto& g = f.grid;
    std::size_t n = f.psi.size();
    double dx = g.spacing();

    ElectronExpectations e;
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = g.x(static_cast<int>(i));
    e.x = kern::ops().weighted_abs2(f.psi.data(), w.data(), n) * dx;
    for (std::size_t i = 0; i < n; ++i) w[i] *= w[i];
    e.x2 = kern::ops().weighted_abs2(f.psi.data(), w.data(), n) * dx;
    for (std::size_t i = 0; i < n; ++i)
        w[i] = potential.value(g.x(static_cast<int>(i)), t);
    e.potential = kern::ops().weighted_abs2(f.psi.data(), w.data(), n) * dx;

    // Momentum moments by Parseval: forward FFT carries weight dx/n.
    std::vector<cplx> spec = f.psi;
    spatial_fft(g.n_points).forward(spec.data());
    std::vector<double> k = g.wavenumbers();
    double scale = dx / static_cast<double>(n);
    e.p = kern::ops().weighted_abs2(spec.data(), k.data(), n) * scale;
    for (std::size_t i = 0; i < n; ++i) k[i] *= k[i];
    e.p2 = kern::ops().weighted_abs2(spec.data(), k.data(), n) * scale;
    return e;
}

ElectronWavefunction split_step(const ElectronWavefunction& f,
                                const std::function<double(double)>& a_of_t,
                                const PotentialSpec& potential, double t, double dt) {
    if (!(dt > 0.0)) throw validation_error("split_step: dt must be positive");
    const auto& g = f.grid;
    int n = g.n_points;
    double a_mid = a_of_t ? a_of_t(t + 0.5 * dt) : 0.0;
    double k_nyq = pi / g.spacing();
    if (std::abs(a_mid) / speed_of_light > 0.5 * k_nyq)
        throw guard_error("split_step: A/c momentum shift exceeds half the grid "
                          "Nyquist wavenumber (aliasing)");

    ElectronWavefunction out = f;
    double t_mid = t + 0.5 * dt;
    if (potential.kind != PotentialSpec::Kind::free) {
        for (int i = 0; i < n; ++i)
            out.psi[i] *= std::exp(cplx(0.0, -0.5 * dt * potential.value(g.x(i), t_mid)));
    }
    spatial_fft(n).forward(out.psi.data());
    std::vector<double> k = g.wavenumbers();
    for (int i = 0; i < n; ++i) {
        double kin = k[i] - a_mid / speed_of_light;
        out.psi[i] *= std::exp(cplx(0.0, -0.5 * dt * kin * kin));
    }
    spatial_fft(n).backward(out.psi.data());
    if (potential.kind != PotentialSpec::Kind::free) {
        for (int i = 0; i < n; ++i)
            out.psi[i] *= std::exp(cplx(0.0, -0.5 * dt * potential.value(g.x(i), t_mid)));
    }
    return out;
}

ElectronWavefunction volkov_evolve(const ElectronWavefunction& f0, const CosSum& a,
                                   const PotentialSpec& potential, double t) {
    if (potential.kind != PotentialSpec::Kind::free)
        throw validation_error("volkov_evolve: requires a free electron");
    const auto& g = f0.grid;
    int n = g.n_points;
    double ia = a.integral(t);
    double ia2 = a.integral_sq(t);
    double c = speed_of_light;

    ElectronWavefunction out = f0;
    spatial_fft(n).forward(out.psi.data());
    std::vector<double> k = g.wavenumbers();
    for (int i = 0; i < n; ++i) {
        double phase = -0.5 * t * k[i] * k[i] + (k[i] / c) * ia - ia2 / (2.0 * c * c);
        out.psi[i] *= std::exp(cplx(0.0, phase));
    }
    spatial_fft(n).backward(out.psi.data());
    return out;
}

void ElectronEnsemble::validate() const {
    potential.validate();
    spatial.validate();
    if (samples.size() != q_samples.size())
        throw validation_error("ElectronEnsemble: sample/q count mismatch");
    for (std::size_t j = 0; j < samples.size(); ++j) {
        if (samples[j].psi.size() != static_cast<std::size_t>(spatial.n_points))
            throw validation_error("ElectronEnsemble: sample " + std::to_string(j) +
                                   " has wrong grid size");
        samples[j].check_norm();
    }
}

void ElectronEnsemble::refresh_expectations(double t) {
    expectations.resize(samples.size());
    for (std::size_t j = 0; j < samples.size(); ++j)
        expectations[j] = electron_expectations(samples[j], potential, t);
}

void ElectronEnsemble::save(const std::string& path) const {
    if (potential.u_of_t)
        throw validation_error("ElectronEnsemble: time-dependent stiffness is not "
                               "checkpointable");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw solver_error("ElectronEnsemble: cannot open " + path);
    auto put = [&out](double v) { out.write(reinterpret_cast<const char*>(&v), 8); };
    put(static_cast<double>(static_cast<int>(potential.kind)));
    put(potential.u);
    put(potential.depth);
    put(potential.smoothing);
    put(spatial.x_min);
    put(spatial.x_max);
    put(static_cast<double>(spatial.n_points));
    std::size_t n_modes = q_samples.empty() ? 0 : q_samples[0].size();
    put(static_cast<double>(n_modes));
    put(static_cast<double>(samples.size()));
    for (std::size_t j = 0; j < samples.size(); ++j) {
        for (double q : q_samples[j]) put(q);
        for (const cplx& z : samples[j].psi) {
            put(z.real());
            put(z.imag());
        }
    }
    if (!out) throw solver_error("ElectronEnsemble: write failed for " + path);
}

ElectronEnsemble ElectronEnsemble::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw solver_error("ElectronEnsemble: cannot open " + path);
    auto get = [&in]() {
        double v;
        in.read(reinterpret_cast<char*>(&v), 8);
        return v;
    };
    ElectronEnsemble ens;
    ens.potential.kind = static_cast<PotentialSpec::Kind>(static_cast<int>(get()));
    ens.potential.u = get();
    ens.potential.depth = get();
    ens.potential.smoothing = get();
    ens.spatial.x_min = get();
    ens.spatial.x_max = get();
    ens.spatial.n_points = static_cast<int>(get());
    std::size_t n_modes = static_cast<std::size_t>(get());
    std::size_t n_samples = static_cast<std::size_t>(get());
    if (!in || n_samples == 0 || n_samples > (1u << 24))
        throw solver_error("ElectronEnsemble: bad header in " + path);
    for (std::size_t j = 0; j < n_samples; ++j) {
        std::vector<double> q(n_modes);
        for (double& v : q) v = get();
        ens.q_samples.push_back(std::move(q));
        ElectronWavefunction f{ens.spatial, std::vector<cplx>(ens.spatial.n_points)};
        for (cplx& z : f.psi) {
            double re = get();
            double im = get();
            z = cplx(re, im);
        }
        ens.samples.push_back(std::move(f));
    }
    if (!in) throw solver_error("ElectronEnsemble: truncated payload in " + path);
    return ens;
}

ElectronEnsemble make_ensemble(const PotentialSpec& potential, const SpatialGrid& grid,
                               std::vector<std::vector<double>> q_samples,
                               double center, double width, double momentum) {
    ElectronEnsemble ens;
    ens.potential = potential;
    ens.spatial = grid;
    ens.q_samples = std::move(q_samples);
    auto f0 = gaussian_packet(grid, center, width, momentum);
    ens.samples.assign(ens.q_samples.size(), f0);
    ens.refresh_expectations(0.0);
    return ens;
}

ElectronEnsemble ensemble_propagate(
    const ElectronEnsemble& ens,
    const std::function<ParametricField(const std::vector<double>&)>& pf_builder,
    double t, double dt) {
    ElectronEnsemble out = ens;
    for (std::size_t j = 0; j < out.samples.size(); ++j) {
        try {
            std::function<double(double)> a_of_t;
            if (pf_builder) {
                ParametricField pf = pf_builder(out.q_samples[j]);
                // Electron propagation uses the strong-field (real) part.
                a_of_t = [pf](double tt) { return vector_potential(pf, tt).real(); };
            }
            out.samples[j] = split_step(out.samples[j], a_of_t, out.potential, t, dt);
        } catch (const guard_error& e) {
            throw guard_error("sample " + std::to_string(j) + ": " + e.what());
        } catch (const solver_error& e) {
            throw solver_error("sample " + std::to_string(j) + ": " + e.what());
        } catch (const validation_error& e) {
            throw validation_error("sample " + std::to_string(j) + ": " + e.what());
        }
    }
    out.refresh_expectations(t + dt);
    return out;
}

std::vector<cplx> static_gauge_residual(const ElectronEnsemble& prev,
                                        const ElectronEnsemble& next, double dt) {
    if (prev.size() != next.size())
        throw validation_error("static_gauge_residual: ensemble sizes differ");
    if (!(dt > 0.0)) throw validation_error("static_gauge_residual: dt must be positive");
    std::vector<cplx> res(prev.size());
    for (std::size_t j = 0; j < prev.size(); ++j) {
        std::vector<cplx> diff = next.samples[j].psi;
        const auto& a = prev.samples[j].psi;
        for (std::size_t i = 0; i < diff.size(); ++i) diff[i] -= a[i];
        res[j] = kern::ops().cdot(a.data(), diff.data(), a.size()) *
                 prev.spatial.spacing() / dt;
    }
    return res;
}

double gauge_real_residual(cplx r, double dt) {
    return (std::abs(1.0 + r * dt) - 1.0) / dt;
}

double default_time_step(const std::vector<ModeSpec>& modes, const SpatialGrid& grid) {
    double dt = std::numeric_limits<double>::infinity();
    for (const auto& m : modes) dt = std::min(dt, m.period() / 400.0);
    double k_nyq = pi / grid.spacing();
    double t_grid = 2.0 * pi / (0.5 * k_nyq * k_nyq);
    dt = std::min(dt, t_grid / 10.0);
    if (!std::isfinite(dt))
        throw validation_error("default_time_step: no modes and no grid bound");
    return dt;
}

} // namespace qlm
