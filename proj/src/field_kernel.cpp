#include "qlm/field_kernel.hpp"

#include "qlm/constants.hpp"
#include "qlm/errors.hpp"
#include "qlm/fft.hpp"
#include "qlm/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace qlm {

namespace {

const cplx im{0.0, 1.0};

// Weight array over the full tensor that depends on one mode's coordinate.
std::vector<double> axis_weight(const FieldStateGrid& s, int mode_index,
                                const std::function<double(double)>& f) {
    std::vector<int> shape = s.shape();
    std::size_t inner = 1;
    for (std::size_t i = mode_index + 1; i < shape.size(); ++i) inner *= shape[i];
    std::vector<double> w(s.size());
    const auto& g = s.grids[mode_index];
    int n = g.n_points;
    std::size_t block = inner * static_cast<std::size_t>(n);
    for (std::size_t outer = 0; outer < w.size(); outer += block)
        for (int i = 0; i < n; ++i) {
            double v = f(g.q(i));
            for (std::size_t k = 0; k < inner; ++k) w[outer + i * inner + k] = v;
        }
    return w;
}

} // namespace

cplx coherent_amplitude(const ModeSpec& mode, double t, double q) {
    double n0 = mode.n_photons;
    double phi = mode.phase(t); // omega*t - theta
    cplx rot = std::exp(-im * phi);
    cplx log_c = -0.25 * std::log(pi) - 0.5 * n0 - im * (0.5 * mode.omega * t) -
                 0.5 * n0 * rot * rot;
    cplx log_psi = log_c - 0.5 * q * q + q * rot * std::sqrt(2.0 * n0);
    return std::exp(log_psi);
}

FieldStateGrid coherent_state_grid(const std::vector<ModeSpec>& modes, double t,
                                   const std::vector<QuadratureGrid>& grids) {
    if (modes.size() != grids.size() || modes.empty())
        throw validation_error("coherent_state_grid: mode/grid count mismatch");
    FieldStateGrid s;
    s.modes = modes;
    s.grids = grids;
    std::vector<std::vector<cplx>> factors;
    for (std::size_t j = 0; j < modes.size(); ++j) {
        std::vector<cplx> f(grids[j].n_points);
        for (int i = 0; i < grids[j].n_points; ++i)
            f[i] = coherent_amplitude(modes[j], t, grids[j].q(i));
        factors.push_back(std::move(f));
    }
    std::size_t total = 1;
    for (const auto& f : factors) total *= f.size();
    s.amplitudes.resize(total);
    std::vector<int> shape = s.shape();
    for (std::size_t idx = 0; idx < total; ++idx) {
        std::size_t rem = idx;
        cplx v = 1.0;
        for (int j = static_cast<int>(shape.size()) - 1; j >= 0; --j) {
            v *= factors[j][rem % shape[j]];
            rem /= shape[j];
        }
        s.amplitudes[idx] = v;
    }
    return s;
}

FieldStateGrid coherent_state_grid(const ModeSpec& mode, double t,
                                   const QuadratureGrid& grid) {
    return coherent_state_grid(std::vector<ModeSpec>{mode}, t,
                               std::vector<QuadratureGrid>{grid});
}

std::vector<cplx> axis_derivative(const FieldStateGrid& state, int mode_index, int order) {
    std::vector<int> shape = state.shape();
    std::vector<cplx> work = state.amplitudes;
    FftAxis fft(shape, mode_index);
    fft.forward(work.data());
    auto ks = fft_wavenumbers(shape[mode_index], state.grids[mode_index].spacing());
    // multiply by (ik)^order along the axis
    std::size_t inner = 1;
    for (std::size_t i = mode_index + 1; i < shape.size(); ++i) inner *= shape[i];
    int n = shape[mode_index];
    std::size_t block = inner * static_cast<std::size_t>(n);
    for (std::size_t outer = 0; outer < work.size(); outer += block)
        for (int i = 0; i < n; ++i) {
            cplx f = std::pow(im * ks[i], order);
            for (std::size_t k = 0; k < inner; ++k) work[outer + i * inner + k] *= f;
        }
    fft.backward(work.data());
    return work;
}

namespace {

// Richardson-style resolution guard: recompute the spectral derivative on the
// half-resolution subsample and compare at the shared points.
void check_derivative_resolution(const FieldStateGrid& state, int mode_index) {
    const auto& g = state.grids[mode_index];
    if (g.n_points % 2 != 0 || state.n_modes() != 1) return; // guard only for 1-D states
    FieldStateGrid half;
    half.modes = state.modes;
    QuadratureGrid hg{g.q_min, g.q_max, g.n_points / 2};
    half.grids = {hg};
    half.amplitudes.resize(hg.n_points);
    for (int i = 0; i < hg.n_points; ++i) half.amplitudes[i] = state.amplitudes[2 * i];
    auto d_full = axis_derivative(state, mode_index, 1);
    auto d_half = axis_derivative(half, mode_index, 1);
    double num = 0.0, den = 0.0;
    for (int i = 0; i < hg.n_points; ++i) {
        num += std::norm(d_full[2 * i] - d_half[i]);
        den += std::norm(d_full[2 * i]);
    }
    if (den > 0.0 && std::sqrt(num / den) > 1e-6)
        throw guard_error("apply_ladder: grid too coarse for derivative accuracy");
}

} // namespace

FieldStateGrid apply_ladder(const FieldStateGrid& state, int mode_index, Ladder which,
                            bool check_resolution) {
    if (mode_index < 0 || mode_index >= state.n_modes())
        throw validation_error("apply_ladder: bad mode index");
    if (check_resolution) check_derivative_resolution(state, mode_index);
    FieldStateGrid out = state;
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    if (which == Ladder::number) {
        auto d2 = axis_derivative(state, mode_index, 2);
        auto w = axis_weight(state, mode_index, [](double q) { return q * q; });
        for (std::size_t i = 0; i < out.size(); ++i)
            out.amplitudes[i] = 0.5 * (w[i] * state.amplitudes[i] - d2[i]);
        return out;
    }
    auto d1 = axis_derivative(state, mode_index, 1);
    auto w = axis_weight(state, mode_index, [](double q) { return q; });
    double sign = (which == Ladder::annihilation) ? 1.0 : -1.0;
    for (std::size_t i = 0; i < out.size(); ++i)
        out.amplitudes[i] = inv_sqrt2 * (w[i] * state.amplitudes[i] + sign * d1[i]);
    return out;
}

cplx expectation(const FieldStateGrid& state, FieldObservable obs, int mode_index,
                 double t, Picture picture) {
    state.check_norm(1e-6);
    const auto& kops = kern::ops();
    double cell = state.cell();
    switch (obs) {
    case FieldObservable::position: {
        auto w = axis_weight(state, mode_index, [](double q) { return q; });
        return kops.weighted_abs2(state.amplitudes.data(), w.data(), state.size()) * cell;
    }
    case FieldObservable::derivative: {
        auto d1 = axis_derivative(state, mode_index, 1);
        return kops.cdot(state.amplitudes.data(), d1.data(), state.size()) * cell;
    }
    case FieldObservable::number: {
        // <N> = (<q^2> + <k^2>)/2 with the momentum part via Parseval.
        auto wq = axis_weight(state, mode_index, [](double q) { return q * q; });
        double q2 = kops.weighted_abs2(state.amplitudes.data(), wq.data(), state.size()) * cell;
        std::vector<int> shape = state.shape();
        std::vector<cplx> work = state.amplitudes;
        FftAxis fft(shape, mode_index);
        fft.forward(work.data());
        auto ks = fft_wavenumbers(shape[mode_index], state.grids[mode_index].spacing());
        std::size_t inner = 1;
        for (std::size_t i = mode_index + 1; i < shape.size(); ++i) inner *= shape[i];
        int n = shape[mode_index];
        std::vector<double> wk(state.size());
        std::size_t block = inner * static_cast<std::size_t>(n);
        for (std::size_t outer = 0; outer < wk.size(); outer += block)
            for (int i = 0; i < n; ++i)
                for (std::size_t k = 0; k < inner; ++k)
                    wk[outer + i * inner + k] = ks[i] * ks[i];
        double k2 = kops.weighted_abs2(work.data(), wk.data(), work.size()) * cell / n;
        return 0.5 * (q2 + k2);
    }
    case FieldObservable::vector_potential: {
        const ModeSpec& m = state.modes[mode_index];
        if (picture == Picture::schroedinger) {
            // (beta/sqrt(2)) (<a> e^{i kz} + <a+> e^{-i kz})
            cplx qv = expectation(state, FieldObservable::position, mode_index);
            cplx dv = expectation(state, FieldObservable::derivative, mode_index);
            cplx a = (qv + dv) / std::sqrt(2.0);
            cplx ap = (qv - dv) / std::sqrt(2.0);
            cplx kz = std::exp(im * m.kappa_dot_r);
            return m.beta / std::sqrt(2.0) * (a * kz + ap * std::conj(kz));
        }
        double ph = m.field_phase(t);
        cplx qv = expectation(state, FieldObservable::position, mode_index);
        cplx dv = expectation(state, FieldObservable::derivative, mode_index);
        return m.beta * (qv * std::cos(ph) + im * dv * std::sin(ph));
    }
    }
    throw validation_error("expectation: unknown observable");
}

namespace {

// Orthonormal oscillator eigenfunctions sampled on a grid.
struct HermiteBasis {
    int m_max;
    int n;
    double dq;
    std::vector<double> h; // [m][i], row-major

    HermiteBasis(const QuadratureGrid& g, int m) : m_max(m), n(g.n_points), dq(g.spacing()) {
        h.resize(static_cast<std::size_t>(m_max) * n);
        for (int i = 0; i < n; ++i) {
            double q = g.q(i);
            double h0 = std::pow(pi, -0.25) * std::exp(-0.5 * q * q);
            double hm1 = 0.0;
            h[i] = h0;
            for (int mi = 1; mi < m_max; ++mi) {
                double hm = std::sqrt(2.0 / mi) * q * h[(mi - 1) * static_cast<std::size_t>(n) + i] -
                            std::sqrt((mi - 1.0) / mi) * hm1;
                hm1 = h[(mi - 1) * static_cast<std::size_t>(n) + i];
                h[mi * static_cast<std::size_t>(n) + i] = hm;
            }
        }
    }
};

// exp(-i*angle*(m + 1/2)) in the oscillator eigenbasis of one line.
void rotate_line_hermite(cplx* line, int n, const HermiteBasis& basis, double angle,
                         double tail_tol) {
    std::vector<cplx> coef(basis.m_max);
    for (int m = 0; m < basis.m_max; ++m) {
        const double* hm = basis.h.data() + static_cast<std::size_t>(m) * n;
        cplx c = 0.0;
        for (int i = 0; i < n; ++i) c += hm[i] * line[i];
        coef[m] = c * basis.dq;
    }
    double total = kern::ops().norm_sq(line, n) * basis.dq;
    double captured = 0.0;
    for (const cplx& c : coef) captured += std::norm(c);
    if (total > 0.0 && (total - captured) / total > tail_tol)
        throw guard_error("apply_number_phase: oscillator-basis tail " +
                          std::to_string((total - captured) / total) +
                          " exceeds tolerance (grid too coarse or too narrow)");
    std::fill(line, line + n, cplx{});
    for (int m = 0; m < basis.m_max; ++m) {
        cplx f = coef[m] * std::exp(-im * angle * (m + 0.5));
        const double* hm = basis.h.data() + static_cast<std::size_t>(m) * n;
        for (int i = 0; i < n; ++i) line[i] += f * hm[i];
    }
}

// Split-operator fallback for grids whose edges underflow the oscillator
// ground state: Strang alternation of exp(-i phi q^2/2) and exp(-i phi k^2/2).
void number_phase_strang(FieldStateGrid& state, int mode_index, double angle) {
    const auto& g = state.grids[mode_index];
    double q_edge = std::max(std::abs(g.q_min), std::abs(g.q_max));
    // local error ~ q_edge^2 * phi_s^2 per unit phase; target 1e-8 total
    double phi_s = std::sqrt(8e-9 / std::max(q_edge * q_edge * std::abs(angle), 1e-30));
    int steps = static_cast<int>(std::ceil(std::abs(angle) / std::min(phi_s, 1e-2)));
    steps = std::clamp(steps, 1, 4000000);
    double phi = angle / steps;
    std::vector<int> shape = state.shape();
    FftAxis fft(shape, mode_index);
    auto ks = fft_wavenumbers(g.n_points, g.spacing());
    auto wq = axis_weight(state, mode_index, [](double q) { return q * q; });
    std::size_t inner = 1;
    for (std::size_t i = mode_index + 1; i < shape.size(); ++i) inner *= shape[i];
    int n = g.n_points;
    std::size_t block = inner * static_cast<std::size_t>(n);
    std::vector<cplx> half_q(state.size()), full_k(state.size());
    for (std::size_t i = 0; i < state.size(); ++i)
        half_q[i] = std::exp(-im * (0.25 * phi) * wq[i]);
    for (std::size_t outer = 0; outer < state.size(); outer += block)
        for (int i = 0; i < n; ++i) {
            cplx f = std::exp(-im * (0.5 * phi) * (ks[i] * ks[i]));
            for (std::size_t k = 0; k < inner; ++k) full_k[outer + i * inner + k] = f;
        }
    auto& a = state.amplitudes;
    const auto& kops = kern::ops();
    for (int s = 0; s < steps; ++s) {
        kops.cmul(a.data(), half_q.data(), a.size());
        fft.forward(a.data());
        kops.cmul(a.data(), full_k.data(), a.size());
        fft.backward(a.data());
        kops.cmul(a.data(), half_q.data(), a.size());
    }
}

} // namespace

void apply_number_phase(FieldStateGrid& state, int mode_index, double angle,
                        double tail_tol) {
    if (mode_index < 0 || mode_index >= state.n_modes())
        throw validation_error("apply_number_phase: bad mode index");
    if (angle == 0.0) return;
    const auto& g = state.grids[mode_index];
    double q_edge = std::max(std::abs(g.q_min), std::abs(g.q_max));
    int m_max = static_cast<int>(std::ceil(0.5 * q_edge * q_edge + 4.0 * q_edge + 32.0));
    bool underflow = 0.5 * q_edge * q_edge > 600.0;
    std::size_t mem = static_cast<std::size_t>(m_max) * g.n_points * sizeof(double);
    if (underflow || mem > (256u << 20)) {
        number_phase_strang(state, mode_index, angle);
        return;
    }
    HermiteBasis basis(g, m_max);
    std::vector<int> shape = state.shape();
    for_each_line(state.amplitudes, shape, mode_index, [&](cplx* line, int n) {
        rotate_line_hermite(line, n, basis, angle, tail_tol);
    });
}

FieldStateGrid evolve_vacuum(const FieldStateGrid& state, double dt, double tail_tol) {
    if (!(dt > 0.0)) throw validation_error("evolve_vacuum: dt must be > 0");
    FieldStateGrid out = state;
    for (int j = 0; j < out.n_modes(); ++j)
        apply_number_phase(out, j, out.modes[j].omega * dt, tail_tol);
    return out;
}

} // namespace qlm
