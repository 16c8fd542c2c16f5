#include "qlm/coupling.hpp"

#include "qlm/errors.hpp"
#include "qlm/field_kernel.hpp"

#include <cmath>

namespace qlm {

void ParametricField::validate() const {
    if (modes.empty() || modes.size() != q_values.size())
        throw validation_error("ParametricField: mode/q count mismatch");
    for (const auto& m : modes) m.validate();
}

double local_substitution(const ModeSpec& mode, double q) {
    return -(q - mode.center());
}

cplx vector_potential(const ParametricField& pf, double t) {
    pf.validate();
    cplx a = 0.0;
    for (std::size_t j = 0; j < pf.modes.size(); ++j) {
        const ModeSpec& m = pf.modes[j];
        double ph = m.field_phase(t);
        a += m.beta * pf.q_values[j] * std::cos(ph);
        if (pf.include_sine_term) {
            // -i beta (G0^-1 dG0/dq) sin(kappa r - omega t - theta)
            a += cplx(0.0, 1.0) * m.beta * local_substitution(m, pf.q_values[j]) *
                 std::sin(ph);
        }
    }
    return a;
}

FieldStateGrid interaction_picture_map(const FieldStateGrid& state, double t,
                                       PictureMap direction) {
    if (t < 0.0) throw validation_error("interaction_picture_map: t must be >= 0");
    FieldStateGrid out = state;
    for (int j = 0; j < out.n_modes(); ++j) {
        const ModeSpec& m = out.modes[j];
        double angle = m.theta - m.omega * t; // to_interaction rotation
        if (direction == PictureMap::to_schroedinger) angle = -angle;
        apply_number_phase(out, j, angle);
    }
    return out;
}

double CosSum::value(double t) const {
    double a = 0.0;
    for (const Term& c : terms) a += c.amp * std::cos(c.omega * t + c.phase0);
    return a;
}

double CosSum::integral(double t) const {
    double s = 0.0;
    for (const Term& c : terms) {
        if (std::abs(c.omega) < 1e-300)
            s += c.amp * t * std::cos(c.phase0);
        else
            s += c.amp * (std::sin(c.omega * t + c.phase0) - std::sin(c.phase0)) / c.omega;
    }
    return s;
}

namespace {
// int_0^t cos(W tau + ph) dtau
double cos_integral(double w, double ph, double t) {
    if (std::abs(w) < 1e-12) return t * std::cos(ph);
    return (std::sin(w * t + ph) - std::sin(ph)) / w;
}
} // namespace

double CosSum::integral_sq(double t) const {
    double s = 0.0;
    for (const Term& a : terms)
        for (const Term& b : terms) {
            double pref = 0.5 * a.amp * b.amp;
            s += pref * cos_integral(a.omega - b.omega, a.phase0 - b.phase0, t);
            s += pref * cos_integral(a.omega + b.omega, a.phase0 + b.phase0, t);
        }
    return s;
}

CosSum CosSum::from_parametric(const ParametricField& pf) {
    pf.validate();
    CosSum cs;
    for (std::size_t j = 0; j < pf.modes.size(); ++j) {
        const ModeSpec& m = pf.modes[j];
        cs.terms.push_back({m.beta * pf.q_values[j], m.omega, -m.theta - m.kappa_dot_r});
    }
    return cs;
}

} // namespace qlm
