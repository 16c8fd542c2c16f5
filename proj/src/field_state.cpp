#include "qlm/field_state.hpp"

#include "qlm/errors.hpp"
#include "qlm/kernels.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>

namespace qlm {

std::vector<int> FieldStateGrid::shape() const {
    std::vector<int> s;
    s.reserve(grids.size());
    for (const auto& g : grids) s.push_back(g.n_points);
    return s;
}

double FieldStateGrid::cell() const {
    double c = 1.0;
    for (const auto& g : grids) c *= g.spacing();
    return c;
}

double FieldStateGrid::norm() const {
    return std::sqrt(kern::ops().norm_sq(amplitudes.data(), amplitudes.size()) * cell());
}

void FieldStateGrid::normalize() {
    double n = norm();
    if (n <= 0.0) throw solver_error("FieldStateGrid: cannot normalize zero state");
    kern::ops().cscale(amplitudes.data(), 1.0 / n, amplitudes.size());
}

void FieldStateGrid::check_norm(double tol) const {
    double n = norm();
    if (std::abs(n - 1.0) > tol)
        throw validation_error("FieldStateGrid: norm " + std::to_string(n) +
                               " deviates from 1 beyond tolerance");
}

bool FieldStateGrid::compatible_with(const FieldStateGrid& other) const {
    if (n_modes() != other.n_modes() || size() != other.size()) return false;
    for (int j = 0; j < n_modes(); ++j) {
        if (grids[j].n_points != other.grids[j].n_points) return false;
        if (std::abs(grids[j].q_min - other.grids[j].q_min) > 1e-12) return false;
        if (std::abs(grids[j].q_max - other.grids[j].q_max) > 1e-12) return false;
    }
    return true;
}

void FieldStateGrid::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw solver_error("FieldStateGrid: cannot open " + path);
    auto put = [&out](double v) { out.write(reinterpret_cast<const char*>(&v), 8); };
    put(static_cast<double>(n_modes()));
    for (int j = 0; j < n_modes(); ++j) {
        const auto& m = modes[j];
        const auto& g = grids[j];
        put(m.omega);
        put(m.theta);
        put(m.n_photons);
        put(m.beta);
        put(m.kappa_dot_r);
        put(g.q_min);
        put(g.q_max);
        put(static_cast<double>(g.n_points));
    }
    for (const cplx& z : amplitudes) {
        put(z.real());
        put(z.imag());
    }
    if (!out) throw solver_error("FieldStateGrid: write failed for " + path);
}

FieldStateGrid FieldStateGrid::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw solver_error("FieldStateGrid: cannot open " + path);
    auto get = [&in]() {
        double v;
        in.read(reinterpret_cast<char*>(&v), 8);
        return v;
    };
    FieldStateGrid s;
    int nm = static_cast<int>(get());
    if (!in || nm < 1 || nm > 16) throw solver_error("FieldStateGrid: bad header in " + path);
    std::size_t total = 1;
    for (int j = 0; j < nm; ++j) {
        ModeSpec m;
        QuadratureGrid g;
        m.omega = get();
        m.theta = get();
        m.n_photons = get();
        m.beta = get();
        m.kappa_dot_r = get();
        g.q_min = get();
        g.q_max = get();
        g.n_points = static_cast<int>(get());
        s.modes.push_back(m);
        s.grids.push_back(g);
        total *= static_cast<std::size_t>(g.n_points);
    }
    s.amplitudes.resize(total);
    for (cplx& z : s.amplitudes) {
        double re = get();
        double im = get();
        z = cplx(re, im);
    }
    if (!in) throw solver_error("FieldStateGrid: truncated payload in " + path);
    return s;
}

cplx inner(const FieldStateGrid& a, const FieldStateGrid& b) {
    if (!a.compatible_with(b))
        throw validation_error("inner: incompatible field states");
    return kern::ops().cdot(a.amplitudes.data(), b.amplitudes.data(), a.size()) * a.cell();
}

void for_each_line(std::vector<cplx>& data, const std::vector<int>& shape, int axis,
                   const std::function<void(cplx*, int)>& fn) {
    int n = shape[axis];
    std::size_t inner_stride = 1;
    for (std::size_t i = axis + 1; i < shape.size(); ++i) inner_stride *= shape[i];
    std::size_t total = data.size();
    std::size_t block = inner_stride * static_cast<std::size_t>(n);
    std::vector<cplx> line(n);
    for (std::size_t outer = 0; outer < total; outer += block) {
        for (std::size_t in = 0; in < inner_stride; ++in) {
            cplx* base = data.data() + outer + in;
            for (int i = 0; i < n; ++i) line[i] = base[i * inner_stride];
            fn(line.data(), n);
            for (int i = 0; i < n; ++i) base[i * inner_stride] = line[i];
        }
    }
}

} // namespace qlm
