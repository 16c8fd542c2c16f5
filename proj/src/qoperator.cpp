#include "qlm/qoperator.hpp"

#include "qlm/errors.hpp"
#include "qlm/kernels.hpp"

#include <cmath>
#include <numeric>

namespace qlm {

std::vector<int> QOperator::shape() const {
    std::vector<int> s;
    s.reserve(grids.size());
    for (const auto& g : grids) s.push_back(g.n_points);
    return s;
}

std::size_t QOperator::total() const {
    std::size_t t = 1;
    for (const auto& g : grids) t *= static_cast<std::size_t>(g.n_points);
    return t;
}

void QOperator::validate() const {
    if (grids.empty()) throw validation_error("QOperator: no grids");
    std::size_t n = total();
    std::size_t nm = grids.size();
    if (v.size() != n) throw validation_error("QOperator: V table size mismatch");
    if (!l.empty() && l.size() != nm)
        throw validation_error("QOperator: L table count mismatch");
    for (const auto& lj : l)
        if (!lj.empty() && lj.size() != n)
            throw validation_error("QOperator: L table size mismatch");
    if (k.size() != nm * nm) throw validation_error("QOperator: K matrix size mismatch");
    for (std::size_t a = 0; a < nm; ++a)
        for (std::size_t b = a + 1; b < nm; ++b)
            if (std::abs(k[a * nm + b] - k[b * nm + a]) > 1e-14)
                throw validation_error("QOperator: K must be symmetric");
}

namespace {

std::vector<std::size_t> strides_of(const std::vector<int>& shape) {
    std::vector<std::size_t> s(shape.size());
    std::size_t acc = 1;
    for (int j = static_cast<int>(shape.size()) - 1; j >= 0; --j) {
        s[j] = acc;
        acc *= static_cast<std::size_t>(shape[j]);
    }
    return s;
}

} // namespace

std::vector<cplx> apply_operator(const QOperator& op, const std::vector<cplx>& g) {
    op.validate();
    if (g.size() != op.total()) throw validation_error("apply: state size mismatch");
    int nm = op.n_modes();
    auto shape = op.shape();
    auto stride = strides_of(shape);
    std::size_t n = g.size();

    std::vector<cplx> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = op.v[i] * g[i];

    auto lval = [&op](int j, std::size_t idx) -> double {
        if (op.l.empty() || op.l[j].empty()) return 0.0;
        return op.l[j][idx];
    };

    for (int j = 0; j < nm; ++j) {
        double h = op.grids[j].spacing();
        double kjj = op.k[j * nm + j];
        bool have_l = !op.l.empty() && !op.l[j].empty();
        if (kjj == 0.0 && !have_l) continue;
        std::size_t sj = stride[j];
        int nj = shape[j];
        for (std::size_t idx = 0; idx < n; ++idx) {
            int pos = static_cast<int>((idx / sj) % nj);
            cplx gp = pos + 1 < nj ? g[idx + sj] : cplx{};
            cplx gm = pos > 0 ? g[idx - sj] : cplx{};
            if (kjj != 0.0) out[idx] += kjj * (gp - 2.0 * g[idx] + gm) / (h * h);
            if (have_l) {
                double lc = lval(j, idx);
                double lp = pos + 1 < nj ? lval(j, idx + sj) : 0.0;
                double lm = pos > 0 ? lval(j, idx - sj) : 0.0;
                out[idx] += cplx(0.0, 1.0) * ((lc + lp) * gp - (lm + lc) * gm) / (4.0 * h);
            }
        }
    }

    for (int a = 0; a < nm; ++a) {
        for (int b = a + 1; b < nm; ++b) {
            double kc = op.k[a * nm + b] + op.k[b * nm + a];
            if (kc == 0.0) continue;
            double denom = 4.0 * op.grids[a].spacing() * op.grids[b].spacing();
            std::size_t sa = stride[a], sb = stride[b];
            int na = shape[a], nb = shape[b];
            for (std::size_t idx = 0; idx < n; ++idx) {
                int pa = static_cast<int>((idx / sa) % na);
                int pb = static_cast<int>((idx / sb) % nb);
                cplx gpp = (pa + 1 < na && pb + 1 < nb) ? g[idx + sa + sb] : cplx{};
                cplx gpm = (pa + 1 < na && pb > 0) ? g[idx + sa - sb] : cplx{};
                cplx gmp = (pa > 0 && pb + 1 < nb) ? g[idx - sa + sb] : cplx{};
                cplx gmm = (pa > 0 && pb > 0) ? g[idx - sa - sb] : cplx{};
                out[idx] += kc * (gpp - gpm - gmp + gmm) / denom;
            }
        }
    }
    return out;
}

namespace {

void thomas_cn(const QOperator& op, std::vector<cplx>& g, double dt) {
    int n = op.grids[0].n_points;
    double h = op.grids[0].spacing();
    double k00 = op.k[0];
    bool have_l = !op.l.empty() && !op.l[0].empty();
    auto lv = [&](int i) { return have_l ? op.l[0][i] : 0.0; };

    // H coefficients: diag, super (of g_{i+1}), sub = conj(super shifted)
    std::vector<cplx> hd(n), hu(n - 1), hl(n - 1);
    for (int i = 0; i < n; ++i) hd[i] = op.v[i] - 2.0 * k00 / (h * h);
    for (int i = 0; i + 1 < n; ++i) {
        cplx drift = cplx(0.0, (lv(i) + lv(i + 1)) / (4.0 * h));
        hu[i] = k00 / (h * h) + drift;
        hl[i] = k00 / (h * h) - drift; // coefficient of g_i in row i+1
    }

    cplx z(0.0, 0.5 * dt);
    // rhs = (1 - z H) g
    std::vector<cplx> rhs(n);
    for (int i = 0; i < n; ++i) {
        cplx acc = hd[i] * g[i];
        if (i + 1 < n) acc += hu[i] * g[i + 1];
        if (i > 0) acc += hl[i - 1] * g[i - 1];
        rhs[i] = g[i] - z * acc;
    }
    // solve (1 + z H) x = rhs by Thomas elimination
    std::vector<cplx> b(n), c(n - 1), a(n - 1);
    for (int i = 0; i < n; ++i) b[i] = 1.0 + z * hd[i];
    for (int i = 0; i + 1 < n; ++i) {
        c[i] = z * hu[i];
        a[i] = z * hl[i];
    }
    for (int i = 1; i < n; ++i) {
        cplx w = a[i - 1] / b[i - 1];
        b[i] -= w * c[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    g[n - 1] = rhs[n - 1] / b[n - 1];
    for (int i = n - 2; i >= 0; --i) g[i] = (rhs[i] - c[i] * g[i + 1]) / b[i];
}

void fixed_point_cn(const QOperator& op, std::vector<cplx>& g, double dt) {
    std::size_t n = g.size();
    cplx z(0.0, 0.5 * dt);
    std::vector<cplx> hg = apply_operator(op, g);
    std::vector<cplx> rhs(n);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = g[i] - z * hg[i];

    std::vector<cplx> x = rhs, xn(n);
    double ref = std::sqrt(kern::ops().norm_sq(rhs.data(), n));
    for (int it = 0; it < 200; ++it) {
        std::vector<cplx> hx = apply_operator(op, x);
        double diff = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            xn[i] = rhs[i] - z * hx[i];
            diff += std::norm(xn[i] - x[i]);
        }
        x.swap(xn);
        if (std::sqrt(diff) <= 1e-14 * std::max(ref, 1e-300)) {
            g = std::move(x);
            return;
        }
    }
    throw solver_error("crank_nicolson: fixed-point iteration did not converge "
                       "(operator too large for dt)");
}

} // namespace

void crank_nicolson(const QOperator& op, std::vector<cplx>& g, double dt) {
    op.validate();
    if (g.size() != op.total())
        throw validation_error("crank_nicolson: state size mismatch");
    if (!(dt > 0.0)) throw validation_error("crank_nicolson: dt must be positive");

    // Split the mean of V off as an exact global phase.
    double shift = std::accumulate(op.v.begin(), op.v.end(), 0.0) /
                   static_cast<double>(op.v.size());
    QOperator shifted = op;
    for (double& x : shifted.v) x -= shift;

    if (op.n_modes() == 1)
        thomas_cn(shifted, g, dt);
    else
        fixed_point_cn(shifted, g, dt);
    kern::ops().cscale(g.data(), std::exp(cplx(0.0, -shift * dt)), g.size());
}

} // namespace qlm
