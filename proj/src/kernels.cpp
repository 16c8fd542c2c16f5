#include "qlm/kernels.hpp"

#include <vector>

namespace qlm::kern {

namespace {

void s_cmul(cplx* z, const cplx* w, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) z[i] *= w[i];
}

void s_cscale(cplx* z, cplx s, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) z[i] *= s;
}

template <class T, class BlockFn>
T blocked_reduce(std::size_t n, BlockFn block) {
    std::vector<T> partial;
    partial.reserve(n / reduce_block + 1);
    for (std::size_t i = 0; i < n; i += reduce_block) {
        std::size_t m = (n - i < reduce_block) ? n - i : reduce_block;
        partial.push_back(block(i, m));
    }
    return pairwise_sum(partial.data(), partial.size());
}

cplx s_cdot(const cplx* a, const cplx* b, std::size_t n) {
    return blocked_reduce<cplx>(n, [&](std::size_t i0, std::size_t m) {
        double re = 0.0, im = 0.0;
        for (std::size_t i = i0; i < i0 + m; ++i) {
            re += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
            im += a[i].real() * b[i].imag() - a[i].imag() * b[i].real();
        }
        return cplx(re, im);
    });
}

double s_norm_sq(const cplx* z, std::size_t n) {
    return blocked_reduce<double>(n, [&](std::size_t i0, std::size_t m) {
        double s = 0.0;
        for (std::size_t i = i0; i < i0 + m; ++i)
            s += z[i].real() * z[i].real() + z[i].imag() * z[i].imag();
        return s;
    });
}

double s_weighted_abs2(const cplx* z, const double* w, std::size_t n) {
    return blocked_reduce<double>(n, [&](std::size_t i0, std::size_t m) {
        double s = 0.0;
        for (std::size_t i = i0; i < i0 + m; ++i)
            s += w[i] * (z[i].real() * z[i].real() + z[i].imag() * z[i].imag());
        return s;
    });
}

cplx s_weighted_cdot(const cplx* a, const cplx* b, const double* w, std::size_t n) {
    return blocked_reduce<cplx>(n, [&](std::size_t i0, std::size_t m) {
        double re = 0.0, im = 0.0;
        for (std::size_t i = i0; i < i0 + m; ++i) {
            re += w[i] * (a[i].real() * b[i].real() + a[i].imag() * b[i].imag());
            im += w[i] * (a[i].real() * b[i].imag() - a[i].imag() * b[i].real());
        }
        return cplx(re, im);
    });
}

const Ops scalar_table = {
    "scalar", s_cmul, s_cscale, s_cdot, s_norm_sq, s_weighted_abs2, s_weighted_cdot,
};

} // namespace

const Ops& scalar_ops() { return scalar_table; }

bool avx2_available() {
#if defined(__x86_64__) || defined(__i386__)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const Ops& ops() {
    static const Ops& selected = avx2_available() ? avx2_ops() : scalar_ops();
    return selected;
}

} // namespace qlm::kern
