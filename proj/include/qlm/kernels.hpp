#pragma once

#include <complex>
#include <cstddef>

namespace qlm::kern {

using cplx = std::complex<double>;

// Hot inner loops of the propagators and quadrature rules. Two variants:
// a scalar reference and an AVX2 one, selected once at startup. Reductions
// use blocked pairwise summation (block = 256) in both variants so results
// agree to ~1e-13 and long quadrature sums keep ~1e-14 relative accuracy.
struct Ops {
    const char* name;
    void (*cmul)(cplx* z, const cplx* w, std::size_t n);        // z[i] *= w[i]
    void (*cscale)(cplx* z, cplx s, std::size_t n);             // z[i] *= s
    cplx (*cdot)(const cplx* a, const cplx* b, std::size_t n);  // sum conj(a[i])*b[i]
    double (*norm_sq)(const cplx* z, std::size_t n);            // sum |z[i]|^2
    double (*weighted_abs2)(const cplx* z, const double* w, std::size_t n);
    // sum w[i]*conj(a[i])*b[i]
    cplx (*weighted_cdot)(const cplx* a, const cplx* b, const double* w, std::size_t n);
};

inline constexpr std::size_t reduce_block = 256;

const Ops& scalar_ops();
bool avx2_available();
const Ops& avx2_ops(); // call only when avx2_available()
const Ops& ops();      // runtime-selected best variant

// Pairwise reduction helper shared by both variants (sums `m` block partials).
template <class T>
T pairwise_sum(const T* v, std::size_t m) {
    if (m == 0) return T{};
    if (m == 1) return v[0];
    std::size_t half = m / 2;
    return pairwise_sum(v, half) + pairwise_sum(v + half, m - half);
}

} // namespace qlm::kern
