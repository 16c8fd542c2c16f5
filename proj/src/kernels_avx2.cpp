// AVX2/FMA variants of the complex kernels. Compiled with -mavx2 -mfma;
// callers must check avx2_available() before selecting this table.

#include "qlm/kernels.hpp"

#include <vector>

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>

namespace qlm::kern {

namespace {

// (a+bi)(c+di) for two packed complex doubles per register.
inline __m256d cmul4(__m256d z, __m256d w) {
    __m256d wr = _mm256_movedup_pd(w);        // c  c
    __m256d wi = _mm256_permute_pd(w, 0xF);   // d  d
    __m256d zs = _mm256_permute_pd(z, 0x5);   // b  a
    return _mm256_fmaddsub_pd(z, wr, _mm256_mul_pd(zs, wi));
}

const __m256d conj_mask = _mm256_setr_pd(0.0, -0.0, 0.0, -0.0);

void v_cmul(cplx* z, const cplx* w, std::size_t n) {
    double* zd = reinterpret_cast<double*>(z);
    const double* wd = reinterpret_cast<const double*>(w);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d a = _mm256_loadu_pd(zd + 2 * i);
        __m256d b = _mm256_loadu_pd(wd + 2 * i);
        _mm256_storeu_pd(zd + 2 * i, cmul4(a, b));
    }
    for (; i < n; ++i) z[i] *= w[i];
}

void v_cscale(cplx* z, cplx s, std::size_t n) {
    double* zd = reinterpret_cast<double*>(z);
    __m256d sv = _mm256_setr_pd(s.real(), s.imag(), s.real(), s.imag());
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d a = _mm256_loadu_pd(zd + 2 * i);
        _mm256_storeu_pd(zd + 2 * i, cmul4(a, sv));
    }
    for (; i < n; ++i) z[i] *= s;
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

inline cplx hsum_cplx(__m256d acc) {
    alignas(32) double t[4];
    _mm256_store_pd(t, acc);
    return cplx(t[0] + t[2], t[1] + t[3]);
}

inline double hsum(__m256d acc) {
    alignas(32) double t[4];
    _mm256_store_pd(t, acc);
    return (t[0] + t[2]) + (t[1] + t[3]);
}

cplx v_cdot(const cplx* a, const cplx* b, std::size_t n) {
    const double* ad = reinterpret_cast<const double*>(a);
    const double* bd = reinterpret_cast<const double*>(b);
    return blocked_reduce<cplx>(n, [&](std::size_t i0, std::size_t m) {
        __m256d acc = _mm256_setzero_pd();
        std::size_t i = i0;
        for (; i + 2 <= i0 + m; i += 2) {
            __m256d av = _mm256_xor_pd(_mm256_loadu_pd(ad + 2 * i), conj_mask);
            __m256d bv = _mm256_loadu_pd(bd + 2 * i);
            acc = _mm256_add_pd(acc, cmul4(av, bv));
        }
        cplx s = hsum_cplx(acc);
        for (; i < i0 + m; ++i) s += std::conj(a[i]) * b[i];
        return s;
    });
}

double v_norm_sq(const cplx* z, std::size_t n) {
    const double* zd = reinterpret_cast<const double*>(z);
    return blocked_reduce<double>(n, [&](std::size_t i0, std::size_t m) {
        __m256d acc = _mm256_setzero_pd();
        std::size_t i = i0;
        for (; i + 2 <= i0 + m; i += 2) {
            __m256d v = _mm256_loadu_pd(zd + 2 * i);
            acc = _mm256_fmadd_pd(v, v, acc);
        }
        double s = hsum(acc);
        for (; i < i0 + m; ++i) s += std::norm(z[i]);
        return s;
    });
}

double v_weighted_abs2(const cplx* z, const double* w, std::size_t n) {
    const double* zd = reinterpret_cast<const double*>(z);
    return blocked_reduce<double>(n, [&](std::size_t i0, std::size_t m) {
        __m256d acc = _mm256_setzero_pd();
        std::size_t i = i0;
        for (; i + 2 <= i0 + m; i += 2) {
            __m256d v = _mm256_loadu_pd(zd + 2 * i);
            __m256d wv = _mm256_setr_pd(w[i], w[i], w[i + 1], w[i + 1]);
            acc = _mm256_fmadd_pd(_mm256_mul_pd(v, v), wv, acc);
        }
        double s = hsum(acc);
        for (; i < i0 + m; ++i) s += w[i] * std::norm(z[i]);
        return s;
    });
}

cplx v_weighted_cdot(const cplx* a, const cplx* b, const double* w, std::size_t n) {
    const double* ad = reinterpret_cast<const double*>(a);
    const double* bd = reinterpret_cast<const double*>(b);
    return blocked_reduce<cplx>(n, [&](std::size_t i0, std::size_t m) {
        __m256d acc = _mm256_setzero_pd();
        std::size_t i = i0;
        for (; i + 2 <= i0 + m; i += 2) {
            __m256d av = _mm256_xor_pd(_mm256_loadu_pd(ad + 2 * i), conj_mask);
            __m256d bv = _mm256_loadu_pd(bd + 2 * i);
            __m256d wv = _mm256_setr_pd(w[i], w[i], w[i + 1], w[i + 1]);
            acc = _mm256_fmadd_pd(cmul4(av, bv), wv, acc);
        }
        cplx s = hsum_cplx(acc);
        for (; i < i0 + m; ++i) s += w[i] * std::conj(a[i]) * b[i];
        return s;
    });
}

const Ops avx2_table = {
    "avx2", v_cmul, v_cscale, v_cdot, v_norm_sq, v_weighted_abs2, v_weighted_cdot,
};

} // namespace

const Ops& avx2_ops() { return avx2_table; }

} // namespace qlm::kern

#else

namespace qlm::kern {
const Ops& avx2_ops() { return scalar_ops(); }
} // namespace qlm::kern

#endif
