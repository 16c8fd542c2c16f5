#include "qlm/fft.hpp"

#include "qlm/constants.hpp"
#include "qlm/kernels.hpp"

#include <fftw3.h>

#include <stdexcept>

namespace qlm {

FftAxis::FftAxis(std::vector<int> shape, int axis) {
    if (axis < 0 || axis >= static_cast<int>(shape.size()))
        throw std::invalid_argument("FftAxis: bad axis");
    n_ = shape[axis];
    total_ = 1;
    for (int d : shape) total_ *= static_cast<std::size_t>(d);

    std::size_t inner = 1; // stride of the transformed axis
    for (std::size_t i = axis + 1; i < shape.size(); ++i) inner *= shape[i];
    std::size_t outer = total_ / (inner * n_);

    fftw_iodim64 dim;
    dim.n = n_;
    dim.is = dim.os = static_cast<ptrdiff_t>(inner);
    fftw_iodim64 loops[2];
    loops[0].n = static_cast<ptrdiff_t>(outer);
    loops[0].is = loops[0].os = static_cast<ptrdiff_t>(inner * n_);
    loops[1].n = static_cast<ptrdiff_t>(inner);
    loops[1].is = loops[1].os = 1;

    // Dummy buffer only for planning; execution uses fftw_execute_dft.
    std::vector<std::complex<double>> buf(total_);
    auto* p = reinterpret_cast<fftw_complex*>(buf.data());
    unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    plan_fwd_ = fftw_plan_guru64_dft(1, &dim, 2, loops, p, p, FFTW_FORWARD, flags);
    plan_bwd_ = fftw_plan_guru64_dft(1, &dim, 2, loops, p, p, FFTW_BACKWARD, flags);
    if (!plan_fwd_ || !plan_bwd_) throw std::runtime_error("FftAxis: planning failed");
}

FftAxis::~FftAxis() {
    if (plan_fwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
    if (plan_bwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
}

FftAxis::FftAxis(FftAxis&& other) noexcept { *this = std::move(other); }

FftAxis& FftAxis::operator=(FftAxis&& other) noexcept {
    std::swap(plan_fwd_, other.plan_fwd_);
    std::swap(plan_bwd_, other.plan_bwd_);
    std::swap(n_, other.n_);
    std::swap(total_, other.total_);
    return *this;
}

void FftAxis::forward(std::complex<double>* data) const {
    auto* p = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(static_cast<fftw_plan>(plan_fwd_), p, p);
}

void FftAxis::backward(std::complex<double>* data) const {
    auto* p = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(static_cast<fftw_plan>(plan_bwd_), p, p);
    kern::ops().cscale(data, 1.0 / n_, total_);
}

std::vector<double> fft_wavenumbers(int n, double spacing) {
    std::vector<double> k(n);
    double dk = 2.0 * pi / (n * spacing);
    for (int i = 0; i < n; ++i) {
        int idx = (i < (n + 1) / 2) ? i : i - n;
        k[i] = dk * idx;
    }
    return k;
}

} // namespace qlm
