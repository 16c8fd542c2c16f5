#pragma once

#include <complex>
#include <vector>

namespace qlm {

// In-place c2c FFT along one axis of a row-major complex tensor.
// Plans are reusable across arrays (created unaligned-tolerant).
class FftAxis {
public:
    FftAxis(std::vector<int> shape, int axis);
    ~FftAxis();
    FftAxis(const FftAxis&) = delete;
    FftAxis& operator=(const FftAxis&) = delete;
    FftAxis(FftAxis&& other) noexcept;
    FftAxis& operator=(FftAxis&& other) noexcept;

    void forward(std::complex<double>* data) const;  // unnormalized
    void backward(std::complex<double>* data) const; // scaled by 1/n

    int transform_size() const { return n_; }

private:
    void* plan_fwd_ = nullptr;
    void* plan_bwd_ = nullptr;
    int n_ = 0;
    std::size_t total_ = 0;
};

// FFTW frequency ordering: k[i] = 2*pi*i/(n*dx) for i < n/2, negative branch after.
std::vector<double> fft_wavenumbers(int n, double spacing);

} // namespace qlm
