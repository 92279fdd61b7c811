#pragma once

#include <complex>
#include <vector>

// Thin FFTW3 wrapper, internal to the library. Plan creation is serialized
// behind a mutex (FFTW planning is not thread-safe); execution is.

namespace cardiosync::detail {

/// Complex DFT of arbitrary length. The inverse transform is scaled by 1/N.
std::vector<std::complex<double>> fft(std::vector<std::complex<double>> in,
                                      bool inverse);

/// Discrete analytic signal x + i*H[x] of a real record (no padding: FFTW
/// handles arbitrary lengths directly).
std::vector<std::complex<double>> analytic_signal(
    const std::vector<double>& x);

}  // namespace cardiosync::detail
