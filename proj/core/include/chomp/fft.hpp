#pragma once

#include <complex>
#include <vector>

namespace chomp {

// Thin FFTW (double precision) front end. Forward transforms are unscaled;
// inverse transforms divide by N.
void fft(std::vector<std::complex<double>>& x, bool inverse);
std::vector<std::complex<double>> rfft(const std::vector<double>& x, std::size_t n);

// Smallest 5-smooth length >= n (FFTW-friendly sizes).
std::size_t good_fft_size(std::size_t n);

}  // namespace chomp
