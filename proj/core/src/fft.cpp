#include "chomp/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>

namespace chomp {

namespace {
// FFTW planning is not thread-safe; execution of independent plans is.
// Plans are cached for the process lifetime: the transform sizes repeat
// thousands of times per corpus and plan creation dominates otherwise.
// FFTW_UNALIGNED lets one plan serve any caller buffer.
std::mutex g_plan_mutex;
std::map<std::pair<std::size_t, bool>, fftw_plan> g_plans;

fftw_plan plan_for(std::size_t n, bool inverse) {
    std::lock_guard lock(g_plan_mutex);
    auto& cached = g_plans[{n, inverse}];
    if (!cached) {
        std::vector<std::complex<double>> scratch(n);
        auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
        cached = fftw_plan_dft_1d(static_cast<int>(n), buf, buf,
                                  inverse ? FFTW_BACKWARD : FFTW_FORWARD,
                                  FFTW_ESTIMATE | FFTW_UNALIGNED);
    }
    return cached;
}
}  // namespace

void fft(std::vector<std::complex<double>>& x, bool inverse) {
    const auto n = x.size();
    if (n == 0) return;
    auto* buf = reinterpret_cast<fftw_complex*>(x.data());
    fftw_execute_dft(plan_for(n, inverse), buf, buf);
    if (inverse) {
        const double inv = 1.0 / static_cast<double>(n);
        for (auto& v : x) v *= inv;
    }
}

std::vector<std::complex<double>> rfft(const std::vector<double>& x, std::size_t n) {
    std::vector<std::complex<double>> buf(n);
    for (std::size_t i = 0; i < x.size() && i < n; ++i) buf[i] = x[i];
    fft(buf, false);
    return buf;
}

std::size_t good_fft_size(std::size_t n) {
    for (std::size_t m = n;; ++m) {
        std::size_t k = m;
        while (k % 2 == 0) k /= 2;
        while (k % 3 == 0) k /= 3;
        while (k % 5 == 0) k /= 5;
        if (k == 1) return m;
    }
}

}  // namespace chomp
