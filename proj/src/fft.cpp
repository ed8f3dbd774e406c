#include "parmimo/fft.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <vector>

#include <fftw3.h>

#include "parmimo/errors.hpp"

namespace parmimo {

namespace {

// FFTW's planner is not thread-safe; executing an existing plan is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace

struct UnitaryDft::Plans {
    fftw_plan backward = nullptr;
    fftw_plan forward = nullptr;

    explicit Plans(int n) {
        std::vector<cplx> buffer(static_cast<std::size_t>(n));
        auto* p = reinterpret_cast<fftw_complex*>(buffer.data());
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        std::lock_guard lock(planner_mutex());
        backward = fftw_plan_dft_1d(n, p, p, FFTW_BACKWARD, flags);
        forward = fftw_plan_dft_1d(n, p, p, FFTW_FORWARD, flags);
        if (backward == nullptr || forward == nullptr) throw Error("FFTW planning failed");
    }
    Plans(const Plans&) = delete;
    Plans& operator=(const Plans&) = delete;
    ~Plans() {
        std::lock_guard lock(planner_mutex());
        if (backward != nullptr) fftw_destroy_plan(backward);
        if (forward != nullptr) fftw_destroy_plan(forward);
    }
};

namespace {

std::shared_ptr<const UnitaryDft::Plans> shared_plans(int n);

}  // namespace

UnitaryDft::UnitaryDft(int length) : length_(length) {
    if (length < 1) throw LengthError("DFT length must be positive");
    plans_ = shared_plans(length);
}

void UnitaryDft::inverse(cplx* data, int count) const {
    const double scale = 1.0 / std::sqrt(static_cast<double>(length_));
    for (int b = 0; b < count; ++b) {
        auto* p = reinterpret_cast<fftw_complex*>(data + static_cast<std::ptrdiff_t>(b) * length_);
        fftw_execute_dft(plans_->backward, p, p);
    }
    for (std::ptrdiff_t i = 0, n = static_cast<std::ptrdiff_t>(count) * length_; i < n; ++i) data[i] *= scale;
}

void UnitaryDft::forward(cplx* data, int count) const {
    const double scale = 1.0 / std::sqrt(static_cast<double>(length_));
    for (int b = 0; b < count; ++b) {
        auto* p = reinterpret_cast<fftw_complex*>(data + static_cast<std::ptrdiff_t>(b) * length_);
        fftw_execute_dft(plans_->forward, p, p);
    }
    for (std::ptrdiff_t i = 0, n = static_cast<std::ptrdiff_t>(count) * length_; i < n; ++i) data[i] *= scale;
}

namespace {

std::shared_ptr<const UnitaryDft::Plans> shared_plans(int n) {
    static std::mutex cache_mutex;
    static std::map<int, std::shared_ptr<const UnitaryDft::Plans>> cache;
    std::lock_guard lock(cache_mutex);
    auto& slot = cache[n];
    if (!slot) slot = std::make_shared<const UnitaryDft::Plans>(n);
    return slot;
}

}  // namespace

}  // namespace parmimo
