#pragma once

#include <memory>

#include "parmimo/types.hpp"

namespace parmimo {

// Unitary K-point DFT pair. inverse(): x[n] = K^{-1/2} sum_k X[k] e^{+j2pi kn/K};
// forward() is its adjoint. Plans are shared per length and safe to execute
// from several threads at once.
class UnitaryDft {
public:
    explicit UnitaryDft(int length);

    int length() const noexcept { return length_; }

    // In-place transforms of `count` contiguous blocks of `length()` samples.
    void inverse(cplx* data, int count = 1) const;
    void forward(cplx* data, int count = 1) const;

    struct Plans;  // opaque FFTW plan pair

private:
    int length_;
    std::shared_ptr<const Plans> plans_;
};

}  // namespace parmimo
