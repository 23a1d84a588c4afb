#pragma once

#include "rectfree/measures.hpp"
#include "rectfree/transforms.hpp"

namespace rectfree {

// μ ⊞_λ ν, recovered from C_μ + C_ν.
SymmetricMeasure rect_convolve(const SymmetricMeasure& mu, const SymmetricMeasure& nu, double lambda,
                               const ContourConfig& cfg = {});
// μ^{⊞_λ k}, recovered from k C_μ.
SymmetricMeasure rect_convolve_power(const SymmetricMeasure& mu, double lambda, int k,
                                     const ContourConfig& cfg = {});

}  // namespace rectfree
