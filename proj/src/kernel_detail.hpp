#pragma once

#include "isolab/kernels.hpp"

namespace isolab::detail {

/// e^{R/2} f(v^2 - R^2) without the support indicator (closure of the support).
double chi_closed(double R, double v, const KernelConfig& cfg);
/// Interior formula of h, continued to |v| = |R|.
double h_inner(double R, double v, const KernelConfig& cfg);
void require_nonpositive_R(double R, const char* what);

}  // namespace isolab::detail
