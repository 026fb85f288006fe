#pragma once

#include <functional>
#include <span>
#include <vector>

namespace isolab {

using Fn1 = std::function<double(double)>;

/// Adaptive Simpson with Richardson correction on [a, b].
/// `tol` is an absolute tolerance for the whole interval.
/// Throws PrecisionError when the recursion depth is exhausted.
double adaptive_simpson(const Fn1& f, double a, double b, double tol, int max_depth = 48);

/// Composite rule on [a, b] with `panels` equal panels (panels is rounded up to even for Simpson).
enum class QuadRule { trapezoid, simpson };
double composite(const Fn1& f, double a, double b, int panels, QuadRule rule);

/// Pairwise (cascade) summation with a fixed order, independent of thread count.
double pairwise_sum(std::span<const double> v);

/// Trapezoid weights for a non-uniform sorted abscissa.
std::vector<double> trapezoid_weights(std::span<const double> x);

}  // namespace isolab
