#pragma once

#include "dlimit/matrix.hpp"

#include <functional>
#include <span>
#include <vector>

namespace dlimit {

/// Tolerances for the adaptive integrator.
///
/// An integral is accepted when the summed error estimate is at most
/// max(abs_tol, rel_tol * |value|). `extra_breakpoints` are added to the
/// mandatory split points of every integral computed with this spec.
struct QuadratureSpec {
    double abs_tol = 1e-10;
    double rel_tol = 1e-8;
    int max_subdivisions = 4000;
    std::vector<double> extra_breakpoints;

    void validate() const;
    /// Same spec with both tolerances multiplied by `factor`.
    QuadratureSpec tightened(double factor) const;
};

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    int intervals = 0;
};

struct VectorQuadResult {
    Vector value;
    double error = 0.0;
    int intervals = 0;
};

/// Writes the integrand value at t into out[0..dim).
using VectorIntegrand = std::function<void(double t, double* out)>;

/// Globally adaptive Gauss-Kronrod (7/15) integration of a vector integrand
/// over [a, b]. Points in `splits` that fall inside (a, b) start as interval
/// boundaries. The error estimate is the Euclidean norm of the Kronrod minus
/// Gauss difference, summed over intervals; intervals whose difference is at
/// rounding level are frozen. Throws QuadratureFailure when the interval cap
/// is reached with the tolerance unmet.
VectorQuadResult integrate_vector(const VectorIntegrand& f, int dim, double a, double b,
                                  std::span<const double> splits, const QuadratureSpec& spec);

QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     std::span<const double> splits, const QuadratureSpec& spec);

/// Split points clustered at the left end of [a, b]: a + j*width for
/// j = 1..10, then a + 10*width*2^m while inside the interval.
std::vector<double> layer_splits_from_left(double a, double b, double width);
/// Mirror image of layer_splits_from_left, clustered at b.
std::vector<double> layer_splits_from_right(double a, double b, double width);

}  // namespace dlimit
