#pragma once

#include "dlimit/matrix.hpp"
#include "dlimit/quadrature.hpp"
#include "dlimit/signal.hpp"
#include "dlimit/test_function.hpp"

#include <vector>

namespace dlimit {

/// Impulse coefficients with Euclidean norm below this are dropped.
inline constexpr double kImpulsePruneTol = 1e-14;

struct Impulse {
    int order = 0;   // j in delta^(j)
    Vector coeff;
};

/// Causal generalized function: a piecewise smooth part that is zero for
/// t < 0, plus a finite series of derivatives of the Dirac delta at t = 0.
///
/// Impulses are kept sorted by order with distinct orders; construction
/// merges duplicates and prunes negligible coefficients.
class GeneralizedFunction {
public:
    GeneralizedFunction() = default;
    GeneralizedFunction(PiecewiseSignal smooth, std::vector<Impulse> impulses = {});

    static GeneralizedFunction zero(int dim);
    static GeneralizedFunction delta(int order, Vector coeff);

    int dimension() const noexcept { return smooth_.dimension(); }
    const PiecewiseSignal& smooth() const noexcept { return smooth_; }
    const std::vector<Impulse>& impulses() const noexcept { return impulses_; }
    /// Coefficient of delta^(order), or a zero vector.
    Vector impulse_coeff(int order) const;

    bool is_zero() const noexcept;

private:
    PiecewiseSignal smooth_;
    std::vector<Impulse> impulses_;
};

struct PairingResult {
    double value = 0.0;
    double integral_part = 0.0;
    double impulse_part = 0.0;
    double quadrature_error_estimate = 0.0;
};

/// <w, lambda> = integral over [0, inf) of smooth(t)^T lambda(t) dt
///             + sum_j (-1)^j c_j^T lambda^(j)(0).
PairingResult pair(const GeneralizedFunction& w, const TestFunction& lambda, const QuadratureSpec& quad);

/// D w for causal w: smooth part differentiated, a delta carrying the
/// right-hand value smooth(0+) added, and every impulse order raised by one.
/// Requires a smooth part that is continuous across its breakpoints.
GeneralizedFunction distributional_derivative(const GeneralizedFunction& w);

GeneralizedFunction combine(double a, const GeneralizedFunction& w1, double b, const GeneralizedFunction& w2);

/// Left multiplication by a (possibly rectangular) matrix.
GeneralizedFunction apply(const Matrix& m, const GeneralizedFunction& w);

}  // namespace dlimit
