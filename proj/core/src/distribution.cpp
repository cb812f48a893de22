#include "dlimit/distribution.hpp"

#include "dlimit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace dlimit {
namespace {

std::vector<Impulse> canonical(std::vector<Impulse> raw, int dim) {
    std::map<int, Vector> merged;
    for (auto& imp : raw) {
        if (imp.order < 0) throw InputError("impulse order must be non-negative");
        if (imp.coeff.size() != dim) throw DimensionMismatch("impulse coefficient dimension mismatch");
        auto [it, inserted] = merged.try_emplace(imp.order, imp.coeff);
        if (!inserted) it->second += imp.coeff;
    }
    std::vector<Impulse> out;
    for (auto& [order, coeff] : merged) {
        if (coeff.norm() < kImpulsePruneTol) continue;
        out.push_back({order, std::move(coeff)});
    }
    return out;
}

}  // namespace

GeneralizedFunction::GeneralizedFunction(PiecewiseSignal smooth, std::vector<Impulse> impulses)
    : smooth_(std::move(smooth)), impulses_(canonical(std::move(impulses), smooth_.dimension())) {}

GeneralizedFunction GeneralizedFunction::zero(int dim) { return GeneralizedFunction(PiecewiseSignal::zero(dim)); }

GeneralizedFunction GeneralizedFunction::delta(int order, Vector coeff) {
    const auto dim = static_cast<int>(coeff.size());
    return GeneralizedFunction(PiecewiseSignal::zero(dim), {{order, std::move(coeff)}});
}

Vector GeneralizedFunction::impulse_coeff(int order) const {
    for (const auto& imp : impulses_) {
        if (imp.order == order) return imp.coeff;
    }
    return Vector::Zero(dimension());
}

bool GeneralizedFunction::is_zero() const noexcept { return impulses_.empty() && smooth_.is_zero(); }

PairingResult pair(const GeneralizedFunction& w, const TestFunction& lambda, const QuadratureSpec& quad) {
    if (w.dimension() != lambda.dimension()) {
        throw DimensionMismatch("pairing a " + std::to_string(w.dimension()) +
                                "-dimensional distribution with a " + std::to_string(lambda.dimension()) +
                                "-dimensional test function");
    }
    PairingResult out;
    const double lo = std::max(0.0, lambda.support_begin());
    const double hi = lambda.support_end();
    if (hi > lo && !w.smooth().is_zero()) {
        const auto& smooth = w.smooth();
        const Vector& dir = lambda.direction();
        std::vector<double> scratch(static_cast<std::size_t>(w.dimension()));
        auto integrand = [&](double t) {
            smooth.eval_into(t, scratch.data());
            double dot = 0.0;
            for (int k = 0; k < w.dimension(); ++k) dot += scratch[static_cast<std::size_t>(k)] * dir(k);
            return dot == 0.0 ? 0.0 : dot * lambda.profile(t);
        };
        const auto r = integrate(integrand, lo, hi, smooth.breakpoints(), quad);
        out.integral_part = r.value;
        out.quadrature_error_estimate = r.error;
    }
    for (const auto& imp : w.impulses()) {
        const double sign = imp.order % 2 == 0 ? 1.0 : -1.0;
        out.impulse_part += sign * imp.coeff.dot(lambda.eval(0.0, imp.order));
    }
    out.value = out.integral_part + out.impulse_part;
    return out;
}

GeneralizedFunction distributional_derivative(const GeneralizedFunction& w) {
    const auto& smooth = w.smooth();
    if (smooth.has_breakpoints() && smooth.smoothness() < 0) {
        throw PreconditionViolation(
            "distributional_derivative: smooth part is not continuous across its breakpoints");
    }
    std::vector<Impulse> impulses;
    impulses.reserve(w.impulses().size() + 1);
    impulses.push_back({0, smooth.right_value_at_zero()});
    for (const auto& imp : w.impulses()) impulses.push_back({imp.order + 1, imp.coeff});
    return GeneralizedFunction(smooth.differentiate(1), std::move(impulses));
}

GeneralizedFunction combine(double a, const GeneralizedFunction& w1, double b, const GeneralizedFunction& w2) {
    if (w1.dimension() != w2.dimension()) throw DimensionMismatch("combine: dimensions differ");
    std::vector<Impulse> impulses;
    for (const auto& imp : w1.impulses()) impulses.push_back({imp.order, a * imp.coeff});
    for (const auto& imp : w2.impulses()) impulses.push_back({imp.order, b * imp.coeff});
    return GeneralizedFunction(PiecewiseSignal::linear_combination(a, w1.smooth(), b, w2.smooth()),
                               std::move(impulses));
}

GeneralizedFunction apply(const Matrix& m, const GeneralizedFunction& w) {
    if (m.cols() != w.dimension()) throw DimensionMismatch("apply: matrix columns differ from dimension");
    std::vector<Impulse> impulses;
    for (const auto& imp : w.impulses()) impulses.push_back({imp.order, m * imp.coeff});
    return GeneralizedFunction(w.smooth().apply(m), std::move(impulses));
}

}  // namespace dlimit
