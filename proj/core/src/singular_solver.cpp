#include "dlimit/singular_solver.hpp"

#include "dlimit/errors.hpp"

#include <string>

namespace dlimit {
namespace {

void check_shapes(const Matrix& N, const Vector& x0, const PiecewiseSignal& f) {
    require_square_finite(N, "singular system");
    if (x0.size() != N.rows()) {
        throw DimensionMismatch("x0 has " + std::to_string(x0.size()) + " entries, system dimension is " +
                                std::to_string(N.rows()));
    }
    if (f.dimension() != N.rows()) {
        throw DimensionMismatch("forcing has " + std::to_string(f.dimension()) +
                                " components, system dimension is " + std::to_string(N.rows()));
    }
    if (!x0.allFinite()) throw InputError("x0 has non-finite entries");
}

// v = x0 + sum_{i<terms} N^i f^(i)(0+)
Vector impulse_seed(const Matrix& N, const Vector& x0, const PiecewiseSignal& f, int terms) {
    Vector v = x0;
    Matrix power = Matrix::Identity(N.rows(), N.cols());
    for (int i = 0; i < terms; ++i) {
        v += power * f.right_value_at_zero(i);
        power = power * N;
    }
    return v;
}

}  // namespace

NilpotencyCert SolveRequest::certify() const {
    check_shapes(N, x0, f);
    return nilpotency_index(N, tol);
}

GeneralizedFunction solve_singular_with_terms(const SolveRequest& req, int terms) {
    const NilpotencyCert cert = req.certify();
    const int q = cert.index;
    if (terms < q) throw PreconditionViolation("solve_singular_with_terms: terms must be at least q");
    if (req.f.has_breakpoints() && req.f.smoothness() < q - 1) {
        throw PreconditionViolation("forcing has smoothness order " + std::to_string(req.f.smoothness()) +
                                    ", the solution needs at least q-1 = " + std::to_string(q - 1));
    }
    const Matrix& N = req.N;
    const Eigen::Index n = N.rows();

    PiecewiseSignal smooth = PiecewiseSignal::zero(static_cast<int>(n));
    Matrix power = Matrix::Identity(n, n);
    for (int i = 0; i < terms; ++i) {
        smooth = PiecewiseSignal::linear_combination(1.0, smooth, -1.0, req.f.differentiate(i).apply(power));
        power = power * N;
    }

    const Vector v = impulse_seed(N, req.x0, req.f, terms);
    std::vector<Impulse> impulses;
    power = N;
    for (int k = 1; k < terms; ++k) {
        impulses.push_back({k - 1, -(power * v)});
        power = power * N;
    }
    return GeneralizedFunction(std::move(smooth), std::move(impulses));
}

GeneralizedFunction solve_singular(const SolveRequest& req) {
    return solve_singular_with_terms(req, req.certify().index);
}

bool consistent_initial_set_check(const Matrix& N, const PiecewiseSignal& f, const Vector& x0, double tol) {
    check_shapes(N, x0, f);
    const int q = nilpotency_index(N).index;
    const Vector v = impulse_seed(N, x0, f, q);
    return (N * v).norm() <= tol * (1.0 + operator_norm(N) * v.norm());
}

}  // namespace dlimit
