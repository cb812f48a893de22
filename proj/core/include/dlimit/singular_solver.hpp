#pragma once

#include "dlimit/distribution.hpp"
#include "dlimit/matrix.hpp"
#include "dlimit/signal.hpp"

namespace dlimit {

/// Reduced singular problem N x' = x + f, x(0) = x0, with N nilpotent.
struct SolveRequest {
    Matrix N;
    Vector x0;
    PiecewiseSignal f;
    double tol = kDefaultNilpotencyTol;

    int dimension() const noexcept { return static_cast<int>(N.rows()); }
    /// Validates shapes and certifies N; throws DimensionMismatch or NotNilpotent.
    NilpotencyCert certify() const;
};

/// Exact distributional solution
///
///   x = -sum_{i<q} N^i f^(i)  -  sum_{k=1}^{q-1} delta^(k-1) N^k v,
///   v = x0 + sum_{i<q} N^i f^(i)(0+),
///
/// where q is the nilpotency index of N.
GeneralizedFunction solve_singular(const SolveRequest& req);

/// Same formula with both sums running over i < terms instead of i < q.
/// Any terms >= q gives the same result since N^q = 0.
GeneralizedFunction solve_singular_with_terms(const SolveRequest& req, int terms);

/// True when every impulse coefficient of the solution vanishes, i.e.
/// N v = 0 within tol * (1 + ||N|| ||v||).
bool consistent_initial_set_check(const Matrix& N, const PiecewiseSignal& f, const Vector& x0,
                                  double tol = 1e-10);

}  // namespace dlimit
