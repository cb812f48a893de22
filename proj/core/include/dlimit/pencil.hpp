#pragma once

#include "dlimit/distribution.hpp"
#include "dlimit/matrix.hpp"
#include "dlimit/quadrature.hpp"
#include "dlimit/signal.hpp"
#include "dlimit/test_function.hpp"

namespace dlimit {

inline constexpr double kDefaultPencilTol = 1e-9;

/// Descriptor system E x' = A x + g.
struct Pencil {
    Matrix E;
    Matrix A;

    int dimension() const noexcept { return static_cast<int>(E.rows()); }
    void validate() const;
};

/// Returns a shift c with cE - A nonsingular.
///
/// Candidates 0, 1, -1, 2, -2, ... (2n + 3 of them) are scanned in that
/// order and the best conditioned one is kept; ties go to the earlier
/// candidate. A regular pencil has det(sE - A) vanishing at no more than n
/// points, so when every candidate is numerically singular the pencil is
/// reported NotRegular.
double check_regular(const Pencil& p, double tol = kDefaultPencilTol);

/// Weierstrass form of a regular pencil.
///
/// With Ehat = (cE - A)^-1 E and T = [V1 | V2] (range and null bases of
/// Ehat^n), T^-1 Ehat T = blkdiag(E1, N0). The state splits as x = T (z1; z2):
///
///   z1' = J z1 + slow_forcing * g,   J = c I - E1^-1
///   M z2' = z2 + fast_forcing * g,   M = (c N0 - I)^-1 N0
struct ReducedSystem {
    double shift = 0.0;
    Matrix T;
    Matrix T_inv;
    int slow_dim = 0;
    int fast_dim = 0;

    Matrix E1;
    Matrix J;
    Matrix slow_forcing;  // slow_dim x n

    Matrix N0;
    Matrix M;
    Matrix fast_forcing;  // fast_dim x n
    NilpotencyCert fast_cert;
    NilpotencyCert n0_cert;

    double condition = 1.0;       // condition number of T
    double block_residual = 0.0;  // off-diagonal blocks of T^-1 Ehat T, relative

    Matrix slow_columns() const { return T.leftCols(slow_dim); }
    Matrix fast_columns() const { return T.rightCols(fast_dim); }
    Matrix slow_rows_of_inverse() const { return T_inv.topRows(slow_dim); }
    Matrix fast_rows_of_inverse() const { return T_inv.bottomRows(fast_dim); }
    /// Index of the fast part; 1 when there is no fast part.
    int index() const noexcept { return fast_cert.index; }
};

ReducedSystem weierstrass_reduce(const Pencil& p, double tol = kDefaultPencilTol);

/// Solution of a descriptor initial value problem assembled from its slow
/// (classical) and fast (distributional) parts.
class DescriptorSolution {
public:
    DescriptorSolution(ReducedSystem reduced, Vector z1_0, PiecewiseSignal slow_input,
                       GeneralizedFunction fast);

    const ReducedSystem& reduced() const noexcept { return reduced_; }
    /// Fast subsystem solution in z2 coordinates.
    const GeneralizedFunction& fast() const noexcept { return fast_; }
    /// Fast solution mapped to x coordinates by the fast columns of T.
    GeneralizedFunction fast_in_state() const;

    /// z1(t) by variation of constants.
    Vector slow_at(double t, const QuadratureSpec& quad) const;
    /// Classical part of x(t) for t > 0: T1 z1(t) + T2 (smooth fast part)(t).
    Vector state_at(double t, const QuadratureSpec& quad) const;
    /// Impulse coefficients of x (orders ascending).
    std::vector<Impulse> impulses() const;

    PairingResult pair(const TestFunction& lambda, const QuadratureSpec& quad) const;

private:
    ReducedSystem reduced_;
    Vector z1_0_;
    PiecewiseSignal slow_input_;  // slow_forcing * g
    GeneralizedFunction fast_;
};

DescriptorSolution solve_descriptor(const Pencil& p, const Vector& x0, const PiecewiseSignal& g,
                                    double tol = kDefaultPencilTol);

}  // namespace dlimit
