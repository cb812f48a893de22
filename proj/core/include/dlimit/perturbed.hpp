#pragma once

#include "dlimit/matrix.hpp"
#include "dlimit/quadrature.hpp"
#include "dlimit/signal.hpp"
#include "dlimit/test_function.hpp"

#include <map>
#include <optional>
#include <string>

namespace dlimit {

enum class FamilyKind { Shift, ScaledShift, Custom };

/// Sequence of nonsingular matrices N_i approaching a nilpotent base N.
///
///   shift:         N_i = N - (1/i) I
///   scaled_shift:  N_i = N - (c/i) I,  c > 0
///   custom:        N_i looked up in an explicit table
class PerturbationFamily {
public:
    static PerturbationFamily shift(Matrix base);
    static PerturbationFamily scaled_shift(Matrix base, double c);
    static PerturbationFamily custom(Matrix base, std::map<int, Matrix> members);

    FamilyKind kind() const noexcept { return kind_; }
    const Matrix& base() const noexcept { return base_; }
    double scale() const noexcept { return scale_; }
    const std::map<int, Matrix>& members() const noexcept { return members_; }
    std::string describe() const;

    /// N_i. Throws MissingIndex for a custom family without index i and
    /// SingularMember when N_i cannot be inverted.
    Matrix realize(int i) const;

private:
    PerturbationFamily(FamilyKind kind, Matrix base, double scale, std::map<int, Matrix> members);

    FamilyKind kind_;
    Matrix base_;
    double scale_ = 1.0;
    std::map<int, Matrix> members_;
};

/// Evaluates exp(A s) and exp(A s) v. Matrices of the form mu I + R with R
/// nilpotent use the terminating series; others use Pade scaling and squaring.
class ExpKernel {
public:
    explicit ExpKernel(const Matrix& a);

    Matrix matrix(double s) const;
    Vector apply(double s, const Vector& v) const;
    bool uses_series() const noexcept { return series_.has_value(); }

private:
    Matrix a_;
    std::optional<ShiftNilpotent> series_;
};

struct PerturbedValue {
    Vector value;
    double error = 0.0;  // quadrature error estimate of the convolution
};

struct PairingEstimate {
    double value = 0.0;
    double error = 0.0;
};

/// N_i x' = x + f with N_i nonsingular, solved by variation of constants:
///
///   x_i(t) = exp(A t) x0 + integral_0^t exp(A (t - tau)) A f(tau) dtau,  A = N_i^-1.
///
/// Each time point is evaluated independently; the convolution is integrated
/// with mandatory splits at t - j / rho (j = 1..10), where rho is the
/// spectral radius of A and 1 / rho the boundary-layer width.
class PerturbedSystem {
public:
    explicit PerturbedSystem(Matrix n_i);

    int dimension() const noexcept { return static_cast<int>(n_i_.rows()); }
    const Matrix& matrix() const noexcept { return n_i_; }
    const Matrix& inverse() const noexcept { return a_; }
    /// Largest real part of the eigenvalues of N_i^-1.
    double spectral_abscissa() const noexcept { return abscissa_; }
    /// Largest eigenvalue magnitude of N_i^-1.
    double spectral_radius() const noexcept { return radius_; }
    double layer_width() const noexcept { return 1.0 / radius_; }
    const ExpKernel& kernel() const noexcept { return kernel_; }

    PerturbedValue solve(const Vector& x0, const PiecewiseSignal& f, double t, const QuadratureSpec& quad) const;

    /// integral of x_i(t)^T lambda(t) over supp(lambda) intersected with [0, inf).
    /// The inner convolutions use tolerances 1e-3 times those of `quad`.
    PairingEstimate pair(const Vector& x0, const PiecewiseSignal& f, const TestFunction& lambda,
                         const QuadratureSpec& quad) const;

private:
    Matrix n_i_;
    Matrix a_;
    ExpKernel kernel_;
    double abscissa_ = 0.0;
    double radius_ = 0.0;
};

Vector solve_perturbed(const Matrix& n_i, const Vector& x0, const PiecewiseSignal& f, double t,
                       const QuadratureSpec& quad);

/// Right-hand side N_i^-m x_i(t) + sum_{l=1}^m N_i^-l f^(m-l)(t) of the
/// derivative identity for x_i.
Vector derivative_identity_rhs(const PerturbedSystem& sys, const Vector& x0, const PiecewiseSignal& f, int m,
                               double t, const QuadratureSpec& quad);

/// m-th order central finite difference of x_i at t, step eps^(1/(m+2)) (1+|t|).
Vector derivative_finite_difference(const PerturbedSystem& sys, const Vector& x0, const PiecewiseSignal& f,
                                    int m, double t, const QuadratureSpec& quad);

/// Euclidean norm of the finite difference minus the identity right-hand
/// side. Throws PreconditionViolation when m < 1 or the stencil reaches into
/// the first layer width after t = 0.
double derivative_identity_residual(const Matrix& n_i, const Vector& x0, const PiecewiseSignal& f, int m,
                                    double t, const QuadratureSpec& quad);

struct LayerIntegral {
    bool divergent = false;
    double value = 0.0;
    double error = 0.0;       // quadrature error plus truncated tail bound
    double truncation = 0.0;  // upper limit actually integrated to
};

/// integral over [0, inf) of ||N_i^k exp(N_i^-1 t)||_F dt. Divergent when the
/// spectral abscissa of N_i^-1 is non-negative. The range is truncated once
/// the integrand drops below abs_tol * 1e-3, and 2 g(T) / |abscissa| is added
/// to the error estimate for the tail.
LayerIntegral layer_integral_estimate(const Matrix& n_i, int k, const QuadratureSpec& quad);

}  // namespace dlimit
