#pragma once

#include <Eigen/Dense>

#include <complex>
#include <optional>
#include <vector>

namespace dlimit {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kDefaultNilpotencyTol = 1e-12;

/// Certificate that a matrix is nilpotent.
///
/// `index` is the smallest q >= 1 with ||M^q||_F <= tol * (1 + ||M||_F^q);
/// `residual` is the Frobenius norm of M^q that passed that test.
struct NilpotencyCert {
    int index = 1;
    double residual = 0.0;
    double tol = kDefaultNilpotencyTol;
};

/// Throws DimensionMismatch unless `m` is square with finite entries.
void require_square_finite(const Matrix& m, const char* what);

/// Frobenius norm. This is the only matrix norm used by the library.
double operator_norm(const Matrix& m);

NilpotencyCert nilpotency_index(const Matrix& m, double tol = kDefaultNilpotencyTol);

/// Inverse by Gaussian elimination with partial pivoting.
/// Throws Singular when a pivot magnitude is <= tol * ||M||_F.
Matrix mat_inverse(const Matrix& m, double tol = kDefaultNilpotencyTol);

/// Matrix exponential.
///
/// Inputs of the form mu*I + R with R numerically nilpotent are evaluated
/// with the terminating series e^mu * sum_{k<q} R^k/k!. Everything else goes
/// through scaling and squaring around a degree-13 Pade approximant.
/// Throws Overflow when the result is not representable.
Matrix mat_exp(const Matrix& m);

/// Pade-13 scaling and squaring with no structural shortcut.
Matrix mat_exp_pade(const Matrix& m);

struct RankSplit {
    int rank = 0;
    Matrix range_basis;  // n x rank, orthonormal columns
    Matrix null_basis;   // n x (n - rank), orthonormal columns
};

/// Rank-revealing split by column-pivoted Householder QR. A diagonal entry of
/// R counts toward the rank when it exceeds tol times max(scale, largest
/// column norm). Pass the magnitude m would have without cancellation as
/// `scale` when m may be rounding noise, e.g. a power of a nilpotent matrix.
RankSplit rank_split(const Matrix& m, double tol, double scale = 0.0);

std::vector<std::complex<double>> eigenvalues(const Matrix& m);

/// Ratio of extreme singular values; +inf for a singular matrix.
double condition_number(const Matrix& m);

/// Scalar-shift decomposition M = mu*I + R with R nilpotent, if one exists at
/// the given nilpotency tolerance.
struct ShiftNilpotent {
    double shift = 0.0;
    Matrix nilpotent;
    int index = 1;
};
std::optional<ShiftNilpotent> shift_nilpotent_split(const Matrix& m,
                                                   double tol = kDefaultNilpotencyTol);

}  // namespace dlimit
