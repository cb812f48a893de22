#include "dlimit/matrix.hpp"

#include "dlimit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace dlimit {

void require_square_finite(const Matrix& m, const char* what) {
    if (m.rows() != m.cols()) {
        throw DimensionMismatch(std::string(what) + ": matrix is " + std::to_string(m.rows()) + "x" +
                                std::to_string(m.cols()) + ", expected square");
    }
    if (!m.allFinite()) throw InputError(std::string(what) + ": matrix has non-finite entries");
}

double operator_norm(const Matrix& m) { return m.norm(); }

NilpotencyCert nilpotency_index(const Matrix& m, double tol) {
    require_square_finite(m, "nilpotency_index");
    if (tol < 0) throw PreconditionViolation("nilpotency_index: negative tolerance");
    const auto n = static_cast<int>(m.rows());
    const double norm = operator_norm(m);
    Matrix power = m;
    for (int q = 1; q <= std::max(n, 1); ++q) {
        if (q > 1) power = power * m;
        const double residual = operator_norm(power);
        if (residual <= tol * (1.0 + std::pow(norm, q))) return {q, residual, tol};
    }
    throw NotNilpotent("matrix is not nilpotent: no power up to " + std::to_string(n) +
                       " vanishes at tolerance " + std::to_string(tol));
}

Matrix mat_inverse(const Matrix& m, double tol) {
    require_square_finite(m, "mat_inverse");
    const Eigen::Index n = m.rows();
    const double threshold = tol * operator_norm(m);
    Matrix a = m;
    Matrix inv = Matrix::Identity(n, n);
    for (Eigen::Index col = 0; col < n; ++col) {
        Eigen::Index pivot = col;
        a.col(col).tail(n - col).cwiseAbs().maxCoeff(&pivot);
        pivot += col;
        const double p = a(pivot, col);
        if (std::abs(p) <= threshold) {
            throw Singular("mat_inverse: pivot " + std::to_string(std::abs(p)) + " in column " +
                           std::to_string(col) + " is below tolerance");
        }
        if (pivot != col) {
            a.row(pivot).swap(a.row(col));
            inv.row(pivot).swap(inv.row(col));
        }
        const double scale = 1.0 / a(col, col);
        a.row(col) *= scale;
        inv.row(col) *= scale;
        for (Eigen::Index r = 0; r < n; ++r) {
            if (r == col) continue;
            const double factor = a(r, col);
            if (factor == 0.0) continue;
            a.row(r) -= factor * a.row(col);
            inv.row(r) -= factor * inv.row(col);
        }
    }
    return inv;
}

std::optional<ShiftNilpotent> shift_nilpotent_split(const Matrix& m, double tol) {
    require_square_finite(m, "shift_nilpotent_split");
    const Eigen::Index n = m.rows();
    if (n == 0) return std::nullopt;
    ShiftNilpotent out;
    out.shift = m.trace() / static_cast<double>(n);
    out.nilpotent = m - out.shift * Matrix::Identity(n, n);
    try {
        out.index = nilpotency_index(out.nilpotent, tol).index;
    } catch (const NotNilpotent&) {
        return std::nullopt;
    }
    return out;
}

namespace {

void require_finite_result(const Matrix& r) {
    if (!r.allFinite()) throw Overflow("mat_exp: result exceeds the representable range");
}

}  // namespace

Matrix mat_exp_pade(const Matrix& m) {
    require_square_finite(m, "mat_exp");
    const Eigen::Index n = m.rows();
    if (n == 0) return m;

    // Degree-13 diagonal Pade coefficients and the matching scaling threshold.
    static constexpr double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                                   1187353796428800.0,  129060195264000.0,   10559470521600.0,
                                   670442572800.0,      33522128640.0,       1323241920.0,
                                   40840800.0,          960960.0,            16380.0,
                                   182.0,               1.0};
    constexpr double theta13 = 5.371920351148152;

    const double norm1 = m.cwiseAbs().colwise().sum().maxCoeff();
    int squarings = 0;
    if (norm1 > theta13) squarings = static_cast<int>(std::ceil(std::log2(norm1 / theta13)));
    if (squarings > 1100) throw Overflow("mat_exp: input norm too large");

    const Matrix a = m / std::ldexp(1.0, squarings);
    const Matrix id = Matrix::Identity(n, n);
    const Matrix a2 = a * a;
    const Matrix a4 = a2 * a2;
    const Matrix a6 = a4 * a2;
    const Matrix u_inner = a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 +
                           b[3] * a2 + b[1] * id;
    const Matrix u = a * u_inner;
    const Matrix v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 +
                     b[2] * a2 + b[0] * id;
    Matrix r = (v - u).partialPivLu().solve(v + u);
    for (int k = 0; k < squarings; ++k) {
        r = r * r;
        if (!r.allFinite()) break;
    }
    require_finite_result(r);
    return r;
}

Matrix mat_exp(const Matrix& m) {
    require_square_finite(m, "mat_exp");
    if (m.rows() == 0) return m;
    if (auto split = shift_nilpotent_split(m)) {
        const Eigen::Index n = m.rows();
        Matrix sum = Matrix::Identity(n, n);
        Matrix term = Matrix::Identity(n, n);
        for (int k = 1; k < split->index; ++k) {
            term = term * split->nilpotent / static_cast<double>(k);
            sum += term;
        }
        const double scale = std::exp(split->shift);
        if (!std::isfinite(scale)) throw Overflow("mat_exp: scalar part overflows");
        Matrix r = scale * sum;
        require_finite_result(r);
        return r;
    }
    return mat_exp_pade(m);
}

RankSplit rank_split(const Matrix& m, double tol, double scale) {
    require_square_finite(m, "rank_split");
    if (tol < 0) throw PreconditionViolation("rank_split: negative tolerance");
    const Eigen::Index n = m.rows();
    RankSplit out;
    if (n == 0 || m.isZero(0.0)) {
        out.rank = 0;
        out.range_basis = Matrix(n, 0);
        out.null_basis = Matrix::Identity(n, n);
        return out;
    }

    auto count_rank = [tol, scale](const Eigen::ColPivHouseholderQR<Matrix>& qr) {
        const Matrix& r = qr.matrixQR();
        const double lead = std::max(std::abs(r(0, 0)), scale);
        int rank = 0;
        for (Eigen::Index k = 0; k < r.rows(); ++k) {
            if (std::abs(r(k, k)) > tol * lead) ++rank;
        }
        return rank;
    };

    const Eigen::ColPivHouseholderQR<Matrix> qr(m);
    out.rank = count_rank(qr);
    const Matrix q = qr.householderQ();
    out.range_basis = q.leftCols(out.rank);

    // The kernel of M is the orthogonal complement of the row space.
    const Eigen::ColPivHouseholderQR<Matrix> qr_t(m.transpose());
    const Matrix q_t = qr_t.householderQ();
    out.null_basis = q_t.rightCols(n - out.rank);
    return out;
}

std::vector<std::complex<double>> eigenvalues(const Matrix& m) {
    require_square_finite(m, "eigenvalues");
    if (m.rows() == 0) return {};
    Eigen::EigenSolver<Matrix> solver(m, false);
    if (solver.info() != Eigen::Success) throw NumericError("eigenvalue iteration did not converge");
    const auto& ev = solver.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

double condition_number(const Matrix& m) {
    if (m.size() == 0) return 1.0;
    Eigen::JacobiSVD<Matrix> svd(m);
    const auto& s = svd.singularValues();
    const double smin = s(s.size() - 1);
    if (smin == 0.0) return std::numeric_limits<double>::infinity();
    return s(0) / smin;
}

}  // namespace dlimit
