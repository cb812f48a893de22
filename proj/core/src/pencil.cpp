#include "dlimit/pencil.hpp"

#include "dlimit/errors.hpp"
#include "dlimit/perturbed.hpp"
#include "dlimit/singular_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace dlimit {

void Pencil::validate() const {
    require_square_finite(E, "pencil E");
    require_square_finite(A, "pencil A");
    if (E.rows() != A.rows()) {
        throw DimensionMismatch("pencil E is " + std::to_string(E.rows()) + "x" + std::to_string(E.cols()) +
                                ", A is " + std::to_string(A.rows()) + "x" + std::to_string(A.cols()));
    }
    if (E.rows() == 0) throw DimensionMismatch("pencil has dimension 0");
}

double check_regular(const Pencil& p, double tol) {
    p.validate();
    const int n = p.dimension();
    const int candidates = 2 * n + 3;
    double best_c = 0.0;
    double best_cond = std::numeric_limits<double>::infinity();
    for (int j = 0; j < candidates; ++j) {
        const double c = j == 0 ? 0.0 : (j % 2 == 1 ? 1.0 : -1.0) * ((j + 1) / 2);
        const double cond = condition_number(c * p.E - p.A);
        if (cond < best_cond) {
            best_cond = cond;
            best_c = c;
        }
    }
    if (!(best_cond * tol < 1.0)) {
        throw NotRegular("det(sE - A) vanishes numerically at all " + std::to_string(candidates) +
                         " sample points; the pencil is not regular");
    }
    return best_c;
}

ReducedSystem weierstrass_reduce(const Pencil& p, double tol) {
    ReducedSystem r;
    r.shift = check_regular(p, tol);
    const int n = p.dimension();
    const Matrix pivot_inv = mat_inverse(r.shift * p.E - p.A);
    const Matrix ehat = pivot_inv * p.E;

    Matrix power = Matrix::Identity(n, n);
    for (int k = 0; k < n; ++k) power = power * ehat;
    const RankSplit split = rank_split(power, tol, std::pow(operator_norm(ehat), n));
    r.slow_dim = split.rank;
    r.fast_dim = n - split.rank;

    r.T.resize(n, n);
    r.T << split.range_basis, split.null_basis;
    r.condition = condition_number(r.T);
    if (!(r.condition * tol <= 1.0)) {
        throw IllConditioned("Weierstrass transformation has condition number " + std::to_string(r.condition) +
                             " above 1/tol");
    }
    r.T_inv = mat_inverse(r.T);

    const Matrix blocks = r.T_inv * ehat * r.T;
    const int n1 = r.slow_dim;
    const int n2 = r.fast_dim;
    const double off = std::hypot(operator_norm(blocks.topRightCorner(n1, n2)),
                                  operator_norm(blocks.bottomLeftCorner(n2, n1)));
    r.block_residual = off / std::max(1.0, operator_norm(ehat));

    const Matrix ghat_slow = r.T_inv.topRows(n1) * pivot_inv;
    const Matrix ghat_fast = r.T_inv.bottomRows(n2) * pivot_inv;

    r.E1 = blocks.topLeftCorner(n1, n1);
    if (n1 > 0) {
        const Matrix e1_inv = mat_inverse(r.E1);
        r.J = r.shift * Matrix::Identity(n1, n1) - e1_inv;
        r.slow_forcing = e1_inv * ghat_slow;
    } else {
        r.J = Matrix::Zero(0, 0);
        r.slow_forcing = Matrix::Zero(0, n);
    }

    r.N0 = blocks.bottomRightCorner(n2, n2);
    if (n2 > 0) {
        const Matrix scale_inv = mat_inverse(r.shift * r.N0 - Matrix::Identity(n2, n2));
        r.M = scale_inv * r.N0;
        r.fast_forcing = scale_inv * ghat_fast;
        r.n0_cert = nilpotency_index(r.N0, tol);
        r.fast_cert = nilpotency_index(r.M, tol);
    } else {
        r.M = Matrix::Zero(0, 0);
        r.fast_forcing = Matrix::Zero(0, n);
    }
    return r;
}

// ---------------------------------------------------------------------------

DescriptorSolution::DescriptorSolution(ReducedSystem reduced, Vector z1_0, PiecewiseSignal slow_input,
                                       GeneralizedFunction fast)
    : reduced_(std::move(reduced)), z1_0_(std::move(z1_0)), slow_input_(std::move(slow_input)),
      fast_(std::move(fast)) {}

GeneralizedFunction DescriptorSolution::fast_in_state() const {
    if (reduced_.fast_dim == 0) return GeneralizedFunction::zero(static_cast<int>(reduced_.T.rows()));
    return apply(reduced_.fast_columns(), fast_);
}

Vector DescriptorSolution::slow_at(double t, const QuadratureSpec& quad) const {
    const int n1 = reduced_.slow_dim;
    if (n1 == 0) return Vector::Zero(0);
    if (!(t >= 0)) throw PreconditionViolation("slow trajectory is defined for t >= 0");
    const ExpKernel kernel(reduced_.J);
    Vector z = kernel.apply(t, z1_0_);
    if (t == 0.0 || slow_input_.is_zero()) return z;
    Vector gv(n1);
    auto integrand = [&](double tau, double* dst) {
        slow_input_.eval_into(tau, gv.data());
        const Vector v = kernel.apply(t - tau, gv);
        std::copy(v.data(), v.data() + n1, dst);
    };
    z += integrate_vector(integrand, n1, 0.0, t, slow_input_.breakpoints(), quad).value;
    return z;
}

Vector DescriptorSolution::state_at(double t, const QuadratureSpec& quad) const {
    const auto n = static_cast<int>(reduced_.T.rows());
    Vector x = Vector::Zero(n);
    if (reduced_.slow_dim > 0) x += reduced_.slow_columns() * slow_at(t, quad);
    if (reduced_.fast_dim > 0) x += reduced_.fast_columns() * fast_.smooth().eval(t);
    return x;
}

std::vector<Impulse> DescriptorSolution::impulses() const { return fast_in_state().impulses(); }

PairingResult DescriptorSolution::pair(const TestFunction& lambda, const QuadratureSpec& quad) const {
    if (lambda.dimension() != reduced_.T.rows()) throw DimensionMismatch("pairing dimension mismatch");
    PairingResult out = dlimit::pair(fast_in_state(), lambda, quad);
    if (reduced_.slow_dim == 0) return out;

    const double lo = std::max(0.0, lambda.support_begin());
    const double hi = lambda.support_end();
    if (hi > lo) {
        const Matrix t1 = reduced_.slow_columns();
        const QuadratureSpec inner = quad.tightened(1e-3);
        auto integrand = [&](double t) {
            const double w = lambda.profile(t);
            if (w == 0.0) return 0.0;
            return w * (t1 * slow_at(t, inner)).dot(lambda.direction());
        };
        const auto r = integrate(integrand, lo, hi, slow_input_.breakpoints(), quad);
        out.integral_part += r.value;
        out.quadrature_error_estimate += r.error;
        out.value += r.value;
    }
    return out;
}

DescriptorSolution solve_descriptor(const Pencil& p, const Vector& x0, const PiecewiseSignal& g, double tol) {
    p.validate();
    const int n = p.dimension();
    if (x0.size() != n) throw DimensionMismatch("x0 dimension differs from the pencil");
    if (g.dimension() != n) throw DimensionMismatch("forcing dimension differs from the pencil");
    ReducedSystem r = weierstrass_reduce(p, tol);

    const Vector z0 = r.T_inv * x0;
    Vector z1_0 = z0.head(r.slow_dim);
    PiecewiseSignal slow_input = r.slow_dim > 0 ? g.apply(r.slow_forcing) : PiecewiseSignal::zero(0);

    GeneralizedFunction fast;
    if (r.fast_dim > 0) {
        SolveRequest req{r.M, z0.tail(r.fast_dim), g.apply(r.fast_forcing), tol};
        fast = solve_singular(req);
    }
    return DescriptorSolution(std::move(r), std::move(z1_0), std::move(slow_input), std::move(fast));
}

}  // namespace dlimit
