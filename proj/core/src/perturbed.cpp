#include "dlimit/perturbed.hpp"

#include "dlimit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace dlimit {

PerturbationFamily::PerturbationFamily(FamilyKind kind, Matrix base, double scale, std::map<int, Matrix> members)
    : kind_(kind), base_(std::move(base)), scale_(scale), members_(std::move(members)) {
    require_square_finite(base_, "perturbation family base");
    for (const auto& [i, m] : members_) {
        if (i < 1) throw InputError("custom family indices must be positive");
        require_square_finite(m, "custom family member");
        if (m.rows() != base_.rows()) throw DimensionMismatch("custom family member dimension differs from base");
    }
}

PerturbationFamily PerturbationFamily::shift(Matrix base) {
    return PerturbationFamily(FamilyKind::Shift, std::move(base), 1.0, {});
}

PerturbationFamily PerturbationFamily::scaled_shift(Matrix base, double c) {
    if (!(c > 0) || !std::isfinite(c)) throw InputError("scaled_shift family needs c > 0");
    return PerturbationFamily(FamilyKind::ScaledShift, std::move(base), c, {});
}

PerturbationFamily PerturbationFamily::custom(Matrix base, std::map<int, Matrix> members) {
    return PerturbationFamily(FamilyKind::Custom, std::move(base), 1.0, std::move(members));
}

std::string PerturbationFamily::describe() const {
    std::ostringstream os;
    switch (kind_) {
        case FamilyKind::Shift: os << "shift: N - (1/i) I"; break;
        case FamilyKind::ScaledShift: os << "scaled_shift: N - (" << scale_ << "/i) I"; break;
        case FamilyKind::Custom: os << "custom: " << members_.size() << " explicit members"; break;
    }
    return os.str();
}

Matrix PerturbationFamily::realize(int i) const {
    if (i < 1) throw PreconditionViolation("family index must be at least 1");
    Matrix n_i;
    if (kind_ == FamilyKind::Custom) {
        const auto it = members_.find(i);
        if (it == members_.end()) throw MissingIndex("custom family has no member for index " + std::to_string(i));
        n_i = it->second;
    } else {
        const Eigen::Index n = base_.rows();
        n_i = base_ - (scale_ / static_cast<double>(i)) * Matrix::Identity(n, n);
    }
    try {
        (void)mat_inverse(n_i);
    } catch (const Singular& e) {
        throw SingularMember("family member " + std::to_string(i) + " is singular: " + e.what());
    }
    return n_i;
}

// ---------------------------------------------------------------------------

ExpKernel::ExpKernel(const Matrix& a) : a_(a), series_(shift_nilpotent_split(a)) {}

Matrix ExpKernel::matrix(double s) const {
    if (!series_) return mat_exp_pade(a_ * s);
    const Eigen::Index n = a_.rows();
    Matrix sum = Matrix::Identity(n, n);
    Matrix term = Matrix::Identity(n, n);
    for (int k = 1; k < series_->index; ++k) {
        term = term * series_->nilpotent * (s / static_cast<double>(k));
        sum += term;
    }
    const double scale = std::exp(series_->shift * s);
    if (!std::isfinite(scale)) throw Overflow("exp(N_i^-1 t) exceeds the representable range");
    return scale * sum;
}

Vector ExpKernel::apply(double s, const Vector& v) const {
    if (!series_) return mat_exp_pade(a_ * s) * v;
    // Horner form of sum_{k<q} (R s)^k / k! applied to v.
    Vector acc = v;
    for (int k = series_->index - 1; k >= 1; --k) {
        acc = v + (s / static_cast<double>(k)) * (series_->nilpotent * acc);
    }
    const double scale = std::exp(series_->shift * s);
    if (!std::isfinite(scale)) throw Overflow("exp(N_i^-1 t) exceeds the representable range");
    Vector out = scale * acc;
    if (!out.allFinite()) throw Overflow("exp(N_i^-1 t) x exceeds the representable range");
    return out;
}

// ---------------------------------------------------------------------------

PerturbedSystem::PerturbedSystem(Matrix n_i) : n_i_(std::move(n_i)), a_(mat_inverse(n_i_)), kernel_(a_) {
    // Spectrum of N_i^-1 from that of N_i: better conditioned when N_i is
    // close to a defective nilpotent matrix.
    abscissa_ = -std::numeric_limits<double>::infinity();
    radius_ = 0.0;
    for (const auto& mu : eigenvalues(n_i_)) {
        const std::complex<double> lam = 1.0 / mu;
        abscissa_ = std::max(abscissa_, lam.real());
        radius_ = std::max(radius_, std::abs(lam));
    }
    if (!(radius_ > 0) || !std::isfinite(radius_)) throw Singular("N_i^-1 has no finite spectral radius");
}

PerturbedValue PerturbedSystem::solve(const Vector& x0, const PiecewiseSignal& f, double t,
                                      const QuadratureSpec& quad) const {
    const int n = dimension();
    if (x0.size() != n || f.dimension() != n) throw DimensionMismatch("perturbed solve: dimension mismatch");
    if (!(t >= 0) || !std::isfinite(t)) throw PreconditionViolation("perturbed solve needs finite t >= 0");
    PerturbedValue out;
    if (t == 0.0) {
        out.value = x0;
        return out;
    }
    out.value = kernel_.apply(t, x0);
    if (f.is_zero()) return out;

    std::vector<double> splits = layer_splits_from_right(0.0, t, layer_width());
    for (double b : f.breakpoints()) splits.push_back(b);

    Vector fv(n);
    auto integrand = [&](double tau, double* dst) {
        f.eval_into(tau, fv.data());
        const Vector v = kernel_.apply(t - tau, a_ * fv);
        std::copy(v.data(), v.data() + n, dst);
    };
    const auto conv = integrate_vector(integrand, n, 0.0, t, splits, quad);
    out.value += conv.value;
    out.error = conv.error;
    return out;
}

PairingEstimate PerturbedSystem::pair(const Vector& x0, const PiecewiseSignal& f, const TestFunction& lambda,
                                      const QuadratureSpec& quad) const {
    if (lambda.dimension() != dimension()) throw DimensionMismatch("pairing dimension mismatch");
    PairingEstimate out;
    const double lo = std::max(0.0, lambda.support_begin());
    const double hi = lambda.support_end();
    if (!(hi > lo)) return out;

    const QuadratureSpec inner = quad.tightened(1e-3);
    std::vector<double> splits = layer_splits_from_left(0.0, hi, layer_width());
    for (double b : f.breakpoints()) splits.push_back(b);
    double worst_inner = 0.0;
    auto integrand = [&](double t) {
        const double weight = lambda.profile(t);
        if (weight == 0.0) return 0.0;
        const auto x = solve(x0, f, t, inner);
        worst_inner = std::max(worst_inner, x.error * std::abs(weight));
        return weight * x.value.dot(lambda.direction());
    };
    const auto r = integrate(integrand, lo, hi, splits, quad);
    out.value = r.value;
    out.error = r.error + worst_inner * (hi - lo);
    return out;
}

Vector solve_perturbed(const Matrix& n_i, const Vector& x0, const PiecewiseSignal& f, double t,
                       const QuadratureSpec& quad) {
    return PerturbedSystem(n_i).solve(x0, f, t, quad).value;
}

// ---------------------------------------------------------------------------

namespace {

double fd_step(int m, double t) {
    return std::pow(std::numeric_limits<double>::epsilon(), 1.0 / (m + 2)) * (1.0 + std::abs(t));
}

void check_identity_preconditions(const PerturbedSystem& sys, int m, double t) {
    if (m < 1) throw PreconditionViolation("derivative identity needs m >= 1");
    const double reach = 0.5 * m * fd_step(m, t);
    if (!(t - reach >= sys.layer_width())) {
        throw PreconditionViolation("derivative identity evaluated within one layer width (" +
                                    std::to_string(sys.layer_width()) + ") of t = 0");
    }
}

}  // namespace

Vector derivative_identity_rhs(const PerturbedSystem& sys, const Vector& x0, const PiecewiseSignal& f, int m,
                               double t, const QuadratureSpec& quad) {
    if (m < 1) throw PreconditionViolation("derivative identity needs m >= 1");
    const Matrix& a = sys.inverse();
    std::vector<Matrix> powers{Matrix::Identity(a.rows(), a.cols())};
    for (int l = 1; l <= m; ++l) powers.push_back(powers.back() * a);
    Vector rhs = powers[static_cast<std::size_t>(m)] * sys.solve(x0, f, t, quad).value;
    for (int l = 1; l <= m; ++l) {
        rhs += powers[static_cast<std::size_t>(l)] * f.differentiate(m - l).eval(t);
    }
    return rhs;
}

Vector derivative_finite_difference(const PerturbedSystem& sys, const Vector& x0, const PiecewiseSignal& f,
                                    int m, double t, const QuadratureSpec& quad) {
    check_identity_preconditions(sys, m, t);
    const double h = fd_step(m, t);
    Vector acc = Vector::Zero(sys.dimension());
    double binom = 1.0;
    for (int j = 0; j <= m; ++j) {
        const double point = t + (0.5 * m - j) * h;
        const double sign = j % 2 == 0 ? 1.0 : -1.0;
        acc += sign * binom * sys.solve(x0, f, point, quad).value;
        binom = binom * (m - j) / (j + 1);
    }
    return acc / std::pow(h, m);
}

double derivative_identity_residual(const Matrix& n_i, const Vector& x0, const PiecewiseSignal& f, int m,
                                    double t, const QuadratureSpec& quad) {
    const PerturbedSystem sys(n_i);
    check_identity_preconditions(sys, m, t);
    const Vector fd = derivative_finite_difference(sys, x0, f, m, t, quad);
    const Vector rhs = derivative_identity_rhs(sys, x0, f, m, t, quad);
    return (fd - rhs).norm();
}

// ---------------------------------------------------------------------------

LayerIntegral layer_integral_estimate(const Matrix& n_i, int k, const QuadratureSpec& quad) {
    if (k < 0) throw PreconditionViolation("layer integral power k must be non-negative");
    const PerturbedSystem sys(n_i);
    LayerIntegral out;
    if (sys.spectral_abscissa() >= 0.0) {
        out.divergent = true;
        return out;
    }
    Matrix power = Matrix::Identity(n_i.rows(), n_i.cols());
    for (int j = 0; j < k; ++j) power = power * n_i;
    const ExpKernel& kernel = sys.kernel();
    auto g = [&](double t) { return operator_norm(power * kernel.matrix(t)); };

    const double threshold = quad.abs_tol * 1e-3;
    double upper = 10.0 * sys.layer_width();
    for (int iter = 0; iter < 400; ++iter) {
        const double here = g(upper);
        if (here < threshold && g(2.0 * upper) <= 0.5 * here) break;
        upper *= 2.0;
    }
    const auto splits = layer_splits_from_left(0.0, upper, sys.layer_width());
    const auto r = integrate(g, 0.0, upper, splits, quad);
    out.value = r.value;
    out.error = r.error + 2.0 * g(upper) / std::abs(sys.spectral_abscissa());
    out.truncation = upper;
    return out;
}

}  // namespace dlimit
