#include "dlimit/signal.hpp"

#include "dlimit/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace dlimit {

struct Expr::Node {
    Kind kind = Kind::Constant;
    double value = 0.0;
    unsigned exponent = 0;
    Expr a;
    Expr b;

    Node(Kind k, double v) : kind(k), value(v), a(nullptr), b(nullptr) {}
    Node(Kind k, Expr x, Expr y, unsigned e = 0)
        : kind(k), exponent(e), a(std::move(x)), b(std::move(y)) {}
};

Expr::Expr() : node_(nullptr) {
    static const auto zero = std::make_shared<const Node>(Kind::Constant, 0.0);
    node_ = zero;
}

Expr::Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

Expr Expr::constant(double value) {
    if (value == 0.0) value = 0.0;  // fold -0
    return Expr(std::make_shared<const Node>(Kind::Constant, value));
}

Expr Expr::variable() {
    static const Expr t(std::make_shared<const Node>(Kind::Variable, 0.0));
    return t;
}

Expr Expr::add(const Expr& lhs, const Expr& rhs) {
    if (lhs.is_zero()) return rhs;
    if (rhs.is_zero()) return lhs;
    if (lhs.is_constant() && rhs.is_constant()) return constant(lhs.value() + rhs.value());
    return Expr(std::make_shared<const Node>(Kind::Add, lhs, rhs));
}

Expr Expr::mul(const Expr& lhs, const Expr& rhs) {
    if (lhs.is_zero() || rhs.is_zero()) return Expr();
    if (lhs.is_constant() && rhs.is_constant()) return constant(lhs.value() * rhs.value());
    if (lhs.is_constant() && lhs.value() == 1.0) return rhs;
    if (rhs.is_constant() && rhs.value() == 1.0) return lhs;
    if (lhs.is_constant() && lhs.value() == -1.0) return neg(rhs);
    if (rhs.is_constant() && rhs.value() == -1.0) return neg(lhs);
    // c1 * (c2 * x) -> (c1 c2) * x keeps repeated derivatives compact.
    if (lhs.is_constant() && rhs.kind() == Kind::Mul && rhs.lhs().is_constant()) {
        return mul(constant(lhs.value() * rhs.lhs().value()), rhs.rhs());
    }
    return Expr(std::make_shared<const Node>(Kind::Mul, lhs, rhs));
}

Expr Expr::neg(const Expr& arg) {
    if (arg.is_constant()) return constant(-arg.value());
    if (arg.kind() == Kind::Neg) return arg.arg();
    return Expr(std::make_shared<const Node>(Kind::Neg, arg, Expr()));
}

Expr Expr::pow(const Expr& base, unsigned exponent) {
    if (exponent == 0) return constant(1.0);
    if (exponent == 1) return base;
    if (base.is_constant()) return constant(std::pow(base.value(), static_cast<double>(exponent)));
    return Expr(std::make_shared<const Node>(Kind::Pow, base, Expr(), exponent));
}

Expr Expr::sin(const Expr& arg) {
    if (arg.is_constant()) return constant(std::sin(arg.value()));
    return Expr(std::make_shared<const Node>(Kind::Sin, arg, Expr()));
}

Expr Expr::cos(const Expr& arg) {
    if (arg.is_constant()) return constant(std::cos(arg.value()));
    return Expr(std::make_shared<const Node>(Kind::Cos, arg, Expr()));
}

Expr Expr::exp(const Expr& arg) {
    if (arg.is_constant()) return constant(std::exp(arg.value()));
    return Expr(std::make_shared<const Node>(Kind::Exp, arg, Expr()));
}

Expr Expr::linear_combination(double a, const Expr& x, double b, const Expr& y) {
    if (x.same_as(y)) return mul(constant(a + b), x);
    return add(mul(constant(a), x), mul(constant(b), y));
}

Expr::Kind Expr::kind() const noexcept { return node_->kind; }

double Expr::value() const {
    if (kind() != Kind::Constant) throw std::logic_error("Expr::value on non-constant");
    return node_->value;
}

unsigned Expr::exponent() const {
    if (kind() != Kind::Pow) throw std::logic_error("Expr::exponent on non-power");
    return node_->exponent;
}

const Expr& Expr::lhs() const { return node_->a; }
const Expr& Expr::rhs() const { return node_->b; }
const Expr& Expr::arg() const { return node_->a; }

bool Expr::is_zero() const noexcept { return kind() == Kind::Constant && node_->value == 0.0; }

double Expr::eval(double t) const {
    const Node& n = *node_;
    switch (n.kind) {
        case Kind::Constant: return n.value;
        case Kind::Variable: return t;
        case Kind::Add: return n.a.eval(t) + n.b.eval(t);
        case Kind::Mul: return n.a.eval(t) * n.b.eval(t);
        case Kind::Neg: return -n.a.eval(t);
        case Kind::Pow: {
            const double base = n.a.eval(t);
            double r = 1.0;
            for (unsigned k = 0; k < n.exponent; ++k) r *= base;
            return r;
        }
        case Kind::Sin: return std::sin(n.a.eval(t));
        case Kind::Cos: return std::cos(n.a.eval(t));
        case Kind::Exp: return std::exp(n.a.eval(t));
    }
    return 0.0;
}

Expr Expr::derivative() const {
    const Node& n = *node_;
    switch (n.kind) {
        case Kind::Constant: return Expr();
        case Kind::Variable: return constant(1.0);
        case Kind::Add: return add(n.a.derivative(), n.b.derivative());
        case Kind::Mul:
            return add(mul(n.a.derivative(), n.b), mul(n.a, n.b.derivative()));
        case Kind::Neg: return neg(n.a.derivative());
        case Kind::Pow:
            return mul(mul(constant(static_cast<double>(n.exponent)), pow(n.a, n.exponent - 1)),
                       n.a.derivative());
        case Kind::Sin: return mul(n.a.derivative(), cos(n.a));
        case Kind::Cos: return neg(mul(n.a.derivative(), sin(n.a)));
        case Kind::Exp: return mul(n.a.derivative(), *this);
    }
    return Expr();
}

Expr Expr::derivative(int order) const {
    if (order < 0) throw PreconditionViolation("derivative order must be non-negative");
    Expr out = *this;
    for (int k = 0; k < order; ++k) out = out.derivative();
    return out;
}

bool Expr::same_as(const Expr& other) const {
    if (node_ == other.node_) return true;
    const Node& x = *node_;
    const Node& y = *other.node_;
    if (x.kind != y.kind) return false;
    switch (x.kind) {
        case Kind::Constant: return x.value == y.value;
        case Kind::Variable: return true;
        case Kind::Add:
        case Kind::Mul: return x.a.same_as(y.a) && x.b.same_as(y.b);
        case Kind::Pow: return x.exponent == y.exponent && x.a.same_as(y.a);
        case Kind::Neg:
        case Kind::Sin:
        case Kind::Cos:
        case Kind::Exp: return x.a.same_as(y.a);
    }
    return false;
}

namespace {

// Binding strength used by the printer; mirrors the grammar levels.
int precedence(const Expr& e) {
    switch (e.kind()) {
        case Expr::Kind::Add: return 1;
        case Expr::Kind::Mul: return 2;
        case Expr::Kind::Neg: return 3;
        case Expr::Kind::Constant: return e.value() < 0 ? 3 : 5;
        case Expr::Kind::Pow: return 4;
        default: return 5;
    }
}

std::string format_number(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc()) return std::to_string(v);
    return std::string(buf, end);
}

std::string print(const Expr& e, int min_prec) {
    std::string s;
    switch (e.kind()) {
        case Expr::Kind::Constant: s = format_number(e.value()); break;
        case Expr::Kind::Variable: s = "t"; break;
        case Expr::Kind::Add: {
            const Expr& r = e.rhs();
            if (r.kind() == Expr::Kind::Neg) {
                s = print(e.lhs(), 1) + " - " + print(r.arg(), 2);
            } else if (r.is_constant() && r.value() < 0) {
                s = print(e.lhs(), 1) + " - " + format_number(-r.value());
            } else {
                s = print(e.lhs(), 1) + " + " + print(r, 2);
            }
            break;
        }
        case Expr::Kind::Mul: s = print(e.lhs(), 2) + " * " + print(e.rhs(), 3); break;
        case Expr::Kind::Neg: s = "-" + print(e.arg(), 3); break;
        case Expr::Kind::Pow: s = print(e.arg(), 5) + "^" + std::to_string(e.exponent()); break;
        case Expr::Kind::Sin: s = "sin(" + print(e.arg(), 0) + ")"; break;
        case Expr::Kind::Cos: s = "cos(" + print(e.arg(), 0) + ")"; break;
        case Expr::Kind::Exp: s = "exp(" + print(e.arg(), 0) + ")"; break;
    }
    if (precedence(e) < min_prec) return "(" + s + ")";
    return s;
}

}  // namespace

std::string Expr::to_string() const { return print(*this, 0); }

Expr operator+(const Expr& a, const Expr& b) { return Expr::add(a, b); }
Expr operator-(const Expr& a, const Expr& b) { return Expr::add(a, Expr::neg(b)); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::mul(a, b); }
Expr operator*(double a, const Expr& b) { return Expr::mul(Expr::constant(a), b); }
Expr operator-(const Expr& a) { return Expr::neg(a); }

// ---------------------------------------------------------------------------

VectorSignal::VectorSignal(std::vector<Expr> components) : components_(std::move(components)) {}

VectorSignal VectorSignal::zero(int dim) {
    return VectorSignal(std::vector<Expr>(static_cast<std::size_t>(dim)));
}

Vector VectorSignal::eval(double t) const {
    Vector out(dimension());
    eval_into(t, out.data());
    return out;
}

void VectorSignal::eval_into(double t, double* out) const {
    for (std::size_t k = 0; k < components_.size(); ++k) out[k] = components_[k].eval(t);
}

VectorSignal VectorSignal::differentiate(int order) const {
    std::vector<Expr> out;
    out.reserve(components_.size());
    for (const auto& c : components_) out.push_back(c.derivative(order));
    return VectorSignal(std::move(out));
}

VectorSignal VectorSignal::apply(const Matrix& m) const {
    if (m.cols() != dimension()) {
        throw DimensionMismatch("signal of dimension " + std::to_string(dimension()) +
                                " multiplied by matrix with " + std::to_string(m.cols()) + " columns");
    }
    std::vector<Expr> out;
    out.reserve(static_cast<std::size_t>(m.rows()));
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Expr acc;
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            const double w = m(r, c);
            if (w == 0.0 || components_[static_cast<std::size_t>(c)].is_zero()) continue;
            acc = Expr::add(acc, Expr::mul(Expr::constant(w), components_[static_cast<std::size_t>(c)]));
        }
        out.push_back(acc);
    }
    return VectorSignal(std::move(out));
}

VectorSignal VectorSignal::linear_combination(double a, const VectorSignal& x, double b,
                                              const VectorSignal& y) {
    if (x.dimension() != y.dimension()) throw DimensionMismatch("signal dimensions differ");
    std::vector<Expr> out;
    out.reserve(x.components_.size());
    for (std::size_t k = 0; k < x.components_.size(); ++k) {
        out.push_back(Expr::linear_combination(a, x.components_[k], b, y.components_[k]));
    }
    return VectorSignal(std::move(out));
}

bool VectorSignal::is_zero() const noexcept {
    return std::all_of(components_.begin(), components_.end(), [](const Expr& e) { return e.is_zero(); });
}

bool VectorSignal::same_as(const VectorSignal& other) const {
    if (dimension() != other.dimension()) return false;
    for (std::size_t k = 0; k < components_.size(); ++k) {
        if (!components_[k].same_as(other.components_[k])) return false;
    }
    return true;
}

std::string VectorSignal::to_string() const {
    std::string s = "[";
    for (std::size_t k = 0; k < components_.size(); ++k) {
        if (k) s += ", ";
        s += components_[k].to_string();
    }
    return s + "]";
}

// ---------------------------------------------------------------------------

PiecewiseSignal::PiecewiseSignal(std::vector<double> breakpoints, std::vector<VectorSignal> pieces,
                                 int smoothness)
    : breakpoints_(std::move(breakpoints)), pieces_(std::move(pieces)), smoothness_(smoothness) {
    if (pieces_.size() != breakpoints_.size() + 1) {
        throw InputError("piecewise signal needs exactly one more piece than breakpoints");
    }
    for (std::size_t k = 0; k < breakpoints_.size(); ++k) {
        if (!std::isfinite(breakpoints_[k]) || breakpoints_[k] <= 0.0) {
            throw InputError("piecewise breakpoints must be finite and positive");
        }
        if (k && !(breakpoints_[k] > breakpoints_[k - 1])) {
            throw InputError("piecewise breakpoints must be strictly increasing");
        }
    }
    for (const auto& p : pieces_) {
        if (p.dimension() != pieces_.front().dimension()) {
            throw DimensionMismatch("piecewise signal pieces differ in dimension");
        }
    }
    if (breakpoints_.empty()) smoothness_ = kUnboundedSmoothness;
    if (smoothness_ < -1) smoothness_ = -1;
}

PiecewiseSignal::PiecewiseSignal(VectorSignal single)
    : pieces_{std::move(single)}, smoothness_(kUnboundedSmoothness) {}

PiecewiseSignal PiecewiseSignal::zero(int dim) { return PiecewiseSignal(VectorSignal::zero(dim)); }

int PiecewiseSignal::dimension() const noexcept {
    return pieces_.empty() ? 0 : pieces_.front().dimension();
}

std::size_t PiecewiseSignal::piece_index(double t) const {
    const auto it = std::lower_bound(breakpoints_.begin(), breakpoints_.end(), t);
    return static_cast<std::size_t>(it - breakpoints_.begin());
}

Vector PiecewiseSignal::eval(double t) const { return pieces_[piece_index(t)].eval(t); }

void PiecewiseSignal::eval_into(double t, double* out) const { pieces_[piece_index(t)].eval_into(t, out); }

Vector PiecewiseSignal::right_value_at_zero(int order) const {
    return pieces_.front().differentiate(order).eval(0.0);
}

PiecewiseSignal PiecewiseSignal::differentiate(int order) const {
    if (order < 0) throw PreconditionViolation("derivative order must be non-negative");
    std::vector<VectorSignal> out;
    out.reserve(pieces_.size());
    for (const auto& p : pieces_) out.push_back(p.differentiate(order));
    const int s = smoothness_ == kUnboundedSmoothness ? smoothness_ : std::max(smoothness_ - order, -1);
    return PiecewiseSignal(breakpoints_, std::move(out), s);
}

PiecewiseSignal PiecewiseSignal::apply(const Matrix& m) const {
    std::vector<VectorSignal> out;
    out.reserve(pieces_.size());
    for (const auto& p : pieces_) out.push_back(p.apply(m));
    return PiecewiseSignal(breakpoints_, std::move(out), smoothness_);
}

PiecewiseSignal PiecewiseSignal::linear_combination(double a, const PiecewiseSignal& x, double b,
                                                    const PiecewiseSignal& y) {
    if (x.dimension() != y.dimension()) throw DimensionMismatch("piecewise signal dimensions differ");
    std::vector<double> merged;
    std::set_union(x.breakpoints_.begin(), x.breakpoints_.end(), y.breakpoints_.begin(),
                   y.breakpoints_.end(), std::back_inserter(merged));
    merged.erase(std::unique(merged.begin(), merged.end()), merged.end());

    std::vector<VectorSignal> pieces;
    pieces.reserve(merged.size() + 1);
    for (std::size_t k = 0; k <= merged.size(); ++k) {
        // Any interior point of the k-th merged interval picks the owning pieces.
        double probe = 0.0;
        if (merged.empty()) {
            probe = 0.0;
        } else if (k == 0) {
            probe = merged.front() * 0.5;
        } else if (k == merged.size()) {
            probe = merged.back() + 1.0;
        } else {
            probe = 0.5 * (merged[k - 1] + merged[k]);
        }
        pieces.push_back(VectorSignal::linear_combination(a, x.pieces_[x.piece_index(probe)], b,
                                                          y.pieces_[y.piece_index(probe)]));
    }
    return PiecewiseSignal(std::move(merged), std::move(pieces), std::min(x.smoothness_, y.smoothness_));
}

double PiecewiseSignal::max_breakpoint_mismatch(int order) const {
    double worst = 0.0;
    for (std::size_t k = 0; k < breakpoints_.size(); ++k) {
        const double b = breakpoints_[k];
        for (int d = 0; d <= order; ++d) {
            const Vector left = pieces_[k].differentiate(d).eval(b);
            const Vector right = pieces_[k + 1].differentiate(d).eval(b);
            worst = std::max(worst, (left - right).cwiseAbs().maxCoeff());
        }
    }
    return worst;
}

bool PiecewiseSignal::is_zero() const noexcept {
    return std::all_of(pieces_.begin(), pieces_.end(), [](const VectorSignal& p) { return p.is_zero(); });
}

// ---------------------------------------------------------------------------

PiecewiseSignal hermite_extend(const VectorSignal& f, double b, int q) {
    if (!(b > 0) || !std::isfinite(b)) throw PreconditionViolation("hermite_extend: b must be positive");
    if (q < 1) throw PreconditionViolation("hermite_extend: q must be at least 1");
    const int dim = f.dimension();
    const int size = 2 * q;

    // Confluent Vandermonde system in s = t - b for P(s) = sum_j c_j s^j:
    // rows 0..q-1 impose P^(k)(0), rows q..2q-1 impose P^(k)(1) = 0.
    Matrix system = Matrix::Zero(size, size);
    for (int k = 0; k < q; ++k) {
        double kfact = 1.0;
        for (int r = 2; r <= k; ++r) kfact *= r;
        system(k, k) = kfact;
        for (int j = k; j < size; ++j) {
            double falling = 1.0;
            for (int r = 0; r < k; ++r) falling *= static_cast<double>(j - r);
            system(q + k, j) = falling;
        }
    }
    const auto lu = system.fullPivLu();

    std::vector<VectorSignal> derivs;
    derivs.reserve(static_cast<std::size_t>(q));
    for (int k = 0; k < q; ++k) derivs.push_back(f.differentiate(k));

    const Expr shifted = Expr::add(Expr::variable(), Expr::constant(-b));
    std::vector<Expr> poly;
    poly.reserve(static_cast<std::size_t>(dim));
    for (int c = 0; c < dim; ++c) {
        Vector rhs = Vector::Zero(size);
        for (int k = 0; k < q; ++k) rhs(k) = derivs[static_cast<std::size_t>(k)][c].eval(b);
        const Vector coeff = lu.solve(rhs);
        Expr p;
        for (int j = 0; j < size; ++j) {
            if (coeff(j) == 0.0) continue;
            p = Expr::add(p, Expr::mul(Expr::constant(coeff(j)), Expr::pow(shifted, static_cast<unsigned>(j))));
        }
        poly.push_back(p);
    }
    return PiecewiseSignal({b, b + 1.0}, {f, VectorSignal(std::move(poly)), VectorSignal::zero(dim)}, q - 1);
}

}  // namespace dlimit
