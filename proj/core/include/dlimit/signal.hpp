#pragma once

#include "dlimit/matrix.hpp"

#include <climits>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace dlimit {

/// Immutable expression in the time variable t.
///
/// The node set (constants, t, +, *, unary minus, integer powers, sin, cos,
/// exp) is closed under differentiation. Factory functions fold constants and
/// drop neutral elements, so equal inputs always build identical trees.
class Expr {
public:
    enum class Kind { Constant, Variable, Add, Mul, Neg, Pow, Sin, Cos, Exp };

    Expr();  // the constant 0

    static Expr constant(double value);
    static Expr variable();
    static Expr add(const Expr& lhs, const Expr& rhs);
    static Expr mul(const Expr& lhs, const Expr& rhs);
    static Expr neg(const Expr& arg);
    static Expr pow(const Expr& base, unsigned exponent);
    static Expr sin(const Expr& arg);
    static Expr cos(const Expr& arg);
    static Expr exp(const Expr& arg);

    /// a*x + b*y, collapsing to (a+b)*x when x and y are the same tree.
    static Expr linear_combination(double a, const Expr& x, double b, const Expr& y);

    Kind kind() const noexcept;
    double value() const;         // Constant only
    unsigned exponent() const;    // Pow only
    const Expr& lhs() const;      // Add, Mul
    const Expr& rhs() const;      // Add, Mul
    const Expr& arg() const;      // Neg, Pow (base), Sin, Cos, Exp

    bool is_constant() const noexcept { return kind() == Kind::Constant; }
    bool is_zero() const noexcept;

    double eval(double t) const;
    Expr derivative() const;
    Expr derivative(int order) const;

    bool same_as(const Expr& other) const;
    std::string to_string() const;

private:
    struct Node;
    explicit Expr(std::shared_ptr<const Node> node);
    std::shared_ptr<const Node> node_;
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator*(double a, const Expr& b);
Expr operator-(const Expr& a);

/// Fixed-dimension vector of expressions.
class VectorSignal {
public:
    VectorSignal() = default;
    explicit VectorSignal(std::vector<Expr> components);

    static VectorSignal zero(int dim);

    int dimension() const noexcept { return static_cast<int>(components_.size()); }
    const std::vector<Expr>& components() const noexcept { return components_; }
    const Expr& operator[](int k) const { return components_.at(static_cast<std::size_t>(k)); }

    Vector eval(double t) const;
    void eval_into(double t, double* out) const;
    VectorSignal differentiate(int order = 1) const;

    /// Row-wise linear map: result_r = sum_j m(r, j) * component_j.
    VectorSignal apply(const Matrix& m) const;
    static VectorSignal linear_combination(double a, const VectorSignal& x, double b,
                                           const VectorSignal& y);

    bool is_zero() const noexcept;
    bool same_as(const VectorSignal& other) const;
    std::string to_string() const;

private:
    std::vector<Expr> components_;
};

/// Parses "[e1, e2, ...]" against the signal grammar. Throws ParseError on
/// malformed text and DimensionMismatch when the list length differs from n.
/// Pass n < 0 to accept any length.
VectorSignal parse_signal(std::string_view text, int n = -1);
Expr parse_expr(std::string_view text);

inline constexpr int kUnboundedSmoothness = INT_MAX;

/// Piecewise vector signal on [0, inf).
///
/// Piece k owns (b_{k-1}, b_k] with b_0 = -inf and b_{m+1} = +inf, so a value
/// at a breakpoint comes from the piece on its left. `smoothness` is the
/// order up to which one-sided derivatives match at every breakpoint; -1 means
/// no matching is asserted. Signals without breakpoints carry
/// kUnboundedSmoothness.
class PiecewiseSignal {
public:
    PiecewiseSignal() = default;
    PiecewiseSignal(std::vector<double> breakpoints, std::vector<VectorSignal> pieces,
                    int smoothness);
    PiecewiseSignal(VectorSignal single);  // NOLINT(google-explicit-constructor)

    static PiecewiseSignal zero(int dim);

    int dimension() const noexcept;
    const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }
    const std::vector<VectorSignal>& pieces() const noexcept { return pieces_; }
    int smoothness() const noexcept { return smoothness_; }
    bool has_breakpoints() const noexcept { return !breakpoints_.empty(); }

    std::size_t piece_index(double t) const;
    Vector eval(double t) const;
    void eval_into(double t, double* out) const;
    /// Right-hand value at 0 of the derivative of the given order.
    Vector right_value_at_zero(int order = 0) const;

    PiecewiseSignal differentiate(int order = 1) const;
    PiecewiseSignal apply(const Matrix& m) const;
    static PiecewiseSignal linear_combination(double a, const PiecewiseSignal& x, double b,
                                              const PiecewiseSignal& y);

    /// Largest one-sided mismatch over breakpoints and derivative orders 0..order.
    double max_breakpoint_mismatch(int order) const;

    bool is_zero() const noexcept;

private:
    std::vector<double> breakpoints_;
    std::vector<VectorSignal> pieces_;
    int smoothness_ = kUnboundedSmoothness;
};

/// Compactly supported extension: f on [0, b], the degree 2q-1 Hermite
/// polynomial joining f to zero with q-1 matching derivatives on (b, b+1],
/// and zero afterwards.
PiecewiseSignal hermite_extend(const VectorSignal& f, double b, int q);

}  // namespace dlimit
