#include "dlimit/test_function.hpp"

#include "dlimit/errors.hpp"

#include <cmath>
#include <deque>
#include <mutex>

namespace dlimit {
namespace {

using Poly = std::vector<double>;

Poly derivative_of(const Poly& p) {
    if (p.size() <= 1) return {0.0};
    Poly out(p.size() - 1);
    for (std::size_t k = 1; k < p.size(); ++k) out[k - 1] = static_cast<double>(k) * p[k];
    return out;
}

Poly multiply(const Poly& a, const Poly& b) {
    Poly out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    }
    return out;
}

void accumulate(Poly& into, const Poly& p) {
    if (into.size() < p.size()) into.resize(p.size(), 0.0);
    for (std::size_t k = 0; k < p.size(); ++k) into[k] += p[k];
}

void trim(Poly& p) {
    while (p.size() > 1 && p.back() == 0.0) p.pop_back();
}

double horner(const Poly& p, double u) {
    double acc = 0.0;
    for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * u + *it;
    return acc;
}

// P_{n+1} = (1-u^2)^2 P_n' + 4 n u (1-u^2) P_n - 2 u P_n
Poly next_polynomial(const Poly& p, int n) {
    static const Poly w2 = {1.0, 0.0, -2.0, 0.0, 1.0};  // (1-u^2)^2
    const Poly cross = {0.0, 4.0 * n - 2.0, 0.0, -4.0 * n};  // 4nu(1-u^2) - 2u
    Poly out = multiply(w2, derivative_of(p));
    accumulate(out, multiply(cross, p));
    trim(out);
    return out;
}

class PolynomialTable {
public:
    const Poly& get(int n) {
        std::lock_guard lock(mutex_);
        while (static_cast<int>(table_.size()) <= n) {
            const int k = static_cast<int>(table_.size()) - 1;
            table_.push_back(next_polynomial(table_.back(), k));
        }
        return table_[static_cast<std::size_t>(n)];
    }

private:
    std::mutex mutex_;
    std::deque<Poly> table_{Poly{1.0}};  // deque keeps references stable
};

PolynomialTable& table() {
    static PolynomialTable t;
    return t;
}

double binomial(int n, int k) {
    double r = 1.0;
    for (int j = 1; j <= k; ++j) r = r * (n - k + j) / j;
    return r;
}

}  // namespace

const std::vector<double>& bump_polynomial(int n) {
    if (n < 0) throw PreconditionViolation("bump_polynomial: negative order");
    return table().get(n);
}

double unit_bump(double u, int n) {
    if (n < 0) throw PreconditionViolation("unit_bump: negative order");
    if (!(std::abs(u) < 1.0 - kBumpEdge)) return 0.0;
    const double w = 1.0 - u * u;
    const double scale = std::exp(-1.0 / w - 2.0 * n * std::log(w));
    return horner(bump_polynomial(n), u) * scale;
}

TestFunction::TestFunction(double center, double radius, Vector direction, std::vector<double> modulation,
                           std::string id)
    : center_(center),
      radius_(radius),
      direction_(std::move(direction)),
      modulation_(std::move(modulation)),
      id_(std::move(id)) {
    if (!std::isfinite(center_)) throw InputError("test function center must be finite");
    if (!(radius_ > 0) || !std::isfinite(radius_)) throw InputError("test function radius must be positive");
    if (direction_.size() == 0) throw InputError("test function direction must be non-empty");
    const double norm = direction_.norm();
    if (std::abs(norm - 1.0) > 1e-12) {
        throw InputError("test function direction must have unit Euclidean norm");
    }
}

double TestFunction::profile(double t, int order) const {
    if (order < 0) throw PreconditionViolation("test function derivative order must be non-negative");
    const int k = order + offset_;
    const double u = (t - center_) / radius_;
    if (!(std::abs(u) < 1.0 - kBumpEdge)) return 0.0;

    double sum = 0.0;
    if (modulation_.empty()) {
        sum = unit_bump(u, k);
    } else {
        Poly m = modulation_;
        // Leibniz rule: sum_j C(k, j) psi^(j) m^(k-j).
        std::vector<Poly> mderiv{m};
        for (int j = 1; j <= k; ++j) mderiv.push_back(derivative_of(mderiv.back()));
        for (int j = 0; j <= k; ++j) {
            const double mv = horner(mderiv[static_cast<std::size_t>(k - j)], u);
            if (mv == 0.0) continue;
            sum += binomial(k, j) * unit_bump(u, j) * mv;
        }
    }
    return sum / std::pow(radius_, k);
}

Vector TestFunction::eval(double t, int order) const { return profile(t, order) * direction_; }

TestFunction TestFunction::derivative(int k) const {
    if (k < 0) throw PreconditionViolation("test function derivative order must be non-negative");
    TestFunction out = *this;
    out.offset_ += k;
    if (!id_.empty()) out.id_ = id_ + "'" + (k == 1 ? "" : std::to_string(k));
    return out;
}

Vector bump_eval(const TestFunction& phi, double t, int order) { return phi.eval(t, order); }

std::vector<TestFunction> standard_bank(int n, int q) {
    if (n < 1) throw PreconditionViolation("standard_bank: dimension must be positive");
    if (q < 1) throw PreconditionViolation("standard_bank: q must be at least 1");
    struct Placement {
        double center;
        double radius;
        const char* tag;
    };
    static constexpr Placement placements[] = {{0.0, 1.0, "c0"}, {1.0, 0.5, "c1"}, {2.0, 0.5, "c2"}, {4.0, 0.5, "c4"}};
    std::vector<TestFunction> bank;
    bank.reserve(static_cast<std::size_t>(4 * n));
    for (int d = 0; d < n; ++d) {
        Vector dir = Vector::Zero(n);
        dir(d) = 1.0;
        for (const auto& p : placements) {
            bank.emplace_back(p.center, p.radius, dir, std::vector<double>{},
                              "e" + std::to_string(d + 1) + "_" + p.tag);
        }
    }
    return bank;
}

}  // namespace dlimit
