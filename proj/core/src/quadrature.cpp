#include "dlimit/quadrature.hpp"

#include "dlimit/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <queue>
#include <string>

namespace dlimit {

void QuadratureSpec::validate() const {
    if (!(abs_tol > 0) || !(rel_tol > 0)) throw InputError("quadrature tolerances must be positive");
    if (max_subdivisions < 1) throw InputError("quadrature subdivision cap must be at least 1");
}

QuadratureSpec QuadratureSpec::tightened(double factor) const {
    QuadratureSpec out = *this;
    out.abs_tol *= factor;
    out.rel_tol *= factor;
    return out;
}

namespace {

// 15-point Kronrod abscissae (non-negative half); odd indices are the 7-point
// Gauss nodes.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Interval {
    double a = 0.0;
    double b = 0.0;
    std::vector<double> value;
    double error = 0.0;
    double roundoff = 0.0;  // 50 eps times the integral of |f| over the interval
    bool frozen = false;
};

class Kronrod15 {
public:
    explicit Kronrod15(int dim) : dim_(dim), fc_(dim), f1_(dim), f2_(dim), gauss_(dim), abs_(dim) {}

    Interval apply(const VectorIntegrand& f, double a, double b) {
        const double center = 0.5 * (a + b);
        const double half = 0.5 * (b - a);
        Interval iv{a, b, std::vector<double>(dim_, 0.0), 0.0, 0.0, false};
        std::fill(gauss_.begin(), gauss_.end(), 0.0);
        std::fill(abs_.begin(), abs_.end(), 0.0);

        f(center, fc_.data());
        for (int d = 0; d < dim_; ++d) {
            iv.value[d] = kWgk[7] * fc_[d];
            gauss_[d] = kWg[3] * fc_[d];
            abs_[d] = kWgk[7] * std::abs(fc_[d]);
        }
        for (int j = 0; j < 7; ++j) {
            const double dx = half * kXgk[j];
            f(center - dx, f1_.data());
            f(center + dx, f2_.data());
            for (int d = 0; d < dim_; ++d) {
                const double s = f1_[d] + f2_[d];
                iv.value[d] += kWgk[j] * s;
                abs_[d] += kWgk[j] * (std::abs(f1_[d]) + std::abs(f2_[d]));
                if (j % 2 == 1) gauss_[d] += kWg[j / 2] * s;
            }
        }
        double diff2 = 0.0;
        double abs2 = 0.0;
        for (int d = 0; d < dim_; ++d) {
            iv.value[d] *= half;
            const double diff = iv.value[d] - gauss_[d] * half;
            diff2 += diff * diff;
            const double ab = abs_[d] * std::abs(half);
            abs2 += ab * ab;
        }
        for (double v : iv.value) {
            if (!std::isfinite(v)) {
                throw QuadratureFailure("integrand is not finite on [" + std::to_string(a) + ", " +
                                        std::to_string(b) + "]");
            }
        }
        iv.error = std::sqrt(diff2);
        iv.roundoff = 50.0 * std::numeric_limits<double>::epsilon() * std::sqrt(abs2);
        const double width_floor = 1e-15 * std::max(1.0, std::max(std::abs(a), std::abs(b)));
        if (iv.error <= iv.roundoff || (b - a) <= width_floor) {
            iv.error = std::max(iv.error, iv.roundoff);
            iv.frozen = true;
        }
        return iv;
    }

private:
    int dim_;
    std::vector<double> fc_, f1_, f2_, gauss_, abs_;
};

double norm_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

}  // namespace

VectorQuadResult integrate_vector(const VectorIntegrand& f, int dim, double a, double b,
                                  std::span<const double> splits, const QuadratureSpec& spec) {
    spec.validate();
    if (dim < 1) throw InputError("integrate_vector: dimension must be positive");
    if (!std::isfinite(a) || !std::isfinite(b)) throw InputError("integration limits must be finite");
    VectorQuadResult result;
    result.value = Vector::Zero(dim);
    if (a == b) return result;
    if (b < a) {
        result = integrate_vector(f, dim, b, a, splits, spec);
        result.value = -result.value;
        return result;
    }

    std::vector<double> points{a, b};
    auto add_points = [&](std::span<const double> pts) {
        for (double p : pts) {
            if (p > a && p < b) points.push_back(p);
        }
    };
    add_points(splits);
    add_points(spec.extra_breakpoints);
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());

    Kronrod15 rule(dim);
    auto worse = [](const Interval& x, const Interval& y) { return x.error < y.error; };
    std::priority_queue<Interval, std::vector<Interval>, decltype(worse)> active(worse);
    std::vector<Interval> settled;

    std::vector<double> total(dim, 0.0);
    double total_error = 0.0;
    double total_roundoff = 0.0;
    int count = 0;
    auto admit = [&](Interval iv) {
        for (int d = 0; d < dim; ++d) total[d] += iv.value[d];
        total_error += iv.error;
        total_roundoff += iv.roundoff;
        ++count;
        if (iv.frozen) {
            settled.push_back(std::move(iv));
        } else {
            active.push(std::move(iv));
        }
    };
    for (std::size_t k = 0; k + 1 < points.size(); ++k) admit(rule.apply(f, points[k], points[k + 1]));

    // Error estimates within a small multiple of the rounding floor of the
    // integrand are noise; subdividing further does not reduce them.
    auto tolerance = [&] {
        return std::max({spec.abs_tol, spec.rel_tol * norm_of(total), 10.0 * total_roundoff});
    };

    while (total_error > tolerance() && !active.empty()) {
        if (count >= spec.max_subdivisions) {
            char msg[160];
            std::snprintf(msg, sizeof msg,
                          "adaptive quadrature reached %d intervals with error estimate %.3g above tolerance %.3g",
                          count, total_error, tolerance());
            throw QuadratureFailure(msg);
        }
        Interval worst = active.top();
        active.pop();
        for (int d = 0; d < dim; ++d) total[d] -= worst.value[d];
        total_error -= worst.error;
        total_roundoff -= worst.roundoff;
        --count;
        const double mid = 0.5 * (worst.a + worst.b);
        admit(rule.apply(f, worst.a, mid));
        admit(rule.apply(f, mid, worst.b));
    }

    // Re-sum from the final partition so the result does not carry the
    // cancellation noise of the running update.
    std::fill(total.begin(), total.end(), 0.0);
    total_error = 0.0;
    std::vector<Interval> all = std::move(settled);
    while (!active.empty()) {
        all.push_back(active.top());
        active.pop();
    }
    std::sort(all.begin(), all.end(), [](const Interval& x, const Interval& y) { return x.a < y.a; });
    for (const auto& iv : all) {
        for (int d = 0; d < dim; ++d) total[d] += iv.value[d];
        total_error += iv.error;
    }
    for (int d = 0; d < dim; ++d) result.value[d] = total[d];
    result.error = total_error;
    result.intervals = static_cast<int>(all.size());
    return result;
}

QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     std::span<const double> splits, const QuadratureSpec& spec) {
    const auto r = integrate_vector([&f](double t, double* out) { out[0] = f(t); }, 1, a, b, splits, spec);
    return {r.value[0], r.error, r.intervals};
}

std::vector<double> layer_splits_from_left(double a, double b, double width) {
    std::vector<double> out;
    if (!(width > 0) || !std::isfinite(width)) return out;
    for (int j = 1; j <= 10; ++j) {
        const double p = a + j * width;
        if (p >= b) return out;
        out.push_back(p);
    }
    for (double step = 20.0 * width; a + step < b; step *= 2.0) out.push_back(a + step);
    return out;
}

std::vector<double> layer_splits_from_right(double a, double b, double width) {
    auto out = layer_splits_from_left(-b, -a, width);
    for (double& p : out) p = -p;
    std::reverse(out.begin(), out.end());
    return out;
}

}  // namespace dlimit
