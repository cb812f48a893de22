#include "dlimit/study.hpp"

#include "dlimit/distribution.hpp"
#include "dlimit/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <memory>
#include <thread>

namespace dlimit {

void StudyConfig::validate() const {
    const int n = system.dimension();
    if (families.empty()) throw InputError("study needs a perturbation family");
    for (const auto& fam : families) {
        if (fam.base().rows() != n) throw DimensionMismatch("family base dimension differs from the system");
    }
    if (indices.size() < 2) throw InputError("study needs at least two indices");
    for (std::size_t k = 0; k < indices.size(); ++k) {
        if (indices[k] < 1) throw InputError("study indices must be positive");
        if (k > 0 && indices[k] <= indices[k - 1]) throw InputError("study indices must be strictly increasing");
    }
    for (const auto& lam : bank) {
        if (lam.dimension() != n) throw DimensionMismatch("test function " + lam.id() + " has the wrong dimension");
    }
    quad.validate();
}

std::vector<TestFunction> StudyConfig::effective_bank() const {
    if (!bank.empty()) return bank;
    return standard_bank(system.dimension(), system.certify().index);
}

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Converging: return "converging";
        case Verdict::NotConverging: return "not_converging";
        case Verdict::DivergentFamily: return "divergent_family";
    }
    return "unknown";
}

std::vector<const StudyRow*> ConvergenceReport::rows_for(const std::string& testfn_id) const {
    std::vector<const StudyRow*> out;
    for (const auto& r : rows) {
        if (r.testfn_id == testfn_id) out.push_back(&r);
    }
    return out;
}

double verdict_threshold(const QuadratureSpec& quad) { return std::max(1e-3, 10.0 * quad.abs_tol); }

RateFit fit_rate(const std::string& id, const std::vector<int>& indices, const std::vector<double>& errors) {
    RateFit fit;
    fit.testfn_id = id;
    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t k = 0; k < indices.size() && k < errors.size(); ++k) {
        if (errors[k] > 0 && std::isfinite(errors[k])) {
            xs.push_back(std::log(static_cast<double>(indices[k])));
            ys.push_back(std::log(errors[k]));
        }
    }
    fit.points = static_cast<int>(xs.size());
    if (fit.points < 2) return fit;
    const double n = static_cast<double>(xs.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        mx += xs[k];
        my += ys[k];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        sxy += (xs[k] - mx) * (ys[k] - my);
        sxx += (xs[k] - mx) * (xs[k] - mx);
    }
    fit.slope = sxx > 0 ? sxy / sxx : 0.0;
    return fit;
}

namespace {

template <class Task>
void run_parallel(std::size_t count, int threads, const Task& task) {
    unsigned workers = threads > 0 ? static_cast<unsigned>(threads) : std::thread::hardware_concurrency();
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(count)));
    if (workers <= 1) {
        for (std::size_t k = 0; k < count; ++k) task(k);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t k = next++; k < count; k = next++) task(k);
        });
    }
    for (auto& th : pool) th.join();
}

bool nonincreasing_tail(const std::vector<const StudyRow*>& rows, double abs_tol, std::string& why) {
    std::vector<const StudyRow*> valid;
    for (const auto* r : rows) {
        if (!r->failed) valid.push_back(r);
    }
    if (valid.size() < 2) {
        why = "fewer than two successful rows";
        return false;
    }
    const std::size_t start = valid.size() >= 3 ? valid.size() - 3 : 0;
    for (std::size_t k = start; k + 1 < valid.size(); ++k) {
        // Errors already at quadrature noise level may wobble by that much.
        const double slack = 10.0 * abs_tol + valid[k]->quad_err_estimate + valid[k + 1]->quad_err_estimate;
        if (valid[k + 1]->abs_error > valid[k]->abs_error + slack) {
            why = "error increases from i = " + std::to_string(valid[k]->i) + " to i = " +
                  std::to_string(valid[k + 1]->i);
            return false;
        }
    }
    return true;
}

ConvergenceReport study_one(const StudyConfig& cfg, const PerturbationFamily& family) {
    ConvergenceReport rep;
    rep.family = family.describe();
    rep.indices = cfg.indices;
    rep.threshold = verdict_threshold(cfg.quad);
    rep.nilpotency_index = cfg.system.certify().index;

    const auto bank = cfg.effective_bank();
    const GeneralizedFunction limit = solve_singular(cfg.system);
    std::vector<PairingResult> limits;
    limits.reserve(bank.size());
    for (const auto& lam : bank) limits.push_back(pair(limit, lam, cfg.quad));

    const std::size_t ni = cfg.indices.size();
    std::vector<std::unique_ptr<PerturbedSystem>> systems(ni);
    std::vector<std::string> realize_errors(ni);
    for (std::size_t k = 0; k < ni; ++k) {
        try {
            systems[k] = std::make_unique<PerturbedSystem>(family.realize(cfg.indices[k]));
        } catch (const Error& e) {
            realize_errors[k] = e.what();
        }
    }

    // Layer integral table; divergence does not depend on k.
    const int k_max = cfg.k_search_max >= 0 ? cfg.k_search_max : rep.nilpotency_index + 1;
    bool divergent = false;
    for (int kk = 0; kk <= k_max; ++kk) {
        BoundednessRow row;
        row.k = kk;
        double lo = std::numeric_limits<double>::infinity();
        double hi = 0.0;
        for (std::size_t k = 0; k < ni; ++k) {
            LayerIntegral li;
            if (!systems[k]) {
                // No member for this index; its rows fail on their own.
                li.value = std::numeric_limits<double>::quiet_NaN();
                row.values.push_back(li);
                continue;
            }
            {
                try {
                    li = layer_integral_estimate(systems[k]->matrix(), kk, cfg.quad);
                } catch (const NumericError& e) {
                    rep.warnings.push_back("layer integral k = " + std::to_string(kk) + ", i = " +
                                           std::to_string(cfg.indices[k]) + ": " + e.what());
                    li.divergent = true;
                }
            }
            if (li.divergent) {
                row.divergent = true;
            } else {
                lo = std::min(lo, li.value);
                hi = std::max(hi, li.value);
            }
            row.values.push_back(li);
        }
        if (row.divergent) {
            row.ratio = std::numeric_limits<double>::infinity();
        } else if (!std::isfinite(lo)) {
            row.ratio = std::numeric_limits<double>::quiet_NaN();
        } else {
            row.ratio = lo > 0 ? hi / lo : 0.0;
        }
        row.bounded = !row.divergent && row.ratio <= kBoundedRatio;
        if (row.bounded && !rep.bounded_k) rep.bounded_k = kk;
        divergent = divergent || row.divergent;
        rep.boundedness.push_back(std::move(row));
    }

    const std::size_t nb = bank.size();
    rep.rows.resize(ni * nb);
    run_parallel(ni * nb, cfg.threads, [&](std::size_t task) {
        const std::size_t k = task / nb;
        const std::size_t b = task % nb;
        StudyRow& row = rep.rows[task];
        row.i = cfg.indices[k];
        row.testfn_id = bank[b].id();
        row.pairing_limit = limits[b].value;
        if (!systems[k]) {
            row.failed = true;
            row.failure = realize_errors[k];
            return;
        }
        try {
            const auto est = systems[k]->pair(cfg.system.x0, cfg.system.f, bank[b], cfg.quad);
            row.pairing_perturbed = est.value;
            row.abs_error = std::abs(row.pairing_perturbed - row.pairing_limit);
            row.quad_err_estimate = est.error + limits[b].quadrature_error_estimate;
        } catch (const NumericError& e) {
            row.failed = true;
            row.failure = e.what();
        }
    });

    for (const auto& r : rep.rows) {
        if (r.failed) {
            rep.warnings.push_back("row i = " + std::to_string(r.i) + ", " + r.testfn_id +
                                   " failed and is excluded from the verdict: " + r.failure);
        }
    }

    bool converging = true;
    for (const auto& lam : bank) {
        const auto rows = rep.rows_for(lam.id());
        std::vector<double> errs;
        std::vector<int> idx;
        for (const auto* r : rows) {
            if (!r->failed) {
                idx.push_back(r->i);
                errs.push_back(r->abs_error);
            }
        }
        rep.rates.push_back(fit_rate(lam.id(), idx, errs));
        std::string why;
        if (!nonincreasing_tail(rows, cfg.quad.abs_tol, why)) {
            converging = false;
            rep.warnings.push_back(lam.id() + ": " + why);
        } else if (errs.back() > rep.threshold) {
            converging = false;
            rep.warnings.push_back(lam.id() + ": final error above threshold");
        }
    }

    if (divergent) {
        rep.verdict = Verdict::DivergentFamily;
    } else {
        rep.verdict = converging ? Verdict::Converging : Verdict::NotConverging;
    }
    return rep;
}

}  // namespace

ConvergenceReport run_study(const StudyConfig& cfg) {
    cfg.validate();
    return study_one(cfg, cfg.families.front());
}

UniquenessReport uniqueness_study(const StudyConfig& cfg) {
    cfg.validate();
    if (cfg.families.size() < 2) throw PreconditionViolation("uniqueness study needs at least two families");
    UniquenessReport out;
    for (const auto& fam : cfg.families) {
        out.studies.push_back(study_one(cfg, fam));
        if (out.studies.back().verdict != Verdict::Converging) {
            throw PreconditionViolation("family '" + fam.describe() + "' does not converge (verdict " +
                                        verdict_name(out.studies.back().verdict) + ")");
        }
    }
    const auto bank = cfg.effective_bank();
    out.all_agree = true;
    for (const auto& lam : bank) {
        for (std::size_t a = 0; a < out.studies.size(); ++a) {
            for (std::size_t b = a + 1; b < out.studies.size(); ++b) {
                const StudyRow* ra = out.studies[a].rows_for(lam.id()).back();
                const StudyRow* rb = out.studies[b].rows_for(lam.id()).back();
                AgreementRow row;
                row.testfn_id = lam.id();
                row.family_a = a;
                row.family_b = b;
                row.pairing_a = ra->pairing_perturbed;
                row.pairing_b = rb->pairing_perturbed;
                row.difference = std::abs(row.pairing_a - row.pairing_b);
                row.tolerance = 3.0 * std::max(ra->abs_error, rb->abs_error) + cfg.quad.abs_tol;
                row.agree = !ra->failed && !rb->failed && row.difference <= row.tolerance;
                out.all_agree = out.all_agree && row.agree;
                out.agreement.push_back(row);
            }
        }
    }
    return out;
}

double localization_check(const SolveRequest& system, const PerturbationFamily& family, int i, double b,
                          const TestFunction& lambda, const QuadratureSpec& quad) {
    const int q = system.certify().index;
    if (!(b > 0) || !std::isfinite(b)) throw PreconditionViolation("localization needs a finite b > 0");
    if (lambda.support_end() > b) {
        throw PreconditionViolation("test function support ends at " + std::to_string(lambda.support_end()) +
                                    ", beyond b = " + std::to_string(b));
    }
    if (system.f.has_breakpoints()) throw PreconditionViolation("localization needs a forcing without breakpoints");
    const PiecewiseSignal extended = hermite_extend(system.f.pieces().front(), b, q);
    const PerturbedSystem sys(family.realize(i));
    const double x = sys.pair(system.x0, system.f, lambda, quad).value;
    const double y = sys.pair(system.x0, extended, lambda, quad).value;
    return std::abs(x - y);
}

}  // namespace dlimit
