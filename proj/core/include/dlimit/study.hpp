#pragma once

#include "dlimit/perturbed.hpp"
#include "dlimit/singular_solver.hpp"
#include "dlimit/test_function.hpp"

#include <optional>
#include <string>
#include <vector>

namespace dlimit {

/// Largest max/min ratio of layer integrals across indices still counted as bounded.
inline constexpr double kBoundedRatio = 10.0;

struct StudyConfig {
    SolveRequest system;
    std::vector<PerturbationFamily> families;  // run_study uses the first
    std::vector<int> indices;
    std::vector<TestFunction> bank;            // empty means standard_bank
    QuadratureSpec quad;
    int k_search_max = -1;                     // negative means q + 1
    int threads = 0;                           // 0 means hardware concurrency

    /// Throws InputError unless indices are strictly increasing (at least
    /// two), a family is present and the bank matches the system dimension.
    void validate() const;
    std::vector<TestFunction> effective_bank() const;
};

enum class Verdict { Converging, NotConverging, DivergentFamily };
const char* verdict_name(Verdict v);

struct StudyRow {
    int i = 0;
    std::string testfn_id;
    double pairing_perturbed = 0.0;
    double pairing_limit = 0.0;
    double abs_error = 0.0;
    double quad_err_estimate = 0.0;
    bool failed = false;
    std::string failure;
};

struct RateFit {
    std::string testfn_id;
    double slope = 0.0;
    int points = 0;  // fewer than 2 means no fit
};

struct BoundednessRow {
    int k = 0;
    std::vector<LayerIntegral> values;  // one per study index
    bool divergent = false;
    double ratio = 0.0;                 // max / min over indices
    bool bounded = false;
};

struct ConvergenceReport {
    std::string family;
    int nilpotency_index = 1;
    std::vector<int> indices;
    std::vector<StudyRow> rows;  // index-major, bank order within an index
    std::vector<RateFit> rates;
    std::vector<BoundednessRow> boundedness;
    std::optional<int> bounded_k;
    Verdict verdict = Verdict::NotConverging;
    double threshold = 0.0;
    std::vector<std::string> warnings;

    /// Rows for one bank member, in index order.
    std::vector<const StudyRow*> rows_for(const std::string& testfn_id) const;
};

/// Final error threshold for a converging verdict: max(1e-3, 10 * abs_tol).
double verdict_threshold(const QuadratureSpec& quad);

/// Least-squares slope of log(error) against log(i) over positive errors.
RateFit fit_rate(const std::string& id, const std::vector<int>& indices, const std::vector<double>& errors);

/// Pairings of x_i against every bank member for every index, the limit
/// pairings from the exact solution, fitted rates, the layer integral table
/// for k = 0..k_search_max, and the verdict. A failing row is recorded and
/// left out of the verdict.
ConvergenceReport run_study(const StudyConfig& cfg);

struct AgreementRow {
    std::string testfn_id;
    std::size_t family_a = 0;
    std::size_t family_b = 0;
    double pairing_a = 0.0;
    double pairing_b = 0.0;
    double difference = 0.0;
    double tolerance = 0.0;
    bool agree = false;
};

struct UniquenessReport {
    std::vector<ConvergenceReport> studies;
    std::vector<AgreementRow> agreement;
    bool all_agree = false;
};

/// Runs every family of the config and compares final-index pairings
/// pairwise, with tolerance 3 * max(final errors) + abs_tol. Throws
/// PreconditionViolation with fewer than two families or when a family does
/// not converge.
UniquenessReport uniqueness_study(const StudyConfig& cfg);

/// |<x_i, lambda> - <y_i, lambda>|, where y_i is driven by the Hermite
/// extension of f beyond b. Requires supp(lambda) within (-inf, b] and a
/// forcing without breakpoints.
double localization_check(const SolveRequest& system, const PerturbationFamily& family, int i, double b,
                          const TestFunction& lambda, const QuadratureSpec& quad);

}  // namespace dlimit
