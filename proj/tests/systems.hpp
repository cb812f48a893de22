#pragma once

// Random test systems shared by the unit suites and the acceptance binary.

#include "dlimit/distribution.hpp"
#include "dlimit/singular_solver.hpp"
#include "oracles.hpp"

#include <random>
#include <string>

namespace systems {

inline std::string random_forcing_text(std::mt19937& rng, int n) {
    static const char* const pool[] = {"1",          "t",          "t^2 - 2*t", "sin(t)",      "cos(3*t)",
                                       "2*t^3 + 1",  "sin(2*t) * t", "exp(-t)", "0.5*t^2 + cos(t)", "0"};
    std::uniform_int_distribution<int> pick(0, 9);
    std::string text = "[";
    for (int k = 0; k < n; ++k) text += std::string(k ? ", " : "") + pool[pick(rng)];
    return text + "]";
}

// Nilpotent N = P J P^-1 with a leading Jordan block of size q and an
// optional trailing block, polynomial/trig forcing and random x0.
inline dlimit::SolveRequest random_nilpotent_system(std::mt19937& rng, int q) {
    const int extra = static_cast<int>(rng() % 2) + (q == 1 ? 1 : 0);
    std::vector<int> blocks{q};
    if (extra > 0) blocks.push_back(std::min(q, extra));
    const Eigen::MatrixXd j = oracle::jordan_nilpotent(blocks);
    const int n = static_cast<int>(j.rows());
    const Eigen::MatrixXd p = oracle::random_well_conditioned(rng, n, 0.6);
    dlimit::SolveRequest req;
    req.N = p * j * p.inverse();
    req.x0 = oracle::random_matrix(rng, n, 1, -2.0, 2.0);
    req.f = dlimit::parse_signal(random_forcing_text(rng, n), n);
    return req;
}

// N D(x) - x - f step - delta N x0 as a generalized function.
inline dlimit::GeneralizedFunction residual_distribution(const dlimit::SolveRequest& req,
                                                         const dlimit::GeneralizedFunction& x) {
    using namespace dlimit;
    const GeneralizedFunction nd = apply(req.N, distributional_derivative(x));
    GeneralizedFunction r = combine(1.0, nd, -1.0, x);
    r = combine(1.0, r, -1.0, GeneralizedFunction(req.f));
    return combine(1.0, r, -1.0, GeneralizedFunction::delta(0, req.N * req.x0));
}

}  // namespace systems
