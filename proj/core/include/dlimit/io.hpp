#pragma once

#include "dlimit/distribution.hpp"
#include "dlimit/pencil.hpp"
#include "dlimit/singular_solver.hpp"
#include "dlimit/study.hpp"

#include <nlohmann/json.hpp>

#include <iosfwd>
#include <string>

namespace dlimit {

using Json = nlohmann::json;

/// Reads and parses a JSON file. Throws InputError on I/O or syntax errors.
Json load_json_file(const std::string& path);

Json to_json(const Matrix& m);
Json to_json(const Vector& v);
Json to_json(const PiecewiseSignal& s);
Json to_json(const GeneralizedFunction& w);
Json to_json(const TestFunction& lambda);
Json to_json(const NilpotencyCert& cert);
Json to_json(const ReducedSystem& r);
Json to_json(const ConvergenceReport& rep);
Json to_json(const UniquenessReport& rep);
Json to_json(const QuadratureSpec& quad);

Matrix matrix_from_json(const Json& j, const char* what);
Vector vector_from_json(const Json& j, const char* what);
/// Either a signal string "[...]" or {"breakpoints", "pieces", "smoothness"}.
PiecewiseSignal signal_from_json(const Json& j, int n = -1);
GeneralizedFunction generalized_from_json(const Json& j);
TestFunction test_function_from_json(const Json& j, const std::string& default_id = {});
QuadratureSpec quad_from_json(const Json& j);
/// {"kind": "shift" | "scaled_shift" | "custom", "c": ..., "members": [{"i", "matrix"}]}.
PerturbationFamily family_from_json(const Json& j, const Matrix& base);

/// {"N", "x0", "f", "tol"}; f defaults to zero forcing.
SolveRequest solve_request_from_json(const Json& j);

struct PencilInput {
    Pencil pencil;
    Vector x0;
    PiecewiseSignal g;
    double tol = kDefaultPencilTol;
};
/// {"E", "A", "g", "x0", "tol"}.
PencilInput pencil_input_from_json(const Json& j);

/// True when the object describes a pencil ("E" and "A") rather than a
/// reduced system ("N").
bool is_pencil_json(const Json& j);

/// {"system", "family" | "families", "indices", "bank", "quad", "k_max", "threads"}.
/// A pencil system is reduced first and the study runs on its fast part.
StudyConfig study_config_from_json(const Json& j);

/// Human-readable description: index, impulse orders, coefficient norms.
std::string solution_summary(const GeneralizedFunction& w, int q);

/// Columns i, testfn_id, pairing_perturbed, pairing_limit, abs_error,
/// quad_err_estimate; numbers printed with %.17g.
void write_report_csv(std::ostream& os, const ConvergenceReport& rep);

std::string format_double(double x);

}  // namespace dlimit
