#include "dlimit/io.hpp"

#include "dlimit/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

namespace dlimit {
namespace {

const Json& require(const Json& j, const char* key) {
    if (!j.is_object()) throw InputError(std::string("expected a JSON object holding '") + key + "'");
    const auto it = j.find(key);
    if (it == j.end()) throw InputError(std::string("missing key '") + key + "'");
    return *it;
}

double number(const Json& j, const char* what) {
    if (!j.is_number()) throw InputError(std::string(what) + " must be a number");
    return j.get<double>();
}

int integer(const Json& j, const char* what) {
    if (!j.is_number_integer()) throw InputError(std::string(what) + " must be an integer");
    return j.get<int>();
}

Json finite_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

}  // namespace

Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw InputError("invalid JSON in '" + path + "': " + e.what());
    }
}

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

Json to_json(const Matrix& m) {
    Json out = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        out.push_back(std::move(row));
    }
    return out;
}

Json to_json(const Vector& v) {
    Json out = Json::array();
    for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(v(k));
    return out;
}

Json to_json(const PiecewiseSignal& s) {
    if (!s.has_breakpoints()) return s.pieces().front().to_string();
    Json pieces = Json::array();
    for (const auto& p : s.pieces()) pieces.push_back(p.to_string());
    return {{"breakpoints", s.breakpoints()}, {"pieces", pieces}, {"smoothness", s.smoothness()}};
}

Json to_json(const GeneralizedFunction& w) {
    Json imps = Json::array();
    for (const auto& imp : w.impulses()) imps.push_back({{"order", imp.order}, {"coeff", to_json(imp.coeff)}});
    return {{"dimension", w.dimension()}, {"smooth", to_json(w.smooth())}, {"impulses", imps}};
}

Json to_json(const TestFunction& lambda) {
    Json out = {{"center", lambda.center()},
                {"radius", lambda.radius()},
                {"direction", to_json(lambda.direction())},
                {"poly", lambda.modulation()}};
    if (!lambda.id().empty()) out["id"] = lambda.id();
    return out;
}

Json to_json(const NilpotencyCert& cert) {
    return {{"index", cert.index}, {"residual", cert.residual}, {"tol", cert.tol}};
}

Json to_json(const ReducedSystem& r) {
    Json slow_eigs = Json::array();
    if (r.slow_dim > 0) {
        for (const auto& ev : eigenvalues(r.J)) slow_eigs.push_back({ev.real(), ev.imag()});
    }
    return {{"shift", r.shift},
            {"T", to_json(r.T)},
            {"condition", finite_or_null(r.condition)},
            {"block_residual", r.block_residual},
            {"slow", {{"dimension", r.slow_dim}, {"J", to_json(r.J)}, {"forcing", to_json(r.slow_forcing)},
                      {"eigenvalues", slow_eigs}}},
            {"fast", {{"dimension", r.fast_dim}, {"M", to_json(r.M)}, {"forcing", to_json(r.fast_forcing)},
                      {"index", r.fast_cert.index}, {"certificate", to_json(r.fast_cert)}}}};
}

Json to_json(const QuadratureSpec& quad) {
    return {{"abs_tol", quad.abs_tol}, {"rel_tol", quad.rel_tol}, {"max_subdivisions", quad.max_subdivisions}};
}

Json to_json(const ConvergenceReport& rep) {
    Json rows = Json::array();
    for (const auto& r : rep.rows) {
        Json row = {{"i", r.i},
                    {"testfn_id", r.testfn_id},
                    {"pairing_perturbed", finite_or_null(r.pairing_perturbed)},
                    {"pairing_limit", finite_or_null(r.pairing_limit)},
                    {"abs_error", finite_or_null(r.abs_error)},
                    {"quad_err_estimate", finite_or_null(r.quad_err_estimate)}};
        if (r.failed) {
            row["failed"] = true;
            row["failure"] = r.failure;
        }
        rows.push_back(std::move(row));
    }
    Json rates = Json::array();
    for (const auto& f : rep.rates) {
        rates.push_back({{"testfn_id", f.testfn_id},
                         {"slope", f.points >= 2 ? Json(f.slope) : Json(nullptr)},
                         {"points", f.points}});
    }
    Json bounded = Json::array();
    for (const auto& b : rep.boundedness) {
        Json values = Json::array();
        for (const auto& li : b.values) {
            values.push_back(li.divergent ? Json("divergent")
                                          : Json{{"value", li.value}, {"error", li.error}});
        }
        bounded.push_back({{"k", b.k},
                           {"values", values},
                           {"divergent", b.divergent},
                           {"ratio", finite_or_null(b.ratio)},
                           {"bounded", b.bounded}});
    }
    return {{"family", rep.family},
            {"nilpotency_index", rep.nilpotency_index},
            {"indices", rep.indices},
            {"rows", rows},
            {"rates", rates},
            {"boundedness", bounded},
            {"bounded_k", rep.bounded_k ? Json(*rep.bounded_k) : Json(nullptr)},
            {"verdict", verdict_name(rep.verdict)},
            {"threshold", rep.threshold},
            {"warnings", rep.warnings}};
}

Json to_json(const UniquenessReport& rep) {
    Json studies = Json::array();
    for (const auto& s : rep.studies) studies.push_back(to_json(s));
    Json rows = Json::array();
    for (const auto& a : rep.agreement) {
        rows.push_back({{"testfn_id", a.testfn_id},
                        {"family_a", a.family_a},
                        {"family_b", a.family_b},
                        {"pairing_a", a.pairing_a},
                        {"pairing_b", a.pairing_b},
                        {"difference", a.difference},
                        {"tolerance", a.tolerance},
                        {"agree", a.agree}});
    }
    return {{"studies", studies}, {"agreement", rows}, {"all_agree", rep.all_agree}};
}

// ---------------------------------------------------------------------------

Matrix matrix_from_json(const Json& j, const char* what) {
    if (!j.is_array() || j.empty()) throw InputError(std::string(what) + " must be a non-empty array of rows");
    const auto rows = static_cast<Eigen::Index>(j.size());
    if (!j.front().is_array()) throw InputError(std::string(what) + " rows must be arrays");
    const auto cols = static_cast<Eigen::Index>(j.front().size());
    Matrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const auto& row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
            throw DimensionMismatch(std::string(what) + " has rows of different lengths");
        }
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = number(row[static_cast<std::size_t>(c)], what);
    }
    return m;
}

Vector vector_from_json(const Json& j, const char* what) {
    if (!j.is_array()) throw InputError(std::string(what) + " must be an array");
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t k = 0; k < j.size(); ++k) v(static_cast<Eigen::Index>(k)) = number(j[k], what);
    return v;
}

PiecewiseSignal signal_from_json(const Json& j, int n) {
    if (j.is_string()) return parse_signal(j.get<std::string>(), n);
    if (!j.is_object()) throw InputError("a signal must be a string or a piecewise object");
    const auto& bps = require(j, "breakpoints");
    const auto& pcs = require(j, "pieces");
    if (!bps.is_array() || !pcs.is_array()) throw InputError("breakpoints and pieces must be arrays");
    std::vector<double> breakpoints;
    for (const auto& b : bps) breakpoints.push_back(number(b, "breakpoint"));
    std::vector<VectorSignal> pieces;
    for (const auto& p : pcs) {
        if (!p.is_string()) throw InputError("signal pieces must be strings");
        pieces.push_back(parse_signal(p.get<std::string>(), n < 0 && !pieces.empty() ? pieces.front().dimension() : n));
    }
    const int smooth = j.contains("smoothness") ? integer(j["smoothness"], "smoothness") : -1;
    return PiecewiseSignal(std::move(breakpoints), std::move(pieces), smooth);
}

GeneralizedFunction generalized_from_json(const Json& j) {
    const int n = integer(require(j, "dimension"), "dimension");
    PiecewiseSignal smooth = signal_from_json(require(j, "smooth"), n);
    std::vector<Impulse> imps;
    if (j.contains("impulses")) {
        for (const auto& imp : j["impulses"]) {
            imps.push_back({integer(require(imp, "order"), "impulse order"), vector_from_json(require(imp, "coeff"), "coeff")});
        }
    }
    return GeneralizedFunction(std::move(smooth), std::move(imps));
}

TestFunction test_function_from_json(const Json& j, const std::string& default_id) {
    std::vector<double> poly;
    if (j.contains("poly")) {
        for (const auto& c : j["poly"]) poly.push_back(number(c, "poly coefficient"));
    }
    const std::string id = j.contains("id") ? j["id"].get<std::string>() : default_id;
    return TestFunction(number(require(j, "center"), "center"), number(require(j, "radius"), "radius"),
                        vector_from_json(require(j, "direction"), "direction"), std::move(poly), id);
}

QuadratureSpec quad_from_json(const Json& j) {
    QuadratureSpec q;
    if (j.is_null()) return q;
    if (j.contains("abs_tol")) q.abs_tol = number(j["abs_tol"], "abs_tol");
    if (j.contains("rel_tol")) q.rel_tol = number(j["rel_tol"], "rel_tol");
    if (j.contains("max_subdivisions")) q.max_subdivisions = integer(j["max_subdivisions"], "max_subdivisions");
    if (j.contains("breakpoints")) {
        for (const auto& b : j["breakpoints"]) q.extra_breakpoints.push_back(number(b, "breakpoint"));
    }
    q.validate();
    return q;
}

PerturbationFamily family_from_json(const Json& j, const Matrix& base) {
    const auto& kind = require(j, "kind");
    if (!kind.is_string()) throw InputError("family kind must be a string");
    const auto name = kind.get<std::string>();
    if (name == "shift") return PerturbationFamily::shift(base);
    if (name == "scaled_shift") return PerturbationFamily::scaled_shift(base, number(require(j, "c"), "c"));
    if (name == "custom") {
        std::map<int, Matrix> members;
        for (const auto& m : require(j, "members")) {
            members[integer(require(m, "i"), "member index")] = matrix_from_json(require(m, "matrix"), "member matrix");
        }
        return PerturbationFamily::custom(base, std::move(members));
    }
    throw InputError("unknown family kind '" + name + "' (expected shift, scaled_shift or custom)");
}

SolveRequest solve_request_from_json(const Json& j) {
    SolveRequest req;
    req.N = matrix_from_json(require(j, "N"), "N");
    const int n = static_cast<int>(req.N.rows());
    req.x0 = j.contains("x0") ? vector_from_json(j["x0"], "x0") : Vector::Zero(n);
    req.f = j.contains("f") ? signal_from_json(j["f"], n) : PiecewiseSignal::zero(n);
    if (j.contains("tol")) req.tol = number(j["tol"], "tol");
    req.certify();
    return req;
}

bool is_pencil_json(const Json& j) { return j.is_object() && j.contains("E") && j.contains("A"); }

PencilInput pencil_input_from_json(const Json& j) {
    PencilInput in;
    in.pencil.E = matrix_from_json(require(j, "E"), "E");
    in.pencil.A = matrix_from_json(require(j, "A"), "A");
    in.pencil.validate();
    const int n = in.pencil.dimension();
    in.x0 = j.contains("x0") ? vector_from_json(j["x0"], "x0") : Vector::Zero(n);
    in.g = j.contains("g") ? signal_from_json(j["g"], n) : PiecewiseSignal::zero(n);
    if (j.contains("tol")) in.tol = number(j["tol"], "tol");
    if (in.x0.size() != n) throw DimensionMismatch("x0 dimension differs from the pencil");
    return in;
}

StudyConfig study_config_from_json(const Json& j) {
    StudyConfig cfg;
    const auto& sys = require(j, "system");
    if (is_pencil_json(sys)) {
        const PencilInput in = pencil_input_from_json(sys);
        const ReducedSystem r = weierstrass_reduce(in.pencil, in.tol);
        if (r.fast_dim == 0) throw InputError("pencil has no fast part to study");
        cfg.system.N = r.M;
        cfg.system.x0 = r.fast_rows_of_inverse() * in.x0;
        cfg.system.f = in.g.apply(r.fast_forcing);
        cfg.system.tol = in.tol;
    } else {
        cfg.system = solve_request_from_json(sys);
    }
    if (j.contains("families")) {
        for (const auto& f : j["families"]) cfg.families.push_back(family_from_json(f, cfg.system.N));
    } else {
        cfg.families.push_back(family_from_json(require(j, "family"), cfg.system.N));
    }
    for (const auto& i : require(j, "indices")) cfg.indices.push_back(integer(i, "index"));
    if (j.contains("bank")) {
        const auto& bank = j["bank"];
        if (bank.is_string()) {
            if (bank.get<std::string>() != "standard") throw InputError("bank must be \"standard\" or a list");
        } else if (bank.is_array()) {
            for (std::size_t k = 0; k < bank.size(); ++k) {
                cfg.bank.push_back(test_function_from_json(bank[k], "tf" + std::to_string(k)));
            }
        } else {
            throw InputError("bank must be \"standard\" or a list");
        }
    }
    if (j.contains("quad")) cfg.quad = quad_from_json(j["quad"]);
    if (j.contains("k_max")) cfg.k_search_max = integer(j["k_max"], "k_max");
    if (j.contains("threads")) cfg.threads = integer(j["threads"], "threads");
    cfg.validate();
    return cfg;
}

std::string solution_summary(const GeneralizedFunction& w, int q) {
    std::ostringstream os;
    os << "nilpotency index q = " << q << "\n";
    os << "smooth part: " << w.smooth().pieces().front().to_string();
    if (w.smooth().has_breakpoints()) os << " (first of " << w.smooth().pieces().size() << " pieces)";
    os << "\n";
    if (w.impulses().empty()) {
        os << "impulses: none\n";
    } else {
        for (const auto& imp : w.impulses()) {
            os << "impulse delta^(" << imp.order << "): |coeff| = " << format_double(imp.coeff.norm()) << "\n";
        }
    }
    return os.str();
}

void write_report_csv(std::ostream& os, const ConvergenceReport& rep) {
    os << "i,testfn_id,pairing_perturbed,pairing_limit,abs_error,quad_err_estimate\n";
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (const auto& r : rep.rows) {
        os << r.i << ',' << r.testfn_id << ',' << format_double(r.failed ? nan : r.pairing_perturbed) << ','
           << format_double(r.pairing_limit) << ',' << format_double(r.failed ? nan : r.abs_error) << ','
           << format_double(r.failed ? nan : r.quad_err_estimate) << '\n';
    }
}

}  // namespace dlimit
