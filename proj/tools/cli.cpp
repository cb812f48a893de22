#include "cli.hpp"

#include "dlimit/errors.hpp"
#include "dlimit/io.hpp"
#include "dlimit/pencil.hpp"
#include "dlimit/perturbed.hpp"
#include "dlimit/singular_solver.hpp"
#include "dlimit/study.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <optional>
#include <sstream>

namespace dlimit {
namespace {

constexpr const char* kGrammar = R"grammar(subcommands:
  solve       --config sys.json                     exact distributional solution
  perturb     --config perturb.json                 grid CSV of the perturbed solution x_i
  reduce      --config pencil.json                  Weierstrass reduction of E x' = A x + g
  pair        --config pair.json                    one pairing <x, lambda>
  converge    --config study.json [--out r.csv]     convergence study report
  uniqueness  --config study.json                   limit agreement across families
  localize    --config loc.json                     <x_i, lambda> against the extended forcing
common flags:
  --config <path> --out <path> --format {json,csv}
  --quad-abs <x> --quad-rel <x> --max-subdiv <n> --k-max <k> --verbose
signal grammar:
  vector  = "[" expr { "," expr } "]"
  expr    = term { ("+" | "-") term }
  term    = factor { "*" factor }
  factor  = "-" factor | primary [ "^" uint ]
  primary = number | "t" | ("sin" | "cos" | "exp") "(" expr ")" | "(" expr ")"
)grammar";

struct Options {
    std::string config;
    std::string out;
    std::string format;
    std::optional<double> quad_abs;
    std::optional<double> quad_rel;
    std::optional<int> max_subdiv;
    std::optional<int> k_max;
    bool verbose = false;
};

void add_common(CLI::App* sub, Options& o) {
    sub->add_option("--config", o.config, "JSON configuration file")->required();
    sub->add_option("--out", o.out, "output file (default: standard output)");
    sub->add_option("--format", o.format, "output format")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--quad-abs", o.quad_abs, "quadrature absolute tolerance");
    sub->add_option("--quad-rel", o.quad_rel, "quadrature relative tolerance");
    sub->add_option("--max-subdiv", o.max_subdiv, "quadrature interval cap");
    sub->add_option("--k-max", o.k_max, "largest power k in the layer integral table");
    sub->add_flag("--verbose", o.verbose, "progress and warnings on standard error");
}

QuadratureSpec merged_quad(const Json& cfg, const Options& o) {
    QuadratureSpec q = cfg.contains("quad") ? quad_from_json(cfg["quad"]) : QuadratureSpec{};
    if (o.quad_abs) q.abs_tol = *o.quad_abs;
    if (o.quad_rel) q.rel_tol = *o.quad_rel;
    if (o.max_subdiv) q.max_subdivisions = *o.max_subdiv;
    q.validate();
    return q;
}

class Emitter {
public:
    Emitter(const Options& o, std::ostream& fallback) : fallback_(fallback) {
        if (!o.out.empty()) {
            file_.open(o.out);
            if (!file_) throw InputError("cannot write '" + o.out + "'");
        }
    }
    std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : fallback_; }
    bool to_file() const { return file_.is_open(); }

private:
    std::ofstream file_;
    std::ostream& fallback_;
};

const Json& section(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw InputError(std::string("configuration lacks '") + key + "'");
    return j[key];
}

int get_int(const Json& j, const char* key) {
    const auto& v = section(j, key);
    if (!v.is_number_integer()) throw InputError(std::string("'") + key + "' must be an integer");
    return v.get<int>();
}

double get_double(const Json& j, const char* key) {
    const auto& v = section(j, key);
    if (!v.is_number()) throw InputError(std::string("'") + key + "' must be a number");
    return v.get<double>();
}

// A config may hold the system at top level or under "system".
const Json& system_of(const Json& cfg) { return cfg.contains("system") ? cfg["system"] : cfg; }

int cmd_solve(const Json& cfg, const Options& o, std::ostream& out, std::ostream& err) {
    const Json& sys = system_of(cfg);
    Emitter emit(o, out);
    std::ostream& note = emit.to_file() ? out : err;
    if (is_pencil_json(sys)) {
        const PencilInput in = pencil_input_from_json(sys);
        const auto sol = solve_descriptor(in.pencil, in.x0, in.g, in.tol);
        Json impulses = Json::array();
        for (const auto& imp : sol.impulses()) impulses.push_back({{"order", imp.order}, {"coeff", to_json(imp.coeff)}});
        const Json doc = {{"reduced", to_json(sol.reduced())},
                          {"fast_solution", to_json(sol.fast())},
                          {"state_impulses", impulses},
                          {"q", sol.reduced().index()}};
        emit.stream() << doc.dump(2) << "\n";
        note << solution_summary(sol.fast(), sol.reduced().index());
        return kExitOk;
    }
    const SolveRequest req = solve_request_from_json(sys);
    const int q = req.certify().index;
    const auto sol = solve_singular(req);
    const Json doc = {{"q", q},
                      {"solution", to_json(sol)},
                      {"consistent", consistent_initial_set_check(req.N, req.f, req.x0)}};
    emit.stream() << doc.dump(2) << "\n";
    note << solution_summary(sol, q);
    return kExitOk;
}

std::vector<double> time_grid(const Json& cfg) {
    std::vector<double> ts;
    if (cfg.contains("times")) {
        for (const auto& t : cfg["times"]) {
            if (!t.is_number()) throw InputError("times must be numbers");
            ts.push_back(t.get<double>());
        }
        return ts;
    }
    const Json& g = section(cfg, "grid");
    const double a = get_double(g, "start");
    const double b = get_double(g, "stop");
    const int count = get_int(g, "count");
    if (count < 1 || !(b >= a)) throw InputError("grid needs count >= 1 and stop >= start");
    for (int k = 0; k < count; ++k) ts.push_back(count == 1 ? a : a + (b - a) * k / (count - 1));
    return ts;
}

int cmd_perturb(const Json& cfg, const Options& o, std::ostream& out, std::ostream&) {
    const SolveRequest req = solve_request_from_json(section(cfg, "system"));
    const QuadratureSpec quad = merged_quad(cfg, o);
    const Matrix n_i = cfg.contains("matrix") ? matrix_from_json(cfg["matrix"], "matrix")
                                              : family_from_json(section(cfg, "family"), req.N).realize(get_int(cfg, "i"));
    const PerturbedSystem sys(n_i);
    Emitter emit(o, out);
    std::ostream& os = emit.stream();
    if (o.format == "json") {
        Json rows = Json::array();
        for (double t : time_grid(cfg)) rows.push_back({{"t", t}, {"x", to_json(sys.solve(req.x0, req.f, t, quad).value)}});
        os << Json{{"layer_width", sys.layer_width()}, {"rows", rows}}.dump(2) << "\n";
        return kExitOk;
    }
    os << "t";
    for (int k = 1; k <= sys.dimension(); ++k) os << ",x" << k;
    os << "\n";
    for (double t : time_grid(cfg)) {
        const Vector x = sys.solve(req.x0, req.f, t, quad).value;
        os << format_double(t);
        for (Eigen::Index k = 0; k < x.size(); ++k) os << ',' << format_double(x(k));
        os << "\n";
    }
    return kExitOk;
}

int cmd_reduce(const Json& cfg, const Options& o, std::ostream& out, std::ostream&) {
    const PencilInput in = pencil_input_from_json(system_of(cfg));
    const ReducedSystem r = weierstrass_reduce(in.pencil, in.tol);
    Emitter emit(o, out);
    emit.stream() << to_json(r).dump(2) << "\n";
    return kExitOk;
}

int cmd_pair(const Json& cfg, const Options& o, std::ostream& out, std::ostream&) {
    const QuadratureSpec quad = merged_quad(cfg, o);
    const TestFunction lambda = test_function_from_json(section(cfg, "test_function"), "lambda");
    Json doc;
    if (cfg.contains("distribution")) {
        const auto w = generalized_from_json(cfg["distribution"]);
        const auto r = pair(w, lambda, quad);
        doc = {{"value", r.value}, {"integral_part", r.integral_part}, {"impulse_part", r.impulse_part},
               {"quadrature_error_estimate", r.quadrature_error_estimate}};
    } else {
        const SolveRequest req = solve_request_from_json(section(cfg, "system"));
        const auto r = pair(solve_singular(req), lambda, quad);
        doc = {{"value", r.value}, {"integral_part", r.integral_part}, {"impulse_part", r.impulse_part},
               {"quadrature_error_estimate", r.quadrature_error_estimate}};
        if (cfg.contains("family")) {
            const int i = get_int(cfg, "i");
            const PerturbedSystem sys(family_from_json(cfg["family"], req.N).realize(i));
            const auto p = sys.pair(req.x0, req.f, lambda, quad);
            doc["perturbed"] = {{"i", i}, {"value", p.value}, {"error", p.error}};
        }
    }
    Emitter emit(o, out);
    emit.stream() << doc.dump(2) << "\n";
    return kExitOk;
}

StudyConfig study_from(const Json& cfg, const Options& o) {
    StudyConfig sc = study_config_from_json(cfg);
    sc.quad = merged_quad(cfg, o);
    if (o.k_max) sc.k_search_max = *o.k_max;
    return sc;
}

int cmd_converge(const Json& cfg, const Options& o, std::ostream& out, std::ostream& err) {
    const StudyConfig sc = study_from(cfg, o);
    if (o.verbose) err << "study: " << sc.indices.size() << " indices, family " << sc.families.front().describe() << "\n";
    const ConvergenceReport rep = run_study(sc);
    std::string format = o.format;
    if (format.empty()) format = o.out.size() >= 4 && o.out.substr(o.out.size() - 4) == ".csv" ? "csv" : "json";
    Emitter emit(o, out);
    if (format == "csv") {
        write_report_csv(emit.stream(), rep);
    } else {
        emit.stream() << to_json(rep).dump(2) << "\n";
    }
    if (o.verbose || emit.to_file()) {
        std::ostream& note = emit.to_file() ? out : err;
        note << "verdict: " << verdict_name(rep.verdict) << " (threshold " << format_double(rep.threshold) << ")\n";
        for (const auto& f : rep.rates) {
            if (f.points >= 2) note << "rate " << f.testfn_id << ": " << format_double(f.slope) << "\n";
        }
        for (const auto& w : rep.warnings) note << "warning: " << w << "\n";
    }
    return kExitOk;
}

int cmd_uniqueness(const Json& cfg, const Options& o, std::ostream& out, std::ostream&) {
    const UniquenessReport rep = uniqueness_study(study_from(cfg, o));
    Emitter emit(o, out);
    emit.stream() << to_json(rep).dump(2) << "\n";
    return kExitOk;
}

int cmd_localize(const Json& cfg, const Options& o, std::ostream& out, std::ostream&) {
    const QuadratureSpec quad = merged_quad(cfg, o);
    const SolveRequest req = solve_request_from_json(section(cfg, "system"));
    const auto family = family_from_json(section(cfg, "family"), req.N);
    const TestFunction lambda = test_function_from_json(section(cfg, "test_function"), "lambda");
    const double d = localization_check(req, family, get_int(cfg, "i"), get_double(cfg, "b"), lambda, quad);
    Emitter emit(o, out);
    emit.stream() << Json{{"difference", d}, {"bound", 2.0 * quad.abs_tol}, {"within_bound", d <= 2.0 * quad.abs_tol}}.dump(2)
                  << "\n";
    return kExitOk;
}

}  // namespace

int cli_main(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"dlimit: distributional limits of perturbed singular linear systems"};
    app.require_subcommand(1);
    Options o;
    struct Entry {
        const char* name;
        const char* help;
        int (*run)(const Json&, const Options&, std::ostream&, std::ostream&);
        CLI::App* sub = nullptr;
    };
    Entry entries[] = {
        {"solve", "exact distributional solution of N x' = x + f or a pencil system", cmd_solve},
        {"perturb", "perturbed solution x_i on a time grid (CSV)", cmd_perturb},
        {"reduce", "Weierstrass reduction of a regular pencil", cmd_reduce},
        {"pair", "pairing of a solution with a test function", cmd_pair},
        {"converge", "convergence study report", cmd_converge},
        {"uniqueness", "agreement of limits across perturbation families", cmd_uniqueness},
        {"localize", "localization check against the Hermite-extended forcing", cmd_localize},
    };
    for (auto& e : entries) {
        e.sub = app.add_subcommand(e.name, e.help);
        add_common(e.sub, o);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help() << "\n" << kGrammar;
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n\n" << kGrammar;
        return kExitInput;
    }

    try {
        const Json cfg = load_json_file(o.config);
        for (auto& e : entries) {
            if (e.sub->parsed()) return e.run(cfg, o, out, err);
        }
        err << kGrammar;
        return kExitInput;
    } catch (const InputError& e) {
        err << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const NumericError& e) {
        err << "numeric error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const Json::exception& e) {
        err << "input error: " << e.what() << "\n";
        return kExitInput;
    }
}

}  // namespace dlimit
