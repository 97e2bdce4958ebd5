#include "ness/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>

#include "ness/criticality.hpp"
#include "ness/experiments.hpp"
#include "ness/model_io.hpp"
#include "ness/solver.hpp"

namespace ness::cli {

namespace {

Complex parse_complex(const std::string& text) {
    std::stringstream ss(text);
    std::string re, im;
    if (!std::getline(ss, re, ',')) throw ValidationError("expected 're' or 're,im'");
    double r = 0.0, i = 0.0;
    try {
        r = std::stod(re);
        if (std::getline(ss, im, ',')) i = std::stod(im);
    } catch (const std::exception&) {
        throw ValidationError("cannot parse complex value: " + text);
    }
    return {r, i};
}

CorrelationMatrix steady_state(const LatticeModel& model) {
    if (!model.chain.is_finite())
        throw ValidationError("finite-chain method requested on an infinite model");
    if (model.chain.periodic && model.chain.L > 128) return solve_lyapunov_circulant(model);
    return solve_lyapunov_finite(build_damping_matrices(model));
}

int cmd_model_validate(const std::string& path) {
    const LatticeModel model = load_model(path);
    std::cout << model_to_json(model).dump(2) << "\n";
    return 0;
}

int cmd_correlations(const std::string& model_path, const std::string& method, int dmax,
                     const std::string& out, bool no_meta) {
    const LatticeModel model = load_model(model_path);
    CorrelationProfile profile;
    if (method == "residue") {
        profile = residue_correlations(to_symbol_fraction(model), dmax);
    } else if (method == "quadrature") {
        profile = correlations_quadrature(symbol_evaluator(model), dmax);
    } else if (method == "finite") {
        profile = correlation_profile_finite(steady_state(model), dmax);
    } else {
        throw ValidationError("method must be residue, quadrature or finite");
    }
    CsvOptions opts;
    opts.metadata = !no_meta;
    if (out.empty()) {
        std::cout << "d,re,im\n";
        std::cout.precision(17);
        for (size_t k = 0; k < profile.distances.size(); ++k)
            std::cout << profile.distances[k] << ',' << profile.values[k].real() << ','
                      << profile.values[k].imag() << '\n';
    } else {
        write_profile_csv(out, profile, opts);
    }
    return 0;
}

int cmd_occupation(const std::string& model_path) {
    const LatticeModel model = load_model(model_path);
    double n;
    if (model.chain.is_finite())
        n = occupation(steady_state(model));
    else
        n = occupation(symbol_evaluator(model));
    Json doc{{"occupation", n}};
    std::cout << doc.dump(2) << "\n";
    return 0;
}

int cmd_gap(const std::string& model_path, const std::string& kind) {
    const LatticeModel model = load_model(model_path);
    Json doc;
    if (kind == "symbol") {
        doc["gap"] = model.is_odd_only() ? damping_gap(to_symbol_fraction(model))
                                         : damping_gap_symbol(model);
        doc["kind"] = "symbol";
    } else if (kind == "finite") {
        doc["gap"] = damping_gap_finite(build_damping_matrices(model));
        doc["kind"] = "finite";
    } else {
        throw ValidationError("gap kind must be symbol or finite");
    }
    std::cout << doc.dump(2) << "\n";
    return 0;
}

int cmd_critical_check(const std::string& model_path, const std::string& z0_text) {
    const LatticeModel model = load_model(model_path);
    if (model.generators.size() != 1)
        throw ValidationError("critical check operates on a single generator family");
    const Complex z0 = parse_complex(z0_text);
    const auto [plus, minus] = criticality_conditions(model.generators[0], z0);
    const double tol = Tolerances::get().critical_residual;
    Json doc{{"z0_re", z0.real()},
             {"z0_im", z0.imag()},
             {"residual_z0", std::abs(plus)},
             {"residual_conj", std::abs(minus)},
             {"critical", std::abs(plus) < tol && std::abs(minus) < tol}};
    std::cout << doc.dump(2) << "\n";
    return 0;
}

int cmd_critical_solve(int sites, int order, const std::string& z0_text,
                       const std::vector<std::string>& fixed_specs) {
    const Complex z0 = parse_complex(z0_text);
    std::map<int, Complex> fixed;
    for (const auto& spec : fixed_specs) {
        const auto eq = spec.find('=');
        if (eq == std::string::npos)
            throw ValidationError("fixed coefficient must look like j=re,im");
        fixed[std::stoi(spec.substr(0, eq))] = parse_complex(spec.substr(eq + 1));
    }
    const CriticalSolutionFamily family = solve_critical_parameters(sites, order, z0, fixed);
    std::cout << family_to_json(family).dump(2) << "\n";
    return 0;
}

int cmd_critical_predict(const std::string& model_path) {
    const LatticeModel model = load_model(model_path);
    if (model.generators.size() != 1)
        throw ValidationError("critical predict operates on a single generator family");
    const CriticalityReport report = predict_exponents(model.generators[0]);
    std::cout << report_to_json(report).dump(2) << "\n";
    return 0;
}

int cmd_sweep(const std::string& model_path, int gen, int coeff, const std::string& field,
              double start, double stop, int count, bool linear, double pc,
              const std::string& out, int jobs, bool no_meta) {
    SweepSpec spec;
    spec.model = load_model(model_path);
    spec.generatorIndex = gen;
    spec.coeffIndex = coeff;
    if (field == "nu")
        spec.field = SweepSpec::Field::Nu;
    else if (field == "g")
        spec.field = SweepSpec::Field::G;
    else
        throw ValidationError("sweep field must be nu or g");
    spec.start = start;
    spec.stop = stop;
    spec.count = count;
    spec.log_toward_critical = !linear;
    spec.critical_value = pc;
    const auto points = sweep(spec, jobs);
    CsvOptions opts;
    opts.metadata = !no_meta;
    if (out.empty()) {
        std::cout.precision(17);
        std::cout << "g,xi_inv,gap,root_mod\n";
        for (const auto& pt : points)
            std::cout << pt.parameter << ',' << pt.xi_inverse << ',' << pt.gap << ','
                      << pt.root_modulus << '\n';
    } else {
        write_sweep_csv(out, points, opts);
    }
    return 0;
}

int cmd_fit(const std::string& kind, const std::string& data, double pc, double lambda,
            const std::string& window_text) {
    double lo = kDefaultFitWindowLo, hi = kDefaultFitWindowHi;
    if (!window_text.empty()) {
        std::stringstream ss(window_text);
        std::string a, b;
        if (!std::getline(ss, a, ',') || !std::getline(ss, b, ','))
            throw ValidationError("window must look like lo,hi");
        lo = std::stod(a);
        hi = std::stod(b);
    }
    const auto points = read_sweep_csv(data);
    ExponentFit fit;
    if (kind == "static") {
        fit = fit_static_exponent(points, pc, lo, hi);
    } else if (kind == "dynamical") {
        if (!(lambda > 0.0))
            throw ValidationError("dynamical fit requires --lambda > 0");
        fit = fit_dynamical_exponent(points, pc, lambda, lo, hi);
    } else {
        throw ValidationError("fit kind must be static or dynamical");
    }
    Json doc{{"kind", kind},
             {"exponent", fit.exponent},
             {"intercept", fit.intercept},
             {"standard_error", fit.standard_error},
             {"points_used", fit.points_used},
             {"window_lo", fit.window_lo},
             {"window_hi", fit.window_hi}};
    if (kind == "dynamical") doc["z"] = fit.dynamical_z;
    std::cout << doc.dump(2) << "\n";
    return 0;
}

int cmd_figure(const std::string& id, const std::string& outdir) {
    FigureId fig;
    if (id == "fig2")
        fig = FigureId::TwoSiteReference;
    else if (id == "fig4")
        fig = FigureId::ThreeSiteFamilies;
    else
        throw ValidationError("figure id must be fig2 or fig4");
    const auto files = reproduce_figure_data(fig, outdir);
    Json doc = Json::array();
    for (const auto& f : files) doc.push_back(f.string());
    std::cout << doc.dump(2) << "\n";
    return 0;
}

int cmd_oracle(const std::string& model_path, int L) {
    LatticeModel model = load_model(model_path);
    if (L > 0) model.chain = ChainSpec::finite(L, model.chain.periodic);
    if (!model.chain.is_finite())
        throw ValidationError("oracle needs a finite chain; pass --L");
    const auto oracle = exact_liouvillian_oracle(model);
    const CorrelationMatrix gaussian = steady_state(model);
    const double dev = (oracle.gamma - gaussian.gamma).cwiseAbs().maxCoeff();
    Json doc{{"L", model.chain.L},
             {"kernel_dimension", oracle.kernel_dimension},
             {"max_two_point_deviation", dev},
             {"occupation_oracle", oracle.occupation()},
             {"occupation_gaussian", occupation(gaussian)}};
    std::cout << doc.dump(2) << "\n";
    if (dev > 1e-8)
        throw NumericalError("oracle and Gaussian solver disagree", dev);
    return 0;
}

} // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"steady states and reservoir-induced criticality of free-fermion chains"};
    app.require_subcommand(1);
    bool no_meta = false;
    app.add_flag("--no-meta", no_meta, "suppress metadata comment lines in CSV output");

    std::string model_path, method = "quadrature", out, z0_text = "1", field = "g";
    std::string fit_kind = "static", data_path, window_text, figure_id = "fig2";
    std::string outdir = ".";
    int dmax = 20, sites = 2, order = 1, gen = 0, coeff = 1, count = 25, jobs = 0, oracleL = 0;
    double start = 1e-4, stop = 1e-2, pc = 0.0, lambda = 0.0;
    bool linear = false;
    std::string gap_kind = "symbol";
    std::vector<std::string> fixed_specs;

    auto* model_cmd = app.add_subcommand("model", "model file operations");
    auto* validate_cmd = model_cmd->add_subcommand("validate", "check invariants, echo canonical form");
    validate_cmd->add_option("file", model_path, "model JSON file")->required();

    auto* ness_cmd = app.add_subcommand("ness", "steady-state quantities");
    auto* corr_cmd = ness_cmd->add_subcommand("correlations", "two-point correlation profile");
    corr_cmd->add_option("--model", model_path)->required();
    corr_cmd->add_option("--method", method, "residue|quadrature|finite");
    corr_cmd->add_option("--dmax", dmax);
    corr_cmd->add_option("--out", out, "CSV output path (stdout when omitted)");
    auto* occ_cmd = ness_cmd->add_subcommand("occupation", "mean density per site");
    occ_cmd->add_option("--model", model_path)->required();

    auto* gap_cmd = app.add_subcommand("gap", "damping gap");
    gap_cmd->add_option("--model", model_path)->required();
    gap_cmd->add_option("--kind", gap_kind, "symbol|finite");

    auto* crit_cmd = app.add_subcommand("critical", "criticality analysis");
    auto* check_cmd = crit_cmd->add_subcommand("check", "criticality conditions at z0");
    check_cmd->add_option("--model", model_path)->required();
    check_cmd->add_option("--z0", z0_text, "complex as re,im")->required();
    auto* solve_cmd = crit_cmd->add_subcommand("solve", "solve the critical-parameter equations");
    solve_cmd->add_option("--sites", sites)->required();
    solve_cmd->add_option("--order", order)->required();
    solve_cmd->add_option("--z0", z0_text)->required();
    solve_cmd->add_option("--fixed", fixed_specs, "fixed coefficient j=re,im");
    auto* predict_cmd = crit_cmd->add_subcommand("predict", "predict critical exponents");
    predict_cmd->add_option("--model", model_path)->required();

    auto* sweep_cmd = app.add_subcommand("sweep", "parameter sweep");
    sweep_cmd->add_option("--model", model_path)->required();
    sweep_cmd->add_option("--gen", gen);
    sweep_cmd->add_option("--coeff", coeff);
    sweep_cmd->add_option("--field", field, "nu|g");
    sweep_cmd->add_option("--start", start)->required();
    sweep_cmd->add_option("--stop", stop)->required();
    sweep_cmd->add_option("--count", count);
    sweep_cmd->add_flag("--linear", linear, "linear grid instead of log-toward-critical");
    sweep_cmd->add_option("--pc", pc, "critical value for log grids");
    sweep_cmd->add_option("--out", out);
    sweep_cmd->add_option("--jobs", jobs, "worker count (0 = hardware parallelism)");

    auto* fit_cmd = app.add_subcommand("fit", "power-law exponent fit on sweep data");
    fit_cmd->add_option("--kind", fit_kind, "static|dynamical");
    fit_cmd->add_option("--data", data_path)->required();
    fit_cmd->add_option("--pc", pc)->required();
    fit_cmd->add_option("--lambda", lambda, "static exponent (dynamical fits)");
    fit_cmd->add_option("--window", window_text, "lo,hi in |p - pc|");

    auto* figure_cmd = app.add_subcommand("figure", "emit reference data bundles");
    figure_cmd->add_option("--id", figure_id, "fig2|fig4");
    figure_cmd->add_option("--outdir", outdir);

    auto* oracle_cmd = app.add_subcommand("oracle", "exact diagonalization cross-check");
    oracle_cmd->add_option("--model", model_path)->required();
    oracle_cmd->add_option("--L", oracleL, "override chain length (<= 4)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        std::cerr << Json{{"error", "usage"}, {"message", e.what()}}.dump() << "\n";
        return 2;
    }

    try {
        if (validate_cmd->parsed()) return cmd_model_validate(model_path);
        if (corr_cmd->parsed()) return cmd_correlations(model_path, method, dmax, out, no_meta);
        if (occ_cmd->parsed()) return cmd_occupation(model_path);
        if (gap_cmd->parsed()) return cmd_gap(model_path, gap_kind);
        if (check_cmd->parsed()) return cmd_critical_check(model_path, z0_text);
        if (solve_cmd->parsed()) return cmd_critical_solve(sites, order, z0_text, fixed_specs);
        if (predict_cmd->parsed()) return cmd_critical_predict(model_path);
        if (sweep_cmd->parsed())
            return cmd_sweep(model_path, gen, coeff, field, start, stop, count, linear, pc,
                             out, jobs, no_meta);
        if (fit_cmd->parsed()) return cmd_fit(fit_kind, data_path, pc, lambda, window_text);
        if (figure_cmd->parsed()) return cmd_figure(figure_id, outdir);
        if (oracle_cmd->parsed()) return cmd_oracle(model_path, oracleL);
        std::cerr << Json{{"error", "usage"}, {"message", "no subcommand"}}.dump() << "\n";
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << Json{{"error", e.kind()}, {"message", e.what()}}.dump() << "\n";
        return 2;
    } catch (const CriticalityError& e) {
        std::cerr << Json{{"error", e.kind()},
                          {"message", e.what()},
                          {"report", report_to_json(e.report)}}
                         .dump()
                  << "\n";
        return 3;
    } catch (const NumericalError& e) {
        std::cerr << Json{{"error", e.kind()},
                          {"message", e.what()},
                          {"achieved_error", e.achieved_error}}
                         .dump()
                  << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << Json{{"error", e.kind()}, {"message", e.what()}}.dump() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << Json{{"error", "internal"}, {"message", e.what()}}.dump() << "\n";
        return 1;
    }
}

} // namespace ness::cli
