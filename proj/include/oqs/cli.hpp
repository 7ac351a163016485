// cli.hpp — Command-line front end: model loading, run orchestration across
// the solvers, deterministic seeding, CSV emission.
//
// Exit codes: 0 success, 1 usage, 2 parse/validation, 3 numerical failure.

#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oqs/csv.hpp"
#include "oqs/hnm.hpp"
#include "oqs/lindblad.hpp"
#include "oqs/mcwf.hpp"
#include "oqs/micro.hpp"
#include "oqs/model_io.hpp"
#include "oqs/qops.hpp"
#include "oqs/tcl.hpp"

namespace oqs::cli {

namespace detail {

inline std::vector<double> make_time_grid(double t_max, int steps) {
    if (!(t_max > 0.0)) throw ValidationError("t-max must be positive");
    if (steps < 1) throw ValidationError("steps must be >= 1");
    std::vector<double> grid;
    grid.reserve(steps + 1);
    for (int i = 0; i <= steps; ++i) grid.push_back(t_max * i / steps);
    return grid;
}

inline std::vector<Matrix> parse_observables(const std::vector<std::string>& exprs) {
    std::vector<Matrix> out;
    for (const auto& e : exprs) {
        // observables must be Hermitian; HermitianOperator enforces the tolerance
        out.push_back(HermitianOperator(parse_operator_expr(e)).matrix());
    }
    return out;
}

// Output stream that is either stdout or a freshly truncated file.
class OutputTarget {
public:
    explicit OutputTarget(const std::string& path) {
        if (!path.empty()) {
            file_.open(path, std::ios::binary | std::ios::trunc);
            if (!file_) throw ValidationError("cannot open output file '" + path + "'");
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

inline Vector initial_state_vector(const ParsedModel& pm, const std::string& override_expr) {
    if (!override_expr.empty()) return vector_from_value(ConfigValue(override_expr), "--psi0");
    if (pm.psi0) return *pm.psi0;
    throw ValidationError("no initial state: give --psi0 or set psi0 in the model file");
}

inline DensityMatrix initial_density(const ParsedModel& pm, const std::string& override_expr) {
    if (!override_expr.empty())
        return DensityMatrix(matrix_from_value(ConfigValue(override_expr), "--rho0"));
    if (pm.rho0) return DensityMatrix(*pm.rho0);
    if (pm.psi0) return DensityMatrix::pure(StateVector::normalized(*pm.psi0));
    throw ValidationError("no initial state: give --rho0 or set rho0/psi0 in the model file");
}

inline void print_warnings(const ParsedModel& pm) {
    for (const auto& w : pm.warnings) std::cerr << "warning: " << w << "\n";
}

struct EvolveArgs {
    std::string model_path;
    std::string rho0_expr;
    double t_max = 0.0;
    int steps = 0;
    std::vector<std::string> observables;
    std::string output;
    bool flow_diagnostic = false;
};

inline void emit_deterministic_series(std::ostream& out, const std::vector<double>& grid,
                                      const std::vector<Matrix>& states,
                                      const std::vector<std::string>& obs_names,
                                      const std::vector<Matrix>& obs) {
    std::vector<std::string> header{"t"};
    for (const auto& name : obs_names) header.push_back(name);
    write_csv_header(out, header);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        std::vector<double> row{grid[k]};
        for (const auto& a : obs) row.push_back((a * states[k]).trace().real());
        write_csv_row(out, row);
    }
}

inline int run_evolve_exact(const EvolveArgs& args) {
    const auto pm = parse_model_file(args.model_path);
    print_warnings(pm);
    const auto& model = pm.total_system();
    const DensityMatrix rho0 = initial_density(pm, args.rho0_expr);
    const auto grid = make_time_grid(args.t_max, args.steps);
    const auto obs = parse_observables(args.observables);

    ExactPropagator prop(model);
    std::vector<Matrix> states;
    states.reserve(grid.size());
    for (double t : grid) states.push_back(prop.reduced_state(rho0, t).matrix());

    OutputTarget target(args.output);
    emit_deterministic_series(target.stream(), grid, states, args.observables, obs);
    return 0;
}

inline int run_evolve_lindblad(const EvolveArgs& args) {
    const auto pm = parse_model_file(args.model_path);
    print_warnings(pm);
    const auto& model = pm.lindblad();
    const DensityMatrix rho0 = initial_density(pm, args.rho0_expr);
    const auto grid = make_time_grid(args.t_max, args.steps);
    const auto obs = parse_observables(args.observables);

    const auto states = integrate_master(model, rho0, grid);
    std::vector<Matrix> raw;
    raw.reserve(states.size());
    for (const auto& s : states) raw.push_back(s.matrix());

    OutputTarget target(args.output);
    emit_deterministic_series(target.stream(), grid, raw, args.observables, obs);
    return 0;
}

inline int run_evolve_tcl(const EvolveArgs& args) {
    const auto pm = parse_model_file(args.model_path);
    print_warnings(pm);
    const auto& model = pm.timelocal();
    const DensityMatrix rho0 = initial_density(pm, args.rho0_expr);
    const auto grid = make_time_grid(args.t_max, args.steps);
    const auto obs = parse_observables(args.observables);

    const auto states = integrate_timelocal(model, rho0, grid);

    if (args.flow_diagnostic) {
        const auto diag = flow_map_condition(model, grid);
        if (diag.invertibility_loss)
            std::cerr << "warning: invertibility loss, flow-map condition number reached "
                      << format_double(*std::max_element(diag.condition_numbers.begin(),
                                                         diag.condition_numbers.end()))
                      << " (threshold 1e12); rho(0) is no longer resolvable from rho(t)\n";
    }

    OutputTarget target(args.output);
    emit_deterministic_series(target.stream(), grid, states, args.observables, obs);
    return 0;
}

struct StochasticArgs {
    std::string model_path;
    std::string psi0_expr;
    double t_max = 0.0;
    int steps = 0;
    std::int64_t trajectories = 0;
    std::uint64_t seed = 0;
    int threads = 1;
    std::vector<std::string> observables;
    std::string output;
};

inline int run_mcwf(const StochasticArgs& args) {
    const auto pm = parse_model_file(args.model_path);
    print_warnings(pm);
    const auto& model = pm.lindblad();
    const StateVector psi0 = StateVector::normalized(initial_state_vector(pm, args.psi0_expr));
    const auto grid = make_time_grid(args.t_max, args.steps);

    UnravelOptions opt;
    opt.observables = parse_observables(args.observables);
    opt.threads = args.threads;
    const auto stats = unravel_to_density(model, psi0, grid, args.trajectories, args.seed, opt);

    OutputTarget target(args.output);
    std::ostream& out = target.stream();
    std::vector<std::string> header{"t"};
    for (const auto& name : args.observables) {
        header.push_back("mean(" + name + ")");
        header.push_back("stderr(" + name + ")");
    }
    header.push_back("mean_jump_count");
    write_csv_header(out, header);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        std::vector<double> row{grid[k]};
        for (std::size_t o = 0; o < opt.observables.size(); ++o) {
            row.push_back(stats.obs_mean[k][o].real());
            row.push_back(stats.obs_se[k][o]);
        }
        row.push_back(stats.mean_jump_count[k]);
        write_csv_row(out, row);
    }
    return 0;
}

inline int run_hnm(const StochasticArgs& args) {
    const auto pm = parse_model_file(args.model_path);
    print_warnings(pm);
    const TimeLocalModel model = (pm.kind == "lindblad") ? embed_lindblad(pm.lindblad())
                                                          : pm.timelocal();
    const StateVector psi0 = StateVector::normalized(initial_state_vector(pm, args.psi0_expr));
    const auto grid = make_time_grid(args.t_max, args.steps);

    DoubledUnravelOptions opt;
    opt.observables = parse_observables(args.observables);
    opt.threads = args.threads;
    const auto stats =
        unravel_doubled_to_density(model, psi0, grid, args.trajectories, args.seed, opt);

    OutputTarget target(args.output);
    std::ostream& out = target.stream();
    std::vector<std::string> header{"t"};
    for (const auto& name : args.observables) {
        header.push_back("re(" + name + ")");
        header.push_back("im(" + name + ")");
        header.push_back("stderr(" + name + ")");
    }
    header.push_back("mean_jump_count");
    write_csv_header(out, header);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        std::vector<double> row{grid[k]};
        for (std::size_t o = 0; o < opt.observables.size(); ++o) {
            row.push_back(stats.obs_mean[k][o].real());
            row.push_back(stats.obs_mean[k][o].imag());
            row.push_back(stats.obs_se[k][o]);
        }
        row.push_back(stats.mean_jump_count[k]);
        write_csv_row(out, row);
    }
    return 0;
}

struct MeasureArgs {
    std::string model_path;
    std::string probe_path;
    std::string rho_expr;
    std::string mode;
    int outcome = -1;
    double tau = -1.0;
    std::string output;
};

inline int run_measure(const MeasureArgs& args) {
    const auto pm = parse_model_file(args.model_path);
    print_warnings(pm);

    std::optional<ProbeModel> probe;
    if (!args.probe_path.empty()) {
        probe = parse_model_file(args.probe_path).probe();
    } else if (pm.kind == "probe") {
        probe = pm.probe();
    } else if (pm.kind == "total_system" && args.tau >= 0.0) {
        probe = probe_from_total_model(pm.total_system(), args.tau);
    } else {
        throw ValidationError("measure: need a [probe] model, --probe file, or a "
                              "[total_system] model with --tau");
    }

    const DensityMatrix rho = args.rho_expr.empty()
                                  ? initial_density(pm, "")
                                  : DensityMatrix(matrix_from_value(ConfigValue(args.rho_expr),
                                                                    "--rho"));
    const auto op = kraus_from_probe(*probe);

    OutputTarget target(args.output);
    std::ostream& out = target.stream();
    write_csv_header(out, {"m", "r_m", "P(m)"});
    for (std::size_t m = 0; m < op.n_outcomes(); ++m)
        write_csv_row(out, {double(m), op.outcome_value(m), outcome_probability(op, m, rho)});

    if (args.mode == "nonselective") {
        out << "# post_state = " << matrix_to_literal(nonselective_post_state(op, rho).matrix())
            << "\n";
    } else if (args.outcome >= 0) {
        const auto post = selective_post_state(op, std::size_t(args.outcome), rho);
        out << "# post_state = " << matrix_to_literal(post.matrix()) << "\n";
    }
    return 0;
}

inline int run_validate(const std::string& model_path) {
    const auto pm = parse_model_file(model_path);
    print_warnings(pm);
    std::cout << "OK: " << pm.kind << " model" << "\n";
    return 0;
}

struct CompareArgs {
    std::string file_a;
    std::string file_b;
    double max_sigma = 5.0;
};

// Compare a deterministic series against a stochastic one: for every shared
// observable, reports max_t |a - mean_b| / stderr_b.
inline int run_compare(const CompareArgs& args) {
    const CsvTable a = read_csv_file(args.file_a);
    const CsvTable b = read_csv_file(args.file_b);
    const int ta = a.column("t");
    const int tb = b.column("t");
    if (ta < 0 || tb < 0) throw ValidationError("compare: both files need a 't' column");
    if (a.rows.size() != b.rows.size())
        throw ValidationError("compare: row count mismatch (" + std::to_string(a.rows.size()) +
                              " vs " + std::to_string(b.rows.size()) + ")");
    for (std::size_t r = 0; r < a.rows.size(); ++r)
        if (a.rows[r][ta] != b.rows[r][tb])
            throw ValidationError("compare: time grids differ at row " + std::to_string(r));

    double worst = 0.0;
    int compared = 0;
    for (std::size_t col = 0; col < a.header.size(); ++col) {
        if (int(col) == ta) continue;
        const std::string& name = a.header[col];
        int mean_col = b.column("mean(" + name + ")");
        if (mean_col < 0) mean_col = b.column("re(" + name + ")");
        const int se_col = b.column("stderr(" + name + ")");
        if (mean_col < 0 || se_col < 0) continue;
        ++compared;
        double col_worst = 0.0;
        for (std::size_t r = 1; r < a.rows.size(); ++r) {
            const double diff = std::abs(a.rows[r][col] - b.rows[r][mean_col]);
            const double se = b.rows[r][se_col];
            if (se == 0.0) {
                if (diff > 0.0) col_worst = std::numeric_limits<double>::infinity();
                continue;
            }
            col_worst = std::max(col_worst, diff / se);
        }
        std::cout << name << ": max |delta|/stderr = " << format_double(col_worst) << "\n";
        worst = std::max(worst, col_worst);
    }
    if (compared == 0)
        throw ValidationError("compare: no shared observable columns between the files");
    std::cout << "overall: " << format_double(worst) << " (limit " << format_double(args.max_sigma)
              << ")\n";
    return worst <= args.max_sigma ? 0 : 3;
}

} // namespace detail

inline int run(std::vector<std::string> args) {
    CLI::App app{"open quantum system simulation toolkit"};
    app.require_subcommand(1);

    detail::EvolveArgs exact_args, lindblad_args, tcl_args;
    int unused_threads = 1;
    auto add_evolve = [&unused_threads](CLI::App* cmd, detail::EvolveArgs& a) {
        cmd->add_option("--model", a.model_path, "model file")->required();
        cmd->add_option("--rho0", a.rho0_expr, "initial density matrix expression");
        cmd->add_option("--t-max", a.t_max, "end time")->required();
        cmd->add_option("--steps", a.steps, "number of grid intervals")->required();
        cmd->add_option("--observables", a.observables, "observable expressions");
        cmd->add_option("--output", a.output, "CSV output path (default stdout)");
        cmd->add_option("--threads", unused_threads, "accepted everywhere; this solver runs "
                                                     "single-threaded");
    };
    add_evolve(app.add_subcommand("evolve-exact", "exact system+environment evolution"),
               exact_args);
    add_evolve(app.add_subcommand("evolve-lindblad", "Markovian master equation"),
               lindblad_args);
    auto* tcl_cmd = app.add_subcommand("evolve-tcl", "time-local master equation");
    add_evolve(tcl_cmd, tcl_args);
    tcl_cmd->add_flag("--flow-diagnostic", tcl_args.flow_diagnostic,
                      "track the flow-map condition number and warn on invertibility loss");

    detail::StochasticArgs mcwf_args, hnm_args;
    auto add_stochastic = [](CLI::App* cmd, detail::StochasticArgs& a) {
        cmd->add_option("--model", a.model_path, "model file")->required();
        cmd->add_option("--psi0", a.psi0_expr, "initial state expression");
        cmd->add_option("--t-max", a.t_max, "end time")->required();
        cmd->add_option("--steps", a.steps, "number of grid intervals")->required();
        cmd->add_option("--trajectories", a.trajectories, "number of trajectories")->required();
        cmd->add_option("--seed", a.seed, "master seed");
        cmd->add_option("--threads", a.threads, "worker thread cap");
        cmd->add_option("--observables", a.observables, "observable expressions");
        cmd->add_option("--output", a.output, "CSV output path (default stdout)");
    };
    add_stochastic(app.add_subcommand("mcwf", "Monte Carlo wave function unraveling"),
                   mcwf_args);
    add_stochastic(app.add_subcommand("hnm", "doubled-space non-Markovian unraveling"),
                   hnm_args);

    detail::MeasureArgs measure_args;
    auto* measure = app.add_subcommand("measure", "indirect probe measurement");
    measure->add_option("--model", measure_args.model_path, "model file")->required();
    measure->add_option("--probe", measure_args.probe_path, "probe model file");
    measure->add_option("--rho", measure_args.rho_expr, "system state expression");
    measure->add_option("--mode", measure_args.mode, "selective|nonselective")
        ->required()
        ->check(CLI::IsMember({"selective", "nonselective"}));
    measure->add_option("--outcome", measure_args.outcome, "conditioning outcome index");
    measure->add_option("--tau", measure_args.tau, "interaction time for from-total probes");
    measure->add_option("--output", measure_args.output, "CSV output path");

    std::string validate_path;
    auto* validate = app.add_subcommand("validate", "parse and validate a model file");
    validate->add_option("--model", validate_path, "model file")->required();

    detail::CompareArgs compare_args;
    auto* compare = app.add_subcommand("compare", "compare deterministic vs stochastic CSVs");
    compare->add_option("a", compare_args.file_a, "reference CSV")->required();
    compare->add_option("b", compare_args.file_b, "stochastic CSV")->required();
    compare->add_option("--max-sigma", compare_args.max_sigma, "acceptance threshold");

    try {
        // CLI11 wants argv in reverse order for its vector overload
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (app.got_subcommand("evolve-exact")) return detail::run_evolve_exact(exact_args);
        if (app.got_subcommand("evolve-lindblad"))
            return detail::run_evolve_lindblad(lindblad_args);
        if (app.got_subcommand("evolve-tcl")) return detail::run_evolve_tcl(tcl_args);
        if (app.got_subcommand("mcwf")) return detail::run_mcwf(mcwf_args);
        if (app.got_subcommand("hnm")) return detail::run_hnm(hnm_args);
        if (app.got_subcommand("measure")) return detail::run_measure(measure_args);
        if (app.got_subcommand("validate")) return detail::run_validate(validate_path);
        if (app.got_subcommand("compare")) return detail::run_compare(compare_args);
        return 1;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}

inline int run(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(std::move(args));
}

} // namespace oqs::cli
