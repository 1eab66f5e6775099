// Command-line front end: model generation and validation, threshold
// calibration, closed-form architecture comparison, dominance-region sweeps,
// stealthy-attack synthesis, and Monte Carlo cross-validation.
//
// Exit codes: 0 success, 2 validation error, 3 infeasibility, 4 numerical
// failure. Errors are also written to stderr as one-line JSON envelopes.

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "icsdet/attack.hpp"
#include "icsdet/chi2.hpp"
#include "icsdet/comparison.hpp"
#include "icsdet/detectors.hpp"
#include "icsdet/model.hpp"
#include "icsdet/model_io.hpp"
#include "icsdet/montecarlo.hpp"
#include "icsdet/serialize.hpp"
#include "icsdet/stacking.hpp"
#include "icsdet/types.hpp"

namespace {

using namespace icsdet;

// ---------------------------------------------------------------------------
// Small I/O helpers
// ---------------------------------------------------------------------------

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open output file: " + path);
    out << text;
    if (!text.empty() && text.back() != '\n') out << '\n';
}

std::vector<double> parse_doubles(const std::string& text, const std::string& what) {
    std::vector<double> out;
    std::stringstream stream(text);
    std::string token;
    while (std::getline(stream, token, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(token, &used));
            if (used != token.size()) throw std::invalid_argument(token);
        } catch (const std::exception&) {
            throw ValidationError(what + ": cannot parse number '" + token + "'");
        }
    }
    if (out.empty()) throw ValidationError(what + ": empty list");
    return out;
}

Vector to_vector(const std::vector<double>& values) {
    Vector v(static_cast<Index>(values.size()));
    for (std::size_t i = 0; i < values.size(); ++i) v(static_cast<Index>(i)) = values[i];
    return v;
}

/// Attack argument: either `theta=<value>` (scaled all-ones direction through
/// the centralized information matrix) or a path to a JSON file carrying an
/// `input` array (the attack-plan format).
Vector resolve_attack(const std::string& arg, const DetectorBank& bank) {
    const Index mT = bank.central.info.rows();
    if (arg.empty()) return Vector::Zero(mT);
    if (arg.rfind("theta=", 0) == 0) {
        double theta = 0;
        try {
            theta = std::stod(arg.substr(6));
        } catch (const std::exception&) {
            throw ValidationError("attack: cannot parse '" + arg + "'");
        }
        return attack_with_noncentrality(bank.central.info, theta);
    }
    std::ifstream in(arg);
    if (!in) throw ValidationError("attack: cannot open file: " + arg);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("attack file: invalid JSON: ") + e.what());
    }
    if (!doc.contains("input") || !doc["input"].is_array()) {
        throw ValidationError("attack file: missing 'input' array");
    }
    std::vector<double> values;
    for (const auto& v : doc["input"]) {
        if (!v.is_number()) throw ValidationError("attack file: 'input' must hold numbers");
        values.push_back(v.get<double>());
    }
    return to_vector(values);
}

/// Refuse stacked operators that would not fit in memory long before Eigen
/// would try to allocate them.
void check_problem_size(const InterconnectedModel& model, Index T) {
    const double side = static_cast<double>(model.output_dim()) * static_cast<double>(T);
    if (side > 1e7) {
        throw ValidationError("stacked measurement dimension exceeds 1e7; "
                              "reduce the horizon or the model size");
    }
}

// ---------------------------------------------------------------------------
// Synthetic model generation
// ---------------------------------------------------------------------------

struct GenOptions {
    std::string kind = "chain";
    int count = 3;
    int state_dim = 2;
    int output_dim = 2;
    int attack_dim = 1;
    std::uint64_t seed = 0;
    bool deadbeat = false;
};

Matrix gen_random(std::mt19937_64& engine, Index rows, Index cols) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix out(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        for (Index j = 0; j < cols; ++j) out(i, j) = normal(engine);
    }
    return out;
}

Matrix gen_stable(std::mt19937_64& engine, Index dim, double radius) {
    Matrix A = gen_random(engine, dim, dim);
    const Eigen::EigenSolver<Matrix> eig(A);
    const double rho = eig.eigenvalues().cwiseAbs().maxCoeff();
    if (rho > 0) A *= radius / rho;
    return A;
}

Matrix gen_spd(std::mt19937_64& engine, Index dim) {
    const Matrix R = gen_random(engine, dim, dim);
    return 0.1 * (R * R.transpose()) + 0.2 * Matrix::Identity(dim, dim);
}

/// Weakly coupled network with rank-one incoming channels: every coupling
/// block into subsystem k shares one injection direction, so the unknown
/// interconnection enters through a thin channel and the local projections
/// keep a residual space.
///
/// With --deadbeat the local dynamics become subdiagonal shift matrices, the
/// attack enters through the first state, and couplings inject into the
/// second: the column space of the network matrix then misses every attack
/// column, so no attack input can impersonate an unknown initial state. On
/// such models the stealthy-attack optimum is bounded; with generic invertible
/// dynamics a step-0 attack is output-equivalent to an initial-state offset,
/// which the projection removes, and the optimum is rightly reported as
/// unbounded.
InterconnectedModel generate_model(const GenOptions& options) {
    if (options.count < 1 || options.state_dim < 1 || options.output_dim < 1 ||
        options.attack_dim < 1) {
        throw ValidationError("gen: all sizes must be >= 1");
    }
    if (options.deadbeat && (options.state_dim < 2 || options.attack_dim != 1)) {
        throw ValidationError("gen: --deadbeat needs state-dim >= 2 and attack-dim 1");
    }
    std::mt19937_64 engine(options.seed);
    std::uniform_real_distribution<double> band(0.4, 0.9);
    std::vector<Subsystem> subsystems;
    std::vector<Vector> injection;
    for (int k = 0; k < options.count; ++k) {
        Subsystem s;
        s.id = k + 1;
        if (options.deadbeat) {
            s.A = Matrix::Zero(options.state_dim, options.state_dim);
            for (Index i = 0; i + 1 < options.state_dim; ++i) s.A(i + 1, i) = band(engine);
            s.B_attack = Matrix::Zero(options.state_dim, 1);
            s.B_attack(0, 0) = band(engine);
        } else {
            s.A = gen_stable(engine, options.state_dim, 0.95);
            s.B_attack = gen_random(engine, options.state_dim, options.attack_dim);
        }
        s.C = gen_random(engine, options.output_dim, options.state_dim);
        s.Sigma_w = gen_spd(engine, options.state_dim);
        s.Sigma_v = gen_spd(engine, options.output_dim);
        subsystems.push_back(std::move(s));
        if (options.deadbeat) {
            injection.push_back(Vector::Unit(options.state_dim, 1));
        } else {
            injection.push_back(gen_random(engine, options.state_dim, 1).normalized());
        }
    }

    CouplingMap coupling;
    const auto couple = [&](int to, int from) {
        const Vector row = gen_random(engine, options.state_dim, 1);
        Matrix block = injection[to] * row.transpose();
        // Keep the interconnection weak relative to the local dynamics.
        const double cap = 0.1 * subsystems[to].A.norm();
        if (block.norm() > 0) block *= cap / block.norm();
        coupling[{to + 1, from + 1}] = block;
    };
    if (options.kind == "chain" || options.kind == "ring") {
        for (int k = 0; k + 1 < options.count; ++k) {
            couple(k, k + 1);
            couple(k + 1, k);
        }
        if (options.kind == "ring" && options.count > 2) {
            couple(options.count - 1, 0);
            couple(0, options.count - 1);
        }
    } else if (options.kind == "star") {
        for (int k = 1; k < options.count; ++k) {
            couple(0, k);
            couple(k, 0);
        }
    } else {
        throw ValidationError("gen: kind must be chain, ring, or star");
    }
    return InterconnectedModel(subsystems, coupling);
}

// ---------------------------------------------------------------------------
// Grid specification for `sweep`
// ---------------------------------------------------------------------------

struct GridSpec {
    int dof_local = 0;
    int dof_central = 0;
    int count = 0;
    double pf = 0;
    std::vector<double> lambda_local;
    std::vector<double> lambda_central;
};

std::vector<double> parse_range(const std::string& text) {
    // start:step:stop (inclusive) or a single value.
    std::vector<double> parts;
    std::stringstream stream(text);
    std::string token;
    while (std::getline(stream, token, ':')) {
        try {
            parts.push_back(std::stod(token));
        } catch (const std::exception&) {
            throw ValidationError("grid: cannot parse range '" + text + "'");
        }
    }
    if (parts.size() == 1) return {parts[0]};
    if (parts.size() != 3) throw ValidationError("grid: range must be start:step:stop");
    const double start = parts[0], step = parts[1], stop = parts[2];
    if (step <= 0 || stop < start) throw ValidationError("grid: need step > 0, stop >= start");
    std::vector<double> out;
    for (double v = start; v <= stop + 1e-12 * std::max(1.0, std::abs(stop)); v += step) {
        out.push_back(v);
    }
    if (out.size() > 100'000) throw ValidationError("grid: more than 1e5 points in one axis");
    return out;
}

GridSpec parse_grid(const std::string& text) {
    GridSpec spec;
    bool have_pi = false, have_pc = false, have_n = false, have_pf = false, have_li = false,
         have_lc = false;
    std::stringstream stream(text);
    std::string token;
    while (std::getline(stream, token, ',')) {
        const auto eq = token.find('=');
        if (eq == std::string::npos) {
            throw ValidationError("grid: expected key=value, got '" + token + "'");
        }
        const std::string key = token.substr(0, eq);
        const std::string value = token.substr(eq + 1);
        try {
            if (key == "pi") {
                spec.dof_local = std::stoi(value);
                have_pi = true;
            } else if (key == "pc") {
                spec.dof_central = std::stoi(value);
                have_pc = true;
            } else if (key == "n") {
                spec.count = std::stoi(value);
                have_n = true;
            } else if (key == "pf") {
                spec.pf = std::stod(value);
                have_pf = true;
            } else if (key == "li") {
                spec.lambda_local = parse_range(value);
                have_li = true;
            } else if (key == "lc") {
                spec.lambda_central = parse_range(value);
                have_lc = true;
            } else {
                throw ValidationError("grid: unknown key '" + key + "'");
            }
        } catch (const Error&) {
            throw;
        } catch (const std::exception&) {
            throw ValidationError("grid: cannot parse '" + token + "'");
        }
    }
    if (!(have_pi && have_pc && have_n && have_pf && have_li && have_lc)) {
        throw ValidationError(
            "grid: need pi=<dof>,pc=<dof>,n=<count>,pf=<alpha>,li=<range>,lc=<range>");
    }
    return spec;
}

// ---------------------------------------------------------------------------
// Shared command state
// ---------------------------------------------------------------------------

struct CommonArgs {
    std::string model_path;
    std::string out = "-";
    double pf = 0.05;
    Index horizon = 10;
    std::string weights;  // comma list, empty = equal
};

InterconnectedModel load_checked(const CommonArgs& args) {
    const auto model = load_model(args.model_path);
    check_problem_size(model, args.horizon);
    return model;
}

std::vector<double> resolve_weights(const CommonArgs& args) {
    if (args.weights.empty()) return {};
    return parse_doubles(args.weights, "weights");
}

/// Detection-probability cap -> stealth budget. The centralized budget is
/// exact (the detector sees the full noncentrality); the decentralized one
/// caps the closed-form upper bound on the fused rate, which is conservative.
double cap_to_budget(double delta, int dof, double tau) {
    if (!(delta > 0.0) || !(delta < 1.0)) {
        throw ValidationError("delta must lie strictly between 0 and 1");
    }
    return chi2::q_inverse_lambda(delta, dof, tau);
}

int run_guarded(const std::function<void()>& body) {
    try {
        body();
        return 0;
    } catch (const ValidationError& e) {
        std::cerr << error_to_json("validation", e.what()).dump() << '\n';
        return 2;
    } catch (const BlindDetectorError& e) {
        std::cerr << error_to_json("infeasible", e.what()).dump() << '\n';
        return 3;
    } catch (const InfeasibleError& e) {
        std::cerr << error_to_json("infeasible", e.what()).dump() << '\n';
        return 3;
    } catch (const NumericalError& e) {
        std::cerr << error_to_json("numerical", e.what()).dump() << '\n';
        return 4;
    } catch (const Error& e) {
        std::cerr << error_to_json("numerical", e.what()).dump() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << error_to_json("validation", e.what()).dump() << '\n';
        return 2;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Detection-performance calculus for interconnected stochastic systems"};
    app.require_subcommand(1);
    int exit_code = 0;

    // ---- gen -------------------------------------------------------------
    GenOptions gen_options;
    std::string gen_out = "-";
    auto* gen = app.add_subcommand("gen", "Generate a synthetic weakly-coupled model file");
    gen->add_option("--kind", gen_options.kind, "Topology: chain, ring, or star")
        ->check(CLI::IsMember({"chain", "ring", "star"}));
    gen->add_option("--count", gen_options.count, "Number of subsystems");
    gen->add_option("--state-dim", gen_options.state_dim, "States per subsystem");
    gen->add_option("--output-dim", gen_options.output_dim, "Outputs per subsystem");
    gen->add_option("--attack-dim", gen_options.attack_dim, "Attack inputs per subsystem");
    gen->add_option("--seed", gen_options.seed, "Generator seed");
    gen->add_flag("--deadbeat", gen_options.deadbeat,
                  "Shift-register local dynamics; keeps stealthy-attack synthesis bounded");
    gen->add_option("--out", gen_out, "Output path ('-' = stdout)");
    gen->callback([&] {
        exit_code = run_guarded([&] {
            write_text(gen_out, model_to_json(generate_model(gen_options)).dump(2));
        });
    });

    // ---- validate --------------------------------------------------------
    std::string validate_path;
    std::string validate_out = "-";
    auto* validate = app.add_subcommand("validate", "Check a model file and print a summary");
    validate->add_option("model", validate_path, "Model JSON file")->required();
    validate->add_option("--out", validate_out, "Output path ('-' = stdout)");
    validate->callback([&] {
        exit_code = run_guarded([&] {
            const auto model = load_model(validate_path);
            nlohmann::json ids = nlohmann::json::array();
            for (int k = 0; k < model.count(); ++k) ids.push_back(model.subsystem(k).id);
            const nlohmann::json summary{{"schema_version", kReportSchemaVersion},
                                         {"kind", "model_summary"},
                                         {"subsystems", model.count()},
                                         {"ids", ids},
                                         {"state_dim", model.state_dim()},
                                         {"output_dim", model.output_dim()},
                                         {"attack_dim", model.attack_dim()},
                                         {"couplings", model.coupling().size()}};
            write_text(validate_out, summary.dump(2));
        });
    });

    // ---- calibrate -------------------------------------------------------
    CommonArgs cal_args;
    auto* calibrate = app.add_subcommand("calibrate",
                                         "Compute detector thresholds for a false-alarm target");
    calibrate->add_option("--model", cal_args.model_path, "Model JSON file")->required();
    calibrate->add_option("--pf", cal_args.pf, "Network false-alarm probability")->required();
    calibrate->add_option("--horizon", cal_args.horizon, "Detection horizon T")->required();
    calibrate->add_option("--weights", cal_args.weights,
                          "Comma list of per-subsystem false-alarm weights");
    calibrate->add_option("--out", cal_args.out, "Output path ('-' = stdout)");
    calibrate->callback([&] {
        exit_code = run_guarded([&] {
            const auto model = load_checked(cal_args);
            const auto bank =
                build_bank(model, cal_args.horizon, cal_args.pf, resolve_weights(cal_args));
            write_text(cal_args.out, calibration_to_json(bank).dump(2));
        });
    });

    // ---- analyze ---------------------------------------------------------
    CommonArgs ana_args;
    std::string ana_attack;
    auto* analyze = app.add_subcommand(
        "analyze", "Closed-form detector performance and architecture verdict");
    analyze->add_option("--model", ana_args.model_path, "Model JSON file")->required();
    analyze->add_option("--pf", ana_args.pf, "Network false-alarm probability")->required();
    analyze->add_option("--horizon", ana_args.horizon, "Detection horizon T")->required();
    analyze->add_option("--attack", ana_attack,
                        "Attack: 'theta=<v>' or a JSON file with an 'input' array");
    analyze->add_option("--weights", ana_args.weights,
                        "Comma list of per-subsystem false-alarm weights");
    analyze->add_option("--out", ana_args.out, "Output path ('-' = stdout)");
    analyze->callback([&] {
        exit_code = run_guarded([&] {
            const auto model = load_checked(ana_args);
            const auto bank =
                build_bank(model, ana_args.horizon, ana_args.pf, resolve_weights(ana_args));
            const Vector attack = resolve_attack(ana_attack, bank);
            const auto analysis = analyze_bank(bank, attack);
            const auto verdict = compare_architectures(analysis);
            write_text(ana_args.out, analysis_to_json(analysis, verdict).dump(2));
        });
    });

    // ---- sweep -----------------------------------------------------------
    std::string sweep_grid;
    std::string sweep_out = "-";
    auto* sweep = app.add_subcommand(
        "sweep", "Detection-probability sweep over a noncentrality grid (CSV)");
    sweep->add_option("--grid", sweep_grid,
                      "Grid: pi=<dof>,pc=<dof>,n=<count>,pf=<alpha>,"
                      "li=<start:step:stop>,lc=<start:step:stop>")
        ->required();
    sweep->add_option("--out", sweep_out, "Output path ('-' = stdout)");
    sweep->callback([&] {
        exit_code = run_guarded([&] {
            const auto spec = parse_grid(sweep_grid);
            const auto map = sweep_region(spec.dof_local, spec.dof_central, spec.count,
                                          spec.pf, spec.lambda_local, spec.lambda_central);
            std::ostringstream out;
            region_to_csv(map, out);
            write_text(sweep_out, out.str());
        });
    });

    // ---- attack-synth ----------------------------------------------------
    CommonArgs syn_args;
    double syn_delta = 0.1;
    bool syn_decentralized = false;
    std::string syn_x0;
    auto* synth = app.add_subcommand(
        "attack-synth", "Worst-case state degradation under a detection-probability cap");
    synth->add_option("--model", syn_args.model_path, "Model JSON file")->required();
    synth->add_option("--pf", syn_args.pf, "Network false-alarm probability")->required();
    synth->add_option("--horizon", syn_args.horizon, "Detection horizon T")->required();
    synth->add_option("--delta", syn_delta, "Detection-probability cap in (0, 1)")->required();
    synth->add_flag("--decentralized", syn_decentralized,
                    "Constrain the decentralized bank instead of the centralized detector");
    synth->add_option("--x0", syn_x0, "Comma list: known initial state (default zero)");
    synth->add_option("--weights", syn_args.weights,
                      "Comma list of per-subsystem false-alarm weights");
    synth->add_option("--out", syn_args.out, "Output path ('-' = stdout)");
    synth->callback([&] {
        exit_code = run_guarded([&] {
            const auto model = load_checked(syn_args);
            const auto bank =
                build_bank(model, syn_args.horizon, syn_args.pf, resolve_weights(syn_args));
            Vector x0 = Vector::Zero(model.state_dim());
            if (!syn_x0.empty()) x0 = to_vector(parse_doubles(syn_x0, "x0"));

            Matrix info;
            double budget = 0;
            std::string constraint;
            if (syn_decentralized) {
                info = decentralized_info(model, syn_args.horizon);
                Index dof_sum = 0;
                double tau_min = bank.local_thresholds[0];
                for (std::size_t i = 0; i < bank.locals.size(); ++i) {
                    dof_sum += bank.locals[i].residual_dim;
                    tau_min = std::min(tau_min, bank.local_thresholds[i]);
                }
                budget = cap_to_budget(syn_delta, static_cast<int>(dof_sum), tau_min);
                constraint = "decentralized";
            } else {
                info = bank.central.info;
                budget = cap_to_budget(syn_delta,
                                       static_cast<int>(bank.central.residual_dim),
                                       bank.central_threshold);
                constraint = "centralized";
            }
            const auto plan = synthesize_attack(model.global_A(), model.global_B_attack(),
                                                syn_args.horizon, x0, info, budget);
            write_text(syn_args.out, synthesis_to_json(plan, budget, constraint).dump(2));
        });
    });

    // ---- simulate --------------------------------------------------------
    CommonArgs sim_args;
    std::string sim_attack;
    std::string sim_x0;
    std::string sim_stats_csv;
    int sim_trials = 10'000;
    std::uint64_t sim_seed = 0;
    int sim_threads = 1;
    auto* simulate_cmd =
        app.add_subcommand("simulate", "Monte Carlo validation of the closed-form rates");
    simulate_cmd->add_option("--model", sim_args.model_path, "Model JSON file")->required();
    simulate_cmd->add_option("--pf", sim_args.pf, "Network false-alarm probability")
        ->required();
    simulate_cmd->add_option("--horizon", sim_args.horizon, "Detection horizon T")
        ->required();
    simulate_cmd->add_option("--trials", sim_trials, "Number of Monte Carlo trials");
    simulate_cmd->add_option("--seed", sim_seed, "Master seed");
    simulate_cmd->add_option("--threads", sim_threads, "Worker threads");
    simulate_cmd->add_option("--attack", sim_attack,
                             "Attack: 'theta=<v>' or a JSON file with an 'input' array");
    simulate_cmd->add_option("--x0", sim_x0, "Comma list: initial state (default zero)");
    simulate_cmd->add_option("--weights", sim_args.weights,
                             "Comma list of per-subsystem false-alarm weights");
    simulate_cmd->add_option("--stats-csv", sim_stats_csv,
                             "Also write per-trial statistics to this CSV file");
    simulate_cmd->add_option("--out", sim_args.out, "Output path ('-' = stdout)");
    simulate_cmd->callback([&] {
        exit_code = run_guarded([&] {
            const auto model = load_checked(sim_args);
            const auto bank =
                build_bank(model, sim_args.horizon, sim_args.pf, resolve_weights(sim_args));
            SimulationOptions options;
            options.trials = sim_trials;
            options.seed = sim_seed;
            options.threads = sim_threads;
            options.attack = resolve_attack(sim_attack, bank);
            if (!sim_x0.empty()) options.x0 = to_vector(parse_doubles(sim_x0, "x0"));
            options.collect_statistics = !sim_stats_csv.empty();
            const auto result = simulate(model, bank, options);
            if (!sim_stats_csv.empty()) {
                std::ostringstream csv;
                statistics_to_csv(result, csv);
                write_text(sim_stats_csv, csv.str());
            }
            write_text(sim_args.out, simulation_to_json(result).dump(2));
        });
    });

    // ---- degradation-curve -----------------------------------------------
    CommonArgs deg_args;
    std::string deg_deltas;
    std::string deg_x0;
    auto* degradation = app.add_subcommand(
        "degradation-curve", "Worst-case cost vs detection cap for both architectures (CSV)");
    degradation->add_option("--model", deg_args.model_path, "Model JSON file")->required();
    degradation->add_option("--pf", deg_args.pf, "Network false-alarm probability")
        ->required();
    degradation->add_option("--horizon", deg_args.horizon, "Detection horizon T")
        ->required();
    degradation->add_option("--deltas", deg_deltas, "Comma list of detection caps in (0,1)")
        ->required();
    degradation->add_option("--x0", deg_x0, "Comma list: known initial state (default zero)");
    degradation->add_option("--weights", deg_args.weights,
                            "Comma list of per-subsystem false-alarm weights");
    degradation->add_option("--out", deg_args.out, "Output path ('-' = stdout)");
    degradation->callback([&] {
        exit_code = run_guarded([&] {
            const auto model = load_checked(deg_args);
            const auto bank =
                build_bank(model, deg_args.horizon, deg_args.pf, resolve_weights(deg_args));
            Vector x0 = Vector::Zero(model.state_dim());
            if (!deg_x0.empty()) x0 = to_vector(parse_doubles(deg_x0, "x0"));

            const Matrix info_d = decentralized_info(model, deg_args.horizon);
            Index dof_sum = 0;
            double tau_min = bank.local_thresholds[0];
            for (std::size_t i = 0; i < bank.locals.size(); ++i) {
                dof_sum += bank.locals[i].residual_dim;
                tau_min = std::min(tau_min, bank.local_thresholds[i]);
            }

            std::vector<DegradationPoint> points;
            for (const double delta : parse_doubles(deg_deltas, "deltas")) {
                DegradationPoint pt;
                pt.delta = delta;
                pt.budget_centralized =
                    cap_to_budget(delta, static_cast<int>(bank.central.residual_dim),
                                  bank.central_threshold);
                pt.cost_centralized =
                    synthesize_attack(model.global_A(), model.global_B_attack(),
                                      deg_args.horizon, x0, bank.central.info,
                                      pt.budget_centralized)
                        .cost;
                pt.budget_decentralized =
                    cap_to_budget(delta, static_cast<int>(dof_sum), tau_min);
                pt.cost_decentralized =
                    synthesize_attack(model.global_A(), model.global_B_attack(),
                                      deg_args.horizon, x0, info_d, pt.budget_decentralized)
                        .cost;
                points.push_back(pt);
            }
            std::ostringstream out;
            degradation_to_csv(points, out);
            write_text(deg_args.out, out.str());
        });
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        if (code == 0) return 0;  // --help / --version
        std::cerr << error_to_json("validation", e.what()).dump() << '\n';
        return 2;
    }
    return exit_code;
}
