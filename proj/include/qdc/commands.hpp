#pragma once

// Reproduction subcommands behind the `qdc` executable. Each returns a
// process exit code and reports problems on `err`; nothing is written to
// disk unless the configuration validated completely.

#include <filesystem>
#include <iostream>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qdc/analytic.hpp"
#include "qdc/collision.hpp"
#include "qdc/errors.hpp"
#include "qdc/experiment_config.hpp"
#include "qdc/io.hpp"
#include "qdc/trainer.hpp"

namespace qdc {

enum ExitCode : int {
    kExitOk = 0,
    kExitConfigError = 2,
    kExitNumericalFailure = 3,
    kExitIoError = 4,
};

struct RunOptions {
    std::filesystem::path out;
    std::optional<TrainableParam> param;
    std::vector<double> eta;
    std::optional<std::uint64_t> seed;
    bool require_converged = false;
};

namespace detail {

// Maps exceptions to exit codes.
template <class Body>
int guarded(std::ostream& err, Body&& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const IoError& e) {
        err << "I/O error: " << e.what() << '\n';
        return kExitIoError;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kExitNumericalFailure;
    } catch (const ContractError& e) {
        err << "invalid input: " << e.what() << '\n';
        return kExitConfigError;
    }
}

inline void print_warnings(const ClassifierConfig& c, std::ostream& err) {
    for (const auto& w : c.warnings()) err << "warning: " << w << '\n';
}

inline std::vector<double> learning_rates(const ExperimentConfig& cfg, const RunOptions& opts) {
    const auto& etas = opts.eta.empty() ? cfg.eta : opts.eta;
    if (etas.empty()) throw ConfigError("no learning rate: set train.eta or pass --eta");
    return etas;
}

inline TrainableParam train_kind(const ExperimentConfig& cfg, const RunOptions& opts) {
    if (opts.param) return *opts.param;
    if (cfg.train_param) return *cfg.train_param;
    throw ConfigError("no parameter family: set train.param or pass --param");
}

// Parameter value as written to files: degrees for angles.
inline double display_value(TrainableParam kind, double v) {
    return kind == TrainableParam::CouplingG ? v : rad_to_deg(v);
}

inline double internal_value(TrainableParam kind, double v) {
    return kind == TrainableParam::CouplingG ? v : deg_to_rad(v);
}

inline nlohmann::json run_summary(double eta, const TrainOutcome& o) {
    nlohmann::json events = nlohmann::json::array();
    for (const auto& e : o.events) events.push_back({{"episode", e.episode}, {"message", e.message}});
    const auto& last = o.final_record();
    return {{"eta", eta},
            {"status", to_string(o.status)},
            {"final_cost", last.cost},
            {"final_actual", last.actual},
            {"episodes", last.episode},
            {"collisions_used", nullptr},
            {"cost_increases", o.cost_increases},
            {"overshoot", o.overshoot()},
            {"events", events}};
}

}  // namespace detail

inline ExperimentConfig fig1_defaults() {
    ExperimentConfig cfg;
    cfg.reservoirs = {{0.0, 0.0, 0.005}, {180.0, 0.0, 0.005}};
    cfg.tau = 3.0;
    cfg.target_theta_deg = 90.0;
    cfg.fig1_g = 0.01;
    cfg.fig1_points = 21;
    return cfg;
}

// Steady magnetization across g1 = g (1/2 - d), g2 = g (1/2 + d).
inline int cmd_fig1(const ExperimentConfig& input, const RunOptions& opts, std::ostream& err = std::cerr) {
    return detail::guarded(err, [&] {
        ExperimentConfig cfg = input;
        if (cfg.reservoirs.empty()) cfg.reservoirs = fig1_defaults().reservoirs;
        if (cfg.reservoirs.size() != 2) throw ConfigError("fig1 needs exactly 2 reservoirs");
        if (opts.seed) cfg.seed = *opts.seed;
        if (cfg.fig1_points < 2) throw ConfigError("fig1.points must be >= 2");
        const ClassifierConfig base = cfg.classifier();
        const CollisionSettings settings = cfg.collision_settings();
        if (!(cfg.fig1_g > 0.0)) throw ConfigError("fig1.g must be > 0");
        require_writable_parent(opts.out);

        const auto grid = linspace(-0.5, 0.5, cfg.fig1_points);
        const auto points = magnetization_sweep(cfg.fig1_g, grid, base, settings);

        std::ostringstream csv;
        csv << "delta_g_fraction,steady_sz_simulated,steady_sz_analytic,collisions_used,converged\n";
        bool all_converged = true;
        for (const auto& p : points) {
            std::vector<ReservoirSpec> res = base.reservoirs;
            res[0] = res[0].with_g(std::max(0.0, cfg.fig1_g * (0.5 - p.delta_g_fraction)));
            res[1] = res[1].with_g(std::max(0.0, cfg.fig1_g * (0.5 + p.delta_g_fraction)));
            csv << fmt::sci(p.delta_g_fraction) << ',' << fmt::sci(p.steady_sz) << ','
                << fmt::sci(steady_sz(res)) << ',' << p.collisions_used << ','
                << (p.converged ? 1 : 0) << '\n';
            all_converged = all_converged && p.converged;
        }
        write_text_file(opts.out, csv.str());
        if (opts.require_converged && !all_converged) {
            err << "numerical failure: not every grid point reached the steady state\n";
            return int{kExitNumericalFailure};
        }
        return int{kExitOk};
    });
}

// One gradient-descent run per learning rate: "<stem>.eta<k>.csv" for each
// and "<stem>.summary.json" for all.
inline int cmd_train(const ExperimentConfig& cfg, const RunOptions& opts, std::ostream& err = std::cerr) {
    return detail::guarded(err, [&] {
        const TrainableParam kind = detail::train_kind(cfg, opts);
        const auto etas = detail::learning_rates(cfg, opts);
        const ClassifierConfig classifier = cfg.classifier();
        std::vector<TrainSettings> runs;
        for (double eta : etas) runs.push_back(cfg.train_settings(eta));
        if (classifier.reservoirs.size() != 2) {
            err << "note: " << classifier.reservoirs.size()
                << " reservoirs; using finite-difference gradients\n";
        }
        detail::print_warnings(classifier, err);
        require_writable_parent(opts.out);

        nlohmann::json summary = {{"param", to_string(kind)},
                                  {"observable", to_string(observable_for(kind))},
                                  {"desired", *cfg.desired},
                                  {"runs", nlohmann::json::array()}};
        std::vector<std::pair<std::filesystem::path, std::string>> files;
        bool all_converged = true;
        for (std::size_t k = 0; k < runs.size(); ++k) {
            const TrainOutcome outcome = gd_train(classifier, kind, runs[k]);
            std::ostringstream csv;
            csv << "episode";
            for (std::size_t i = 0; i < classifier.reservoirs.size(); ++i) csv << ",param_" << i + 1;
            csv << ",actual,cost\n";
            for (const auto& rec : outcome.records) {
                csv << rec.episode;
                for (double v : rec.params) csv << ',' << fmt::sci(detail::display_value(kind, v));
                csv << ',' << fmt::sci(rec.actual) << ',' << fmt::sci(rec.cost) << '\n';
            }
            const auto path = sibling_path(opts.out, ".eta" + std::to_string(k) + ".csv");
            files.emplace_back(path, csv.str());
            auto run = detail::run_summary(runs[k].eta, outcome);
            run["csv"] = path.filename().string();
            summary["runs"].push_back(run);
            all_converged = all_converged && outcome.status == TrainStatus::Converged;
        }
        for (const auto& [path, text] : files) write_text_file(path, text);
        write_text_file(sibling_path(opts.out, ".summary.json"), summary.dump(2) + "\n");
        if (opts.require_converged && !all_converged) {
            err << "numerical failure: not every training run converged\n";
            return int{kExitNumericalFailure};
        }
        return int{kExitOk};
    });
}

// Cost surface over two parameters of one family, plus the descent path of
// the first configured learning rate ("<stem>.trajectory.csv").
inline int cmd_surface(const ExperimentConfig& cfg, const RunOptions& opts, std::ostream& err = std::cerr) {
    return detail::guarded(err, [&] {
        if (!cfg.surface) throw ConfigError("surface needs surface.param, surface.axis1, surface.axis2");
        const SurfaceGrid& grid = *cfg.surface;
        grid.validate();
        if (opts.param && *opts.param != grid.kind) {
            throw ConfigError("--param disagrees with surface.param");
        }
        const ClassifierConfig classifier = cfg.classifier();
        if (classifier.reservoirs.size() != 2) throw ConfigError("surface needs exactly 2 reservoirs");
        const auto etas = detail::learning_rates(cfg, opts);
        const TrainSettings train = cfg.train_settings(etas.front());
        detail::print_warnings(classifier, err);
        require_writable_parent(opts.out);

        const ParameterState base = ParameterState::from(classifier);
        const auto objective = family_cost(base, grid.kind, train.desired);
        std::ostringstream csv;
        csv << "axis1,axis2,cost\n";
        for (double a1 : grid.axis1.values()) {
            for (double a2 : grid.axis2.values()) {
                const double x[2] = {detail::internal_value(grid.kind, a1),
                                     detail::internal_value(grid.kind, a2)};
                double c = std::numeric_limits<double>::quiet_NaN();
                try {
                    c = objective(std::span<const double>(x));
                } catch (const NumericalError&) {
                    // undefined where both couplings vanish
                }
                csv << fmt::sci(a1) << ',' << fmt::sci(a2) << ',' << fmt::sci(c) << '\n';
            }
        }

        const TrainOutcome outcome = gd_train(classifier, grid.kind, train);
        std::ostringstream traj;
        traj << "episode,axis1,axis2,cost\n";
        for (const auto& rec : outcome.records) {
            traj << rec.episode << ',' << fmt::sci(detail::display_value(grid.kind, rec.params[0]))
                 << ',' << fmt::sci(detail::display_value(grid.kind, rec.params[1])) << ','
                 << fmt::sci(rec.cost) << '\n';
        }
        write_text_file(opts.out, csv.str());
        write_text_file(sibling_path(opts.out, ".trajectory.csv"), traj.str());
        auto summary = detail::run_summary(train.eta, outcome);
        summary["param"] = to_string(grid.kind);
        write_text_file(sibling_path(opts.out, ".summary.json"), summary.dump(2) + "\n");
        return int{kExitOk};
    });
}

// Collision-model trajectory of the target qubit plus a steady-state summary
// ("<stem>.summary.json").
inline int cmd_simulate(const ExperimentConfig& input, const RunOptions& opts, std::ostream& err = std::cerr) {
    return detail::guarded(err, [&] {
        ExperimentConfig cfg = input;
        if (opts.seed) cfg.seed = *opts.seed;
        const ClassifierConfig classifier = cfg.classifier();
        const CollisionSettings settings = cfg.collision_settings();
        if (!(classifier.coupling_norm_sq() > 0.0)) {
            throw ConfigError("all couplings are zero; the target never reaches a steady state");
        }
        detail::print_warnings(classifier, err);
        require_writable_parent(opts.out);

        const auto result = evolve_to_steady(classifier, settings);
        std::ostringstream csv;
        csv << "collision,sz,sy,trace_distance_step\n";
        for (const auto& s : result.trajectory) {
            csv << s.collision_index << ',' << fmt::sci(s.sz) << ',' << fmt::sci(s.sy) << ','
                << fmt::sci(s.trace_distance_step) << '\n';
        }
        const double sz = expect(result.steady, pauli::z());
        const double sy = expect(result.steady, pauli::y());
        nlohmann::json summary = {
            {"status", result.converged ? "Converged" : "MaxCollisions"},
            {"final_cost", nullptr},
            {"final_actual", sz},
            {"episodes", nullptr},
            {"collisions_used", result.collisions_used},
            {"converged", result.converged},
            {"sz", sz},
            {"sy", sy},
            {"decision", static_cast<int>(classify(sz))},
            {"mode", to_string(settings.mode)},
            {"analytic_sz", steady_sz(classifier.reservoirs)},
            {"analytic_sy", steady_sy(classifier)},
        };
        write_text_file(opts.out, csv.str());
        write_text_file(sibling_path(opts.out, ".summary.json"), summary.dump(2) + "\n");
        if (opts.require_converged && !result.converged) {
            err << "numerical failure: no steady state within " << settings.max_collisions
                << " collisions\n";
            return int{kExitNumericalFailure};
        }
        return int{kExitOk};
    });
}

}  // namespace qdc
