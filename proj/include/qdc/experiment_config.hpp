#pragma once

// Flat key-value experiment configuration.
//
//   # comment
//   tau = 3
//   reservoir.1.theta = 170     # degrees; or reservoir.1.sz = 0.95
//   reservoir.1.phi = 0         # degrees
//   reservoir.1.g = 0.05
//   train.eta = 0.5, 0.25, 1.0
//
// Angles are degrees in this format and radians everywhere else.

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "qdc/collision.hpp"
#include "qdc/errors.hpp"
#include "qdc/io.hpp"
#include "qdc/model.hpp"
#include "qdc/trainer.hpp"

namespace qdc {

inline constexpr std::size_t kMaxSurfacePoints = 1000000;

struct ReservoirInput {
    double theta_deg = 0.0;
    double phi_deg = 0.0;
    double g = 0.0;
};

struct GridAxis {
    double min = 0.0;
    double max = 0.0;
    std::size_t steps = 0;

    std::vector<double> values() const { return linspace(min, max, steps); }
};

struct SurfaceGrid {
    TrainableParam kind = TrainableParam::CouplingG;
    GridAxis axis1;
    GridAxis axis2;

    void validate() const {
        for (const GridAxis* a : {&axis1, &axis2}) {
            if (a->steps < 2) throw ConfigError("surface: each axis needs steps >= 2");
            if (!(a->min < a->max)) throw ConfigError("surface: axis min must be < max");
        }
        if (axis1.steps > kMaxSurfacePoints / axis2.steps) {
            throw ConfigError("surface: grid of " + std::to_string(axis1.steps) + " x " +
                              std::to_string(axis2.steps) + " points refused (limit " +
                              std::to_string(kMaxSurfacePoints) + ")");
        }
    }
};

inline TrainableParam parse_param_kind(std::string_view s) {
    if (s == "g") return TrainableParam::CouplingG;
    if (s == "theta") return TrainableParam::Theta;
    if (s == "phi") return TrainableParam::Phi;
    throw ConfigError("parameter kind must be one of g|theta|phi, got '" + std::string(s) + "'");
}

inline CollisionMode parse_collision_mode(std::string_view s) {
    if (s == "simultaneous") return CollisionMode::Simultaneous;
    if (s == "mixture") return CollisionMode::Mixture;
    throw ConfigError("collision.mode must be simultaneous|mixture, got '" + std::string(s) + "'");
}

inline const char* to_string(CollisionMode m) {
    return m == CollisionMode::Simultaneous ? "simultaneous" : "mixture";
}

struct ExperimentConfig {
    std::vector<ReservoirInput> reservoirs;
    double tau = 3.0;
    double r = 0.36;
    double target_theta_deg = 90.0;
    double target_phi_deg = 0.0;
    std::uint64_t seed = 0;

    CollisionSettings collision;

    std::optional<TrainableParam> train_param;
    std::vector<double> eta;
    std::optional<double> desired;
    std::size_t max_episodes = TrainSettings{}.max_episodes;
    double cost_tol = TrainSettings{}.cost_tol;

    double fig1_g = 0.01;
    std::size_t fig1_points = 21;

    std::optional<SurfaceGrid> surface;

    // Radians inside; validates every value.
    ClassifierConfig classifier() const {
        ClassifierConfig c;
        c.tau = tau;
        c.r = r;
        c.target_init = bloch_density(BlochAngles::from_degrees(target_theta_deg, target_phi_deg));
        for (const auto& in : reservoirs) {
            c.reservoirs.emplace_back(BlochAngles::from_degrees(in.theta_deg, in.phi_deg), in.g);
        }
        c.validate();
        return c;
    }

    CollisionSettings collision_settings() const {
        CollisionSettings s = collision;
        s.seed = seed;
        s.validate();
        return s;
    }

    TrainSettings train_settings(double learning_rate) const {
        if (!desired) throw ConfigError("train.desired is required");
        TrainSettings t;
        t.eta = learning_rate;
        t.max_episodes = max_episodes;
        t.cost_tol = cost_tol;
        t.desired = *desired;
        t.validate();
        return t;
    }
};

namespace detail {

struct ReservoirDraft {
    std::optional<double> theta_deg;
    std::optional<double> sz;
    std::optional<double> phi_deg;
    std::optional<double> g;
};

inline GridAxis parse_axis(std::string_view value, const std::string& key) {
    const auto parts = split(value, ',');
    if (parts.size() != 3) throw ConfigError(key + ": expected 'min, max, steps'");
    return {parse_double(parts[0], key), parse_double(parts[1], key),
            static_cast<std::size_t>(parse_unsigned(parts[2], key))};
}

}  // namespace detail

inline ExperimentConfig parse_experiment_config(std::string_view text) {
    ExperimentConfig cfg;
    std::map<std::size_t, detail::ReservoirDraft> drafts;
    std::map<std::string, bool> seen;
    std::optional<TrainableParam> surface_param;
    std::optional<GridAxis> axis1, axis2;

    std::size_t line_no = 0;
    for (auto raw : split(text, '\n')) {
        ++line_no;
        auto line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        const std::string where = "line " + std::to_string(line_no);
        if (eq == std::string_view::npos) throw ConfigError(where + ": expected 'key = value'");
        const std::string key(trim(line.substr(0, eq)));
        const std::string_view value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(where + ": empty key");
        if (value.empty()) throw ConfigError(where + ": empty value for '" + key + "'");
        if (seen[key]) throw ConfigError(where + ": duplicate key '" + key + "'");
        seen[key] = true;

        auto num = [&] { return parse_double(value, key); };
        auto count = [&] { return static_cast<std::size_t>(parse_unsigned(value, key)); };

        if (key.rfind("reservoir.", 0) == 0) {
            const auto rest = std::string_view(key).substr(10);
            const auto dot = rest.find('.');
            if (dot == std::string_view::npos) throw ConfigError(where + ": unknown key '" + key + "'");
            const auto index = parse_unsigned(rest.substr(0, dot), key);
            if (index < 1) throw ConfigError(where + ": reservoirs are numbered from 1");
            const auto field = rest.substr(dot + 1);
            auto& d = drafts[index];
            if (field == "theta") d.theta_deg = num();
            else if (field == "sz") d.sz = num();
            else if (field == "phi") d.phi_deg = num();
            else if (field == "g") d.g = num();
            else throw ConfigError(where + ": unknown key '" + key + "'");
        } else if (key == "tau") cfg.tau = num();
        else if (key == "r") cfg.r = num();
        else if (key == "target.theta") cfg.target_theta_deg = num();
        else if (key == "target.phi") cfg.target_phi_deg = num();
        else if (key == "seed") cfg.seed = parse_unsigned(value, key);
        else if (key == "collision.max_collisions") cfg.collision.max_collisions = count();
        else if (key == "collision.steady_tol") cfg.collision.steady_tol = num();
        else if (key == "collision.record_stride") cfg.collision.record_stride = count();
        else if (key == "collision.mode") cfg.collision.mode = parse_collision_mode(value);
        else if (key == "train.param") cfg.train_param = parse_param_kind(value);
        else if (key == "train.eta") cfg.eta = parse_double_list(value, key);
        else if (key == "train.desired") cfg.desired = num();
        else if (key == "train.max_episodes") cfg.max_episodes = count();
        else if (key == "train.cost_tol") cfg.cost_tol = num();
        else if (key == "fig1.g") cfg.fig1_g = num();
        else if (key == "fig1.points") cfg.fig1_points = count();
        else if (key == "surface.param") surface_param = parse_param_kind(value);
        else if (key == "surface.axis1") axis1 = detail::parse_axis(value, key);
        else if (key == "surface.axis2") axis2 = detail::parse_axis(value, key);
        else throw ConfigError(where + ": unknown key '" + key + "'");
    }

    std::size_t expected = 1;
    for (const auto& [index, d] : drafts) {
        const std::string name = "reservoir." + std::to_string(index);
        if (index != expected++) throw ConfigError(name + ": reservoir numbering must be contiguous from 1");
        if (d.theta_deg && d.sz) throw ConfigError(name + ": give either theta or sz, not both");
        if (!d.theta_deg && !d.sz) throw ConfigError(name + ": theta (or sz) is required");
        if (!d.g) throw ConfigError(name + ".g is required");
        ReservoirInput in;
        if (d.sz) {
            if (!(*d.sz >= -1.0 && *d.sz <= 1.0)) throw ConfigError(name + ".sz must lie in [-1, 1]");
            in.theta_deg = rad_to_deg(std::acos(*d.sz));
        } else {
            in.theta_deg = *d.theta_deg;
        }
        in.phi_deg = d.phi_deg.value_or(0.0);
        in.g = *d.g;
        cfg.reservoirs.push_back(in);
    }

    if (surface_param || axis1 || axis2) {
        if (!surface_param || !axis1 || !axis2) {
            throw ConfigError("surface: surface.param, surface.axis1 and surface.axis2 go together");
        }
        SurfaceGrid grid{*surface_param, *axis1, *axis2};
        grid.validate();
        cfg.surface = grid;
    }
    return cfg;
}

inline std::string serialize_experiment_config(const ExperimentConfig& cfg) {
    using fmt::shortest;
    std::ostringstream out;
    out << "tau = " << shortest(cfg.tau) << '\n';
    out << "r = " << shortest(cfg.r) << '\n';
    out << "target.theta = " << shortest(cfg.target_theta_deg) << '\n';
    out << "target.phi = " << shortest(cfg.target_phi_deg) << '\n';
    out << "seed = " << cfg.seed << '\n';
    for (std::size_t i = 0; i < cfg.reservoirs.size(); ++i) {
        const auto& res = cfg.reservoirs[i];
        const std::string p = "reservoir." + std::to_string(i + 1);
        out << p << ".theta = " << shortest(res.theta_deg) << '\n';
        out << p << ".phi = " << shortest(res.phi_deg) << '\n';
        out << p << ".g = " << shortest(res.g) << '\n';
    }
    out << "collision.max_collisions = " << cfg.collision.max_collisions << '\n';
    out << "collision.steady_tol = " << shortest(cfg.collision.steady_tol) << '\n';
    out << "collision.record_stride = " << cfg.collision.record_stride << '\n';
    out << "collision.mode = " << to_string(cfg.collision.mode) << '\n';
    if (cfg.train_param) out << "train.param = " << to_string(*cfg.train_param) << '\n';
    if (!cfg.eta.empty()) {
        out << "train.eta = ";
        for (std::size_t i = 0; i < cfg.eta.size(); ++i) out << (i ? ", " : "") << shortest(cfg.eta[i]);
        out << '\n';
    }
    if (cfg.desired) out << "train.desired = " << shortest(*cfg.desired) << '\n';
    out << "train.max_episodes = " << cfg.max_episodes << '\n';
    out << "train.cost_tol = " << shortest(cfg.cost_tol) << '\n';
    out << "fig1.g = " << shortest(cfg.fig1_g) << '\n';
    out << "fig1.points = " << cfg.fig1_points << '\n';
    if (cfg.surface) {
        const auto& s = *cfg.surface;
        out << "surface.param = " << to_string(s.kind) << '\n';
        for (const auto& [name, a] : {std::pair{"surface.axis1", s.axis1}, std::pair{"surface.axis2", s.axis2}}) {
            out << name << " = " << shortest(a.min) << ", " << shortest(a.max) << ", " << a.steps << '\n';
        }
    }
    return out.str();
}

}  // namespace qdc
