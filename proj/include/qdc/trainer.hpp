#pragma once

// Gradient-descent training of the classifier's steady-state readout.
//
// A run adjusts one parameter family (couplings, polar angles or azimuthal
// angles) to bring the steady expectation of the associated Pauli observable
// to a desired value, minimising C = (desired - actual)^2 / 2.

#include <array>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "qdc/analytic.hpp"
#include "qdc/errors.hpp"
#include "qdc/model.hpp"

namespace qdc {

enum class TrainableParam { CouplingG, Theta, Phi };

inline PauliAxis observable_for(TrainableParam p) {
    return p == TrainableParam::Phi ? PauliAxis::Y : PauliAxis::Z;
}

inline const char* to_string(TrainableParam p) {
    switch (p) {
        case TrainableParam::CouplingG: return "g";
        case TrainableParam::Theta: return "theta";
        case TrainableParam::Phi: return "phi";
    }
    return "?";
}

// Default central-difference steps: couplings and angles live on very
// different scales.
inline constexpr double kCouplingStep = 1e-7;
inline constexpr double kAngleStep = 1e-6;

inline double default_fd_step(TrainableParam p) {
    return p == TrainableParam::CouplingG ? kCouplingStep : kAngleStep;
}

// Divergence guard: stop once the cost exceeds this multiple of its
// initial value.
inline constexpr double kDivergenceFactor = 10.0;

struct TrainSettings {
    double eta = 0.0;
    std::size_t max_episodes = 10000;
    double cost_tol = 1e-10;
    double desired = 0.0;

    void validate() const {
        // eta == 0 is accepted and reproduces the initial state every episode.
        if (!(eta >= 0.0) || !std::isfinite(eta)) throw ConfigError("TrainSettings: eta must be >= 0");
        if (!(cost_tol > 0.0)) throw ConfigError("TrainSettings: cost_tol must be > 0");
        if (max_episodes < 1) throw ConfigError("TrainSettings: max_episodes must be >= 1");
        if (!(desired >= -1.0 && desired <= 1.0)) {
            throw ConfigError("TrainSettings: desired expectation must lie in [-1, 1]");
        }
    }
};

struct TrainRecord {
    std::size_t episode;
    std::vector<double> params;
    double actual;
    double cost;
};

struct TrainEvent {
    std::size_t episode;
    std::string message;
};

enum class TrainStatus { Converged, MaxEpisodes, Diverged };

inline const char* to_string(TrainStatus s) {
    switch (s) {
        case TrainStatus::Converged: return "Converged";
        case TrainStatus::MaxEpisodes: return "MaxEpisodes";
        case TrainStatus::Diverged: return "Diverged";
    }
    return "?";
}

struct TrainOutcome {
    std::vector<TrainRecord> records;
    TrainStatus status = TrainStatus::MaxEpisodes;
    std::vector<TrainEvent> events;
    // Episodes whose cost exceeded the previous one ("overshooting").
    std::size_t cost_increases = 0;

    bool overshoot() const noexcept { return cost_increases > 0; }
    const TrainRecord& final_record() const { return records.back(); }
};

inline double cost(double desired, double actual) {
    const double d = desired - actual;
    return 0.5 * d * d;
}

// Central differences (f(x + h e_i) - f(x - h e_i)) / 2h.
template <class F>
std::vector<double> finite_diff_grad(F&& f, std::span<const double> x, double step) {
    if (!(step > 0.0)) throw ConfigError("finite_diff_grad: step must be > 0");
    std::vector<double> probe(x.begin(), x.end());
    std::vector<double> grad(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        probe[i] = x[i] + step;
        const double up = f(std::span<const double>(probe));
        probe[i] = x[i] - step;
        const double down = f(std::span<const double>(probe));
        probe[i] = x[i];
        grad[i] = (up - down) / (2.0 * step);
    }
    return grad;
}

// Raw (unconstrained) parameters as seen by the optimiser. Angles may leave
// their canonical ranges during training; every formula below depends on
// them only through sin/cos, so no canonicalisation is needed.
struct ParameterState {
    std::vector<double> g;
    std::vector<double> theta;
    std::vector<double> phi;
    double r = 0.36;
    double tau = 3.0;

    static ParameterState from(const ClassifierConfig& config) {
        ParameterState s;
        s.r = config.r;
        s.tau = config.tau;
        for (const auto& res : config.reservoirs) {
            s.g.push_back(res.g());
            s.theta.push_back(res.bloch().theta());
            s.phi.push_back(res.bloch().phi());
        }
        return s;
    }

    std::size_t size() const noexcept { return g.size(); }

    std::vector<double>& family(TrainableParam p) {
        return p == TrainableParam::CouplingG ? g : p == TrainableParam::Theta ? theta : phi;
    }
    const std::vector<double>& family(TrainableParam p) const {
        return p == TrainableParam::CouplingG ? g : p == TrainableParam::Theta ? theta : phi;
    }

    ClassifierConfig to_config(const DensityMatrix& target_init) const {
        ClassifierConfig c;
        c.r = r;
        c.tau = tau;
        c.target_init = target_init;
        for (std::size_t i = 0; i < size(); ++i) {
            c.reservoirs.emplace_back(BlochAngles::canonical(theta[i], phi[i]), std::max(0.0, g[i]));
        }
        return c;
    }

    double magnetization() const {
        double num = 0.0;
        double den = 0.0;
        for (std::size_t i = 0; i < size(); ++i) {
            num += g[i] * g[i] * std::cos(theta[i]);
            den += g[i] * g[i];
        }
        if (!(den > 0.0)) throw NumericalError("steady state undefined: all couplings are zero");
        return num / den;
    }

    double coherence_y() const {
        double coh = 0.0;
        for (std::size_t i = 0; i < size(); ++i) coh += g[i] * std::sin(theta[i]) * std::cos(phi[i]);
        return -r * tau * coh * magnetization();
    }

    double observable(PauliAxis axis) const {
        return axis == PauliAxis::Z ? magnetization() : coherence_y();
    }
};

namespace detail {

inline void require_two(std::size_t n, const char* what) {
    if (n != 2) throw ConfigError(std::string(what) + ": analytic gradient needs exactly 2 reservoirs");
}

inline double require_norm(double g1, double g2) {
    const double den = g1 * g1 + g2 * g2;
    if (!(den > 0.0)) throw NumericalError("gradient undefined: g1^2 + g2^2 = 0");
    return den;
}

// Derivatives of the observable A with respect to one family; the cost
// gradient is (desired - A) * (-dA).

// A = (g1^2 s1 + g2^2 s2) / (g1^2 + g2^2). The quotient-rule numerator
// 2 g1 s1 (g1^2 + g2^2) - 2 g1 (g1^2 s1 + g2^2 s2) reduces to
// 2 g1 g2^2 (s1 - s2); the reduced form avoids cancellation when s1 ~ s2.
inline std::array<double, 2> observable_slope_g(const ParameterState& p) {
    const double g1 = p.g[0], g2 = p.g[1];
    const double s1 = std::cos(p.theta[0]), s2 = std::cos(p.theta[1]);
    const double den = require_norm(g1, g2);
    return {2.0 * g1 * g2 * g2 * (s1 - s2) / (den * den), 2.0 * g2 * g1 * g1 * (s2 - s1) / (den * den)};
}

inline std::array<double, 2> observable_slope_theta(const ParameterState& p) {
    const double g1 = p.g[0], g2 = p.g[1];
    const double den = require_norm(g1, g2);
    return {-g1 * g1 * std::sin(p.theta[0]) / den, -g2 * g2 * std::sin(p.theta[1]) / den};
}

inline std::array<double, 2> observable_slope_phi(const ParameterState& p) {
    const double g1 = p.g[0], g2 = p.g[1];
    const double den = require_norm(g1, g2);
    const double rt = p.r * p.tau;
    const double st1 = std::sin(p.theta[0]), ct1 = std::cos(p.theta[0]);
    const double st2 = std::sin(p.theta[1]), ct2 = std::cos(p.theta[1]);
    const double sp1 = std::sin(p.phi[0]), sp2 = std::sin(p.phi[1]);
    return {rt * (g1 * g1 * g1 * st1 * ct1 * sp1 + g1 * g2 * g2 * st1 * ct2 * sp1) / den,
            rt * (g1 * g1 * g2 * ct1 * st2 * sp2 + g2 * g2 * g2 * st2 * ct2 * sp2) / den};
}

inline ParameterState state_of(std::span<const ReservoirSpec> reservoirs) {
    ClassifierConfig c;
    c.reservoirs.assign(reservoirs.begin(), reservoirs.end());
    return ParameterState::from(c);
}

}  // namespace detail

// The residual uses the same observable the training loop records, so a
// zero residual gives an exactly zero step.
inline std::vector<double> analytic_gradient(const ParameterState& p, TrainableParam kind,
                                             double desired) {
    std::array<double, 2> slope{};
    switch (kind) {
        case TrainableParam::CouplingG:
            detail::require_two(p.size(), "grad_g");
            slope = detail::observable_slope_g(p);
            break;
        case TrainableParam::Theta:
            detail::require_two(p.size(), "grad_theta");
            slope = detail::observable_slope_theta(p);
            break;
        case TrainableParam::Phi:
            detail::require_two(p.size(), "grad_phi");
            slope = detail::observable_slope_phi(p);
            break;
    }
    const double residual = desired - p.observable(observable_for(kind));
    return {residual * -slope[0], residual * -slope[1]};
}

inline std::array<double, 2> grad_g(std::span<const ReservoirSpec> reservoirs, double desired) {
    const auto v = analytic_gradient(detail::state_of(reservoirs), TrainableParam::CouplingG, desired);
    return {v[0], v[1]};
}

inline std::array<double, 2> grad_theta(std::span<const ReservoirSpec> reservoirs, double desired) {
    const auto v = analytic_gradient(detail::state_of(reservoirs), TrainableParam::Theta, desired);
    return {v[0], v[1]};
}

inline std::array<double, 2> grad_phi(const ClassifierConfig& config, double desired) {
    const auto v = analytic_gradient(ParameterState::from(config), TrainableParam::Phi, desired);
    return {v[0], v[1]};
}

// Cost as a function of one parameter family, others held at `base`.
inline auto family_cost(const ParameterState& base, TrainableParam kind, double desired) {
    return [base, kind, desired](std::span<const double> x) {
        ParameterState p = base;
        p.family(kind).assign(x.begin(), x.end());
        return cost(desired, p.observable(observable_for(kind)));
    };
}

// Analytic gradient for two reservoirs, central differences otherwise.
inline std::vector<double> training_gradient(const ParameterState& p, TrainableParam kind,
                                             double desired) {
    if (p.size() == 2) return analytic_gradient(p, kind, desired);
    const auto& x = p.family(kind);
    return finite_diff_grad(family_cost(p, kind, desired), x, default_fd_step(kind));
}

inline TrainOutcome gd_train(const ClassifierConfig& config, TrainableParam kind,
                             const TrainSettings& settings) {
    config.validate();
    settings.validate();

    const PauliAxis axis = observable_for(kind);
    ParameterState state = ParameterState::from(config);
    TrainOutcome out;
    double initial_cost = 0.0;
    bool theta_outside = false;

    for (std::size_t episode = 0;; ++episode) {
        double actual = 0.0;
        try {
            actual = state.observable(axis);
        } catch (const NumericalError& e) {
            out.events.push_back({episode, e.what()});
            out.status = TrainStatus::Diverged;
            break;
        }
        const double c = cost(settings.desired, actual);
        const auto& params = state.family(kind);
        out.records.push_back({episode, params, actual, c});

        bool finite = std::isfinite(c);
        for (double v : params) finite = finite && std::isfinite(v);
        if (!finite) {
            out.events.push_back({episode, "non-finite parameter or cost"});
            out.status = TrainStatus::Diverged;
            break;
        }
        if (episode == 0) {
            initial_cost = c;
        } else if (c > out.records[episode - 1].cost) {
            ++out.cost_increases;
        }
        if (c <= settings.cost_tol) {
            out.status = TrainStatus::Converged;
            break;
        }
        if (c > kDivergenceFactor * initial_cost) {
            out.events.push_back({episode, "cost exceeded " + std::to_string(kDivergenceFactor) +
                                               "x its initial value"});
            out.status = TrainStatus::Diverged;
            break;
        }
        if (episode == settings.max_episodes) {
            out.status = TrainStatus::MaxEpisodes;
            break;
        }

        const std::vector<double> grad = training_gradient(state, kind, settings.desired);
        auto& values = state.family(kind);
        for (std::size_t i = 0; i < values.size(); ++i) values[i] -= settings.eta * grad[i];

        switch (kind) {
            case TrainableParam::CouplingG:
                for (std::size_t i = 0; i < values.size(); ++i) {
                    if (values[i] < 0.0) {
                        out.events.push_back({episode + 1, "g" + std::to_string(i + 1) +
                                                               " clamped at 0 from " +
                                                               std::to_string(values[i])});
                        values[i] = 0.0;
                    }
                }
                break;
            case TrainableParam::Theta: {
                bool outside = false;
                for (double t : values) outside = outside || t < 0.0 || t > kPi;
                if (outside && !theta_outside) {
                    out.events.push_back({episode + 1, "warning: theta left [0, pi]"});
                }
                theta_outside = outside;
                break;
            }
            case TrainableParam::Phi:
                for (double& p : values) p = wrap_two_pi(p);
                break;
        }
    }
    return out;
}

}  // namespace qdc
