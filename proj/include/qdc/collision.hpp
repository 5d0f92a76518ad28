#pragma once

// Repeated-interaction (collision model) evolution of the target qubit.
//
// Every round the target meets one fresh ancilla from each reservoir, the
// joint system evolves under the exchange Hamiltonian for time tau, and the
// ancillas are discarded. Evolution is in the resonant interaction picture,
// so only the exchange part of the Hamiltonian acts.

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "qdc/errors.hpp"
#include "qdc/linalg.hpp"
#include "qdc/model.hpp"

namespace qdc {

inline constexpr std::size_t kDefaultDimensionCap = std::size_t{1} << 12;

enum class CollisionMode {
    // Target couples to one ancilla of every reservoir at once.
    Simultaneous,
    // One reservoir per round, drawn with probability g_i^2 / sum g_j^2.
    Mixture,
};

struct CollisionSettings {
    std::size_t max_collisions = 200000;
    double steady_tol = 1e-9;
    std::size_t record_stride = 100;
    CollisionMode mode = CollisionMode::Simultaneous;
    std::uint64_t seed = 0;
    std::size_t dimension_cap = kDefaultDimensionCap;

    void validate() const {
        if (max_collisions < 1) throw ConfigError("CollisionSettings: max_collisions must be >= 1");
        if (!(steady_tol > 0.0)) throw ConfigError("CollisionSettings: steady_tol must be > 0");
        if (record_stride < 1) throw ConfigError("CollisionSettings: record_stride must be >= 1");
    }
};

struct TrajectorySample {
    std::size_t collision_index;
    double sz;
    double sy;
    double trace_distance_step;
};

using Trajectory = std::vector<TrajectorySample>;

// Operator acting on qubit `which` of an n-qubit register.
inline ComplexMatrix embed_qubit_operator(const ComplexMatrix& op, std::size_t which,
                                          std::size_t num_qubits) {
    std::vector<ComplexMatrix> factors(num_qubits, pauli::identity());
    factors.at(which) = op;
    return kron_all(factors);
}

// Exchange Hamiltonian sum_i g_i (s0+ si- + s0- si+) on target (x) ancilla_1
// (x) ... (x) ancilla_N.
inline ComplexMatrix build_hamiltonian(std::span<const ReservoirSpec> reservoirs,
                                       std::size_t dimension_cap = kDefaultDimensionCap) {
    if (reservoirs.empty()) throw ConfigError("build_hamiltonian: no reservoirs");
    const std::size_t num_qubits = reservoirs.size() + 1;
    if (num_qubits >= 63 || (std::size_t{1} << num_qubits) > dimension_cap) {
        throw ConfigError("build_hamiltonian: " + std::to_string(reservoirs.size()) +
                          " reservoirs exceed the dimension cap " + std::to_string(dimension_cap));
    }
    const std::size_t dim = std::size_t{1} << num_qubits;
    const ComplexMatrix target_up = embed_qubit_operator(pauli::plus(), 0, num_qubits);
    const ComplexMatrix target_down = embed_qubit_operator(pauli::minus(), 0, num_qubits);
    ComplexMatrix h(dim, dim);
    for (std::size_t i = 0; i < reservoirs.size(); ++i) {
        const double g = reservoirs[i].g();
        if (g == 0.0) continue;
        const ComplexMatrix anc_down = embed_qubit_operator(pauli::minus(), i + 1, num_qubits);
        const ComplexMatrix anc_up = embed_qubit_operator(pauli::plus(), i + 1, num_qubits);
        h += (target_up * anc_down + target_down * anc_up) * Complex{g};
    }
    return h;
}

inline ComplexMatrix build_hamiltonian(const ClassifierConfig& config,
                                       std::size_t dimension_cap = kDefaultDimensionCap) {
    return build_hamiltonian(std::span<const ReservoirSpec>(config.reservoirs), dimension_cap);
}

// Product state of one fresh ancilla per reservoir.
inline ComplexMatrix ancilla_state(std::span<const ReservoirSpec> reservoirs) {
    std::vector<ComplexMatrix> factors;
    factors.reserve(reservoirs.size());
    for (const auto& r : reservoirs) factors.push_back(bloch_density(r.bloch()).matrix());
    return kron_all(factors);
}

// Tr_ancillas[u (target (x) ancillas) u^dagger], literal form.
inline DensityMatrix collision_step(const DensityMatrix& target, const ClassifierConfig& config,
                                    const ComplexMatrix& u) {
    const ComplexMatrix anc = ancilla_state(config.reservoirs);
    if (target.dim() != 2 || u.rows() != 2 * anc.rows() || !u.is_square()) {
        throw ConfigError("collision_step: propagator dimension " + std::to_string(u.rows()) +
                          " does not match target (x) " + std::to_string(config.reservoirs.size()) +
                          " ancillas");
    }
    const DensityMatrix joint =
        DensityMatrix::unchecked(u * kron(target.matrix(), anc) * u.adjoint());
    std::vector<std::size_t> dims(config.reservoirs.size() + 1, 2);
    return partial_trace(joint, dims, 0);
}

// Everything a collision round needs, computed once per configuration.
class CollisionPropagator {
public:
    CollisionPropagator(std::span<const ReservoirSpec> reservoirs, double tau,
                        std::size_t dimension_cap = kDefaultDimensionCap)
        : u_(herm_expm(build_hamiltonian(reservoirs, dimension_cap), tau)),
          ancillas_(ancilla_state(reservoirs)) {}

    const ComplexMatrix& unitary() const noexcept { return u_; }
    const ComplexMatrix& ancillas() const noexcept { return ancillas_; }

    // Same map as collision_step; the second product and the trace over the
    // ancillas are fused so only the target block of u J u^dagger is formed.
    DensityMatrix apply(const DensityMatrix& target) const {
        const ComplexMatrix m = u_ * kron(target.matrix(), ancillas_);
        const std::size_t anc_dim = ancillas_.rows();
        const std::size_t dim = u_.rows();
        ComplexMatrix out(2, 2);
        for (std::size_t a = 0; a < 2; ++a)
            for (std::size_t b = a; b < 2; ++b) {
                Complex s{0.0, 0.0};
                for (std::size_t r = 0; r < anc_dim; ++r) {
                    const std::size_t row = a * anc_dim + r;
                    const std::size_t col = b * anc_dim + r;
                    for (std::size_t k = 0; k < dim; ++k) s += m(row, k) * std::conj(u_(col, k));
                }
                out(a, b) = s;
            }
        // Hermitian by construction; mirror the upper triangle.
        out(0, 0) = out(0, 0).real();
        out(1, 1) = out(1, 1).real();
        out(1, 0) = std::conj(out(0, 1));
        return DensityMatrix::unchecked(std::move(out));
    }

private:
    ComplexMatrix u_;
    ComplexMatrix ancillas_;
};

struct SteadyStateResult {
    DensityMatrix steady;
    std::size_t collisions_used;
    bool converged;
    Trajectory trajectory;
};

namespace detail {

// Stopping rule: the last step is below tolerance and so is the geometric
// tail sum_{k>n} d_k estimated from the contraction rate over recent windows.
class ConvergenceMonitor {
public:
    explicit ConvergenceMonitor(double tol) : tol_(tol), history_(2 * kWindow + 1, 0.0) {}

    bool push(double step) {
        history_[count_ % history_.size()] = step;
        ++count_;
        if (step == 0.0) return true;
        if (step >= tol_ || count_ < history_.size()) return false;
        const double older = at_lag(kWindow);
        const double oldest = at_lag(2 * kWindow);
        if (older <= 0.0 || oldest <= 0.0) return false;
        const double q = std::max(std::pow(step / older, 1.0 / kWindow),
                                  std::pow(older / oldest, 1.0 / kWindow));
        if (!(q < 1.0)) return false;
        return step * q / (1.0 - q) < tol_;
    }

private:
    static constexpr std::size_t kWindow = 64;

    double at_lag(std::size_t lag) const {
        return history_[(count_ - 1 - lag) % history_.size()];
    }

    double tol_;
    std::vector<double> history_;
    std::size_t count_ = 0;
};

inline TrajectorySample sample(std::size_t n, const DensityMatrix& rho, double step) {
    return {n, expect(rho, pauli::z()), expect(rho, pauli::y()), step};
}

}  // namespace detail

inline SteadyStateResult evolve_to_steady(const ClassifierConfig& config,
                                          const CollisionSettings& settings) {
    config.validate();
    settings.validate();

    std::vector<CollisionPropagator> propagators;
    std::discrete_distribution<std::size_t> pick;
    if (settings.mode == CollisionMode::Simultaneous) {
        propagators.emplace_back(config.reservoirs, config.tau, settings.dimension_cap);
    } else {
        std::vector<double> weights;
        for (const auto& r : config.reservoirs) {
            propagators.emplace_back(std::span<const ReservoirSpec>(&r, 1), config.tau,
                                     settings.dimension_cap);
            weights.push_back(r.g() * r.g());
        }
        if (config.coupling_norm_sq() == 0.0) {
            throw ConfigError("evolve_to_steady: mixture mode needs a nonzero coupling");
        }
        pick = std::discrete_distribution<std::size_t>(weights.begin(), weights.end());
    }
    std::mt19937_64 rng(settings.seed);

    DensityMatrix rho = config.target_init;
    Trajectory trajectory{detail::sample(0, rho, 0.0)};
    detail::ConvergenceMonitor monitor(settings.steady_tol);

    std::size_t n = 0;
    bool converged = false;
    double step = 0.0;
    while (n < settings.max_collisions) {
        const std::size_t which = propagators.size() == 1 ? 0 : pick(rng);
        DensityMatrix next = propagators[which].apply(rho);
        step = trace_distance(next, rho);
        rho = std::move(next);
        ++n;
        converged = monitor.push(step);
        if (n % settings.record_stride == 0 || converged) {
            trajectory.push_back(detail::sample(n, rho, step));
        }
        if (converged) break;
    }
    if (trajectory.back().collision_index != n) trajectory.push_back(detail::sample(n, rho, step));
    return {std::move(rho), n, converged, std::move(trajectory)};
}

struct SweepPoint {
    double delta_g_fraction;
    double steady_sz;
    std::size_t collisions_used;
    bool converged;
};

// Two reservoirs with g1 = g (1/2 - d), g2 = g (1/2 + d) for every grid value d.
inline std::vector<SweepPoint> magnetization_sweep(double g_total,
                                                   std::span<const double> delta_grid,
                                                   const ClassifierConfig& base_config,
                                                   const CollisionSettings& settings) {
    if (base_config.reservoirs.size() != 2) {
        throw ConfigError("magnetization_sweep: base configuration needs exactly 2 reservoirs");
    }
    if (!(g_total > 0.0)) throw ConfigError("magnetization_sweep: total coupling must be > 0");
    for (double d : delta_grid) {
        if (!(d >= -0.5 && d <= 0.5)) {
            throw ConfigError("magnetization_sweep: grid value " + std::to_string(d) +
                              " outside [-0.5, 0.5]");
        }
    }
    std::vector<SweepPoint> out;
    out.reserve(delta_grid.size());
    for (double d : delta_grid) {
        ClassifierConfig cfg = base_config;
        cfg.reservoirs[0] = cfg.reservoirs[0].with_g(std::max(0.0, g_total * (0.5 - d)));
        cfg.reservoirs[1] = cfg.reservoirs[1].with_g(std::max(0.0, g_total * (0.5 + d)));
        const auto res = evolve_to_steady(cfg, settings);
        out.push_back({d, expect(res.steady, pauli::z()), res.collisions_used, res.converged});
    }
    return out;
}

// n evenly spaced points from lo to hi inclusive.
inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
    if (n < 2) throw ConfigError("linspace: need at least 2 points");
    std::vector<double> v(n);
    for (std::size_t k = 0; k < n; ++k) {
        v[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
    }
    v.back() = hi;
    return v;
}

}  // namespace qdc
