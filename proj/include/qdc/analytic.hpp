#pragma once

// Closed-form steady state of the target qubit and the binary decision rule.

#include <algorithm>
#include <cmath>
#include <span>
#include <string>

#include "qdc/errors.hpp"
#include "qdc/linalg.hpp"
#include "qdc/model.hpp"

namespace qdc {

namespace detail {

inline double coupling_norm_sq(std::span<const ReservoirSpec> reservoirs) {
    double s = 0.0;
    for (const auto& r : reservoirs) s += r.g() * r.g();
    if (reservoirs.empty() || !(s > 0.0)) {
        throw NumericalError("steady state undefined: all couplings are zero");
    }
    return s;
}

}  // namespace detail

// sum_i g_i^2 cos(theta_i) / sum_i g_i^2
inline double steady_sz(std::span<const ReservoirSpec> reservoirs) {
    const double norm = detail::coupling_norm_sq(reservoirs);
    double s = 0.0;
    for (const auto& r : reservoirs) s += r.g() * r.g() * std::cos(r.bloch().theta());
    return s / norm;
}

// gamma = r tau sum_i g_i <sigma_i^->
inline Complex steady_coherence_rate(const ClassifierConfig& config) {
    Complex s{0.0, 0.0};
    for (const auto& r : config.reservoirs) s += r.g() * reservoir_expectations(r.bloch()).s_minus;
    return config.r * config.tau * s;
}

// Coherence factor (r tau sum_i g_i sin(theta_i) cos(phi_i)) times the
// steady magnetization, with overall minus sign.
inline double steady_sy(const ClassifierConfig& config) {
    const double magnetization = steady_sz(config.reservoirs);
    double coherence = 0.0;
    for (const auto& r : config.reservoirs) {
        coherence += r.g() * std::sin(r.bloch().theta()) * std::cos(r.bloch().phi());
    }
    return -config.r * config.tau * coherence * magnetization;
}

// Term-by-term two-reservoir expansion of steady_sy; kept as an independent
// evaluation path for cross-checking.
inline double steady_sy_two_reservoirs(double g1, double g2, double theta1, double theta2,
                                       double phi1, double phi2, double r, double tau) {
    const double den = g1 * g1 + g2 * g2;
    if (!(den > 0.0)) throw NumericalError("steady state undefined: all couplings are zero");
    const double st1 = std::sin(theta1), ct1 = std::cos(theta1);
    const double st2 = std::sin(theta2), ct2 = std::cos(theta2);
    const double cp1 = std::cos(phi1), cp2 = std::cos(phi2);
    const double num = g1 * g1 * g1 * st1 * ct1 * cp1 + g1 * g2 * g2 * st1 * ct2 * cp1 +
                       g1 * g1 * g2 * ct1 * st2 * cp2 + g2 * g2 * g2 * st2 * ct2 * cp2;
    return -r * tau * num / den;
}

// Populations are the g^2-weighted reservoir populations; the coherence is
// i * gamma * <sigma_z>_ss on |e><g|. Throws when r*tau is large enough to
// push the perturbative state outside the physical state space.
inline DensityMatrix steady_rho(const ClassifierConfig& config) {
    const double norm = detail::coupling_norm_sq(config.reservoirs);
    double pe = 0.0;
    double pg = 0.0;
    for (const auto& r : config.reservoirs) {
        const double c = std::cos(r.bloch().theta());
        pe += r.g() * r.g() * 0.5 * (1.0 + c);
        pg += r.g() * r.g() * 0.5 * (1.0 - c);
    }
    pe /= norm;
    pg /= norm;
    const Complex coherence = Complex{0.0, 1.0} * steady_coherence_rate(config) * (pe - pg);
    ComplexMatrix m{{pe, coherence}, {std::conj(coherence), pg}};
    const double det_margin = pe * pg - std::norm(coherence);
    if (det_margin < -kPositivityTol) {
        throw NumericalError("steady_rho: coherence |rho_eg|^2 = " +
                             std::to_string(std::norm(coherence)) + " exceeds p_e p_g = " +
                             std::to_string(pe * pg) +
                             "; r*tau is outside the perturbative regime");
    }
    return DensityMatrix::validated(std::move(m));
}

enum class Label : int { Zero = 0, One = 1 };

inline Label classify(double value) {
    if (!std::isfinite(value)) throw ContractError("classify: non-finite value");
    return value >= 0.0 ? Label::Zero : Label::One;
}

struct SteadyReadout {
    double sz;
    double sy;
    Label decision;
};

inline SteadyReadout steady_readout(const ClassifierConfig& config, PauliAxis decide_on = PauliAxis::Z) {
    const double sz = steady_sz(config.reservoirs);
    const double sy = steady_sy(config);
    return {sz, sy, classify(decide_on == PauliAxis::Z ? sz : sy)};
}

}  // namespace qdc
