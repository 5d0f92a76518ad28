#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "qdc/errors.hpp"
#include "qdc/linalg.hpp"

namespace qdc {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Couplings above this value leave the weak-coupling regime the model
// assumes; reported as a warning only.
inline constexpr double kWeakCouplingBound = 0.1;

inline double deg_to_rad(double deg) { return deg * (kPi / 180.0); }
inline double rad_to_deg(double rad) { return rad * (180.0 / kPi); }

// phi reduced to [0, 2pi).
inline double wrap_two_pi(double phi) {
    double w = std::fmod(phi, kTwoPi);
    if (w < 0.0) w += kTwoPi;
    if (w >= kTwoPi) w = 0.0;
    return w;
}

// Polar/azimuthal angles of a pure qubit state, radians.
class BlochAngles {
public:
    BlochAngles() = default;

    BlochAngles(double theta, double phi) : theta_(theta), phi_(phi) {
        if (!std::isfinite(theta) || !std::isfinite(phi)) {
            throw ConfigError("BlochAngles: non-finite angle");
        }
        // Allow the rounding of an exact pi through degree conversion.
        constexpr double slack = 1e-12;
        if (theta < -slack || theta > kPi + slack) {
            throw ConfigError("BlochAngles: theta = " + std::to_string(theta) +
                              " rad is outside [0, pi]");
        }
        theta_ = std::clamp(theta, 0.0, kPi);
        phi_ = wrap_two_pi(phi);
    }

    static BlochAngles from_degrees(double theta_deg, double phi_deg) {
        return {deg_to_rad(theta_deg), deg_to_rad(phi_deg)};
    }

    // Same physical state for any real theta: rho(theta, phi) with theta
    // outside [0, pi] equals rho(theta', phi + pi) for the reflected theta'.
    static BlochAngles canonical(double theta, double phi) {
        if (!std::isfinite(theta) || !std::isfinite(phi)) {
            throw ConfigError("BlochAngles: non-finite angle");
        }
        double t = wrap_two_pi(theta);
        double p = phi;
        if (t > kPi) {
            t = kTwoPi - t;
            p += kPi;
        }
        return {t, p};
    }

    double theta() const noexcept { return theta_; }
    double phi() const noexcept { return phi_; }

    friend bool operator==(const BlochAngles&, const BlochAngles&) = default;

private:
    double theta_ = 0.0;
    double phi_ = 0.0;
};

class ReservoirSpec {
public:
    ReservoirSpec() = default;
    ReservoirSpec(BlochAngles bloch, double g) : bloch_(bloch), g_(g) {
        if (!std::isfinite(g) || g < 0.0) {
            throw ConfigError("ReservoirSpec: coupling g must be finite and >= 0, got " +
                              std::to_string(g));
        }
    }

    const BlochAngles& bloch() const noexcept { return bloch_; }
    double g() const noexcept { return g_; }
    bool beyond_weak_coupling() const noexcept { return g_ > kWeakCouplingBound; }

    ReservoirSpec with_g(double g) const { return {bloch_, g}; }
    ReservoirSpec with_bloch(BlochAngles b) const { return {b, g_}; }

    friend bool operator==(const ReservoirSpec&, const ReservoirSpec&) = default;

private:
    BlochAngles bloch_;
    double g_ = 0.0;
};

// rho = [[(1+cos t)/2, e^{-i p} sin t / 2], [e^{i p} sin t / 2, (1-cos t)/2]]
inline DensityMatrix bloch_density(const BlochAngles& b) {
    const double c = std::cos(b.theta());
    const double s = std::sin(b.theta());
    const Complex coh = std::polar(0.5 * s, -b.phi());
    ComplexMatrix m{{0.5 * (1.0 + c), coh}, {std::conj(coh), 0.5 * (1.0 - c)}};
    return DensityMatrix::unchecked(std::move(m));
}

struct ReservoirExpectations {
    double sz;
    Complex s_plus;   // <sigma+>, lower-left matrix element
    Complex s_minus;  // <sigma->, upper-right matrix element
};

inline ReservoirExpectations reservoir_expectations(const BlochAngles& b) {
    const double s = std::sin(b.theta());
    return {std::cos(b.theta()), std::polar(0.5 * s, b.phi()), std::polar(0.5 * s, -b.phi())};
}

enum class PauliAxis { Z, Y };

inline ComplexMatrix pauli_matrix(PauliAxis axis) {
    return axis == PauliAxis::Z ? pauli::z() : pauli::y();
}

inline const char* to_string(PauliAxis axis) { return axis == PauliAxis::Z ? "z" : "y"; }

struct ClassifierConfig {
    std::vector<ReservoirSpec> reservoirs;
    double tau = 3.0;
    double r = 0.36;
    DensityMatrix target_init = bloch_density(BlochAngles{kPi / 2.0, 0.0});

    void validate() const {
        if (reservoirs.empty()) throw ConfigError("ClassifierConfig: at least one reservoir required");
        if (!(tau > 0.0) || !std::isfinite(tau)) throw ConfigError("ClassifierConfig: tau must be > 0");
        if (!(r > 0.0) || !std::isfinite(r)) throw ConfigError("ClassifierConfig: r must be > 0");
        if (target_init.dim() != 2) throw ConfigError("ClassifierConfig: target must be a qubit");
        target_init.validate();
    }

    double coupling_norm_sq() const {
        double s = 0.0;
        for (const auto& res : reservoirs) s += res.g() * res.g();
        return s;
    }

    std::vector<std::string> warnings() const {
        std::vector<std::string> out;
        for (std::size_t i = 0; i < reservoirs.size(); ++i) {
            if (reservoirs[i].beyond_weak_coupling()) {
                out.push_back("reservoir " + std::to_string(i + 1) + ": g = " +
                              std::to_string(reservoirs[i].g()) +
                              " exceeds the weak-coupling bound " +
                              std::to_string(kWeakCouplingBound));
            }
        }
        return out;
    }
};

}  // namespace qdc
