#pragma once

#include "combforge/numerics.hpp"

#include <optional>
#include <string>
#include <vector>

namespace cf {

struct QubitSpec {
    double phase = 0.0;              // φ_i = ω₀ z_i / c [rad]
    double nonradiative_rate = 0.0;  // [γ₁D]

    bool operator==(const QubitSpec&) const = default;
};

struct ModulationProfile {
    enum class Kind { harmonic, sampled };
    Kind kind = Kind::harmonic;
    double amplitude = 0.0;       // A
    double phase = 0.0;           // α
    std::vector<double> samples;  // one period, uniform grid, sampled kind only

    static ModulationProfile harmonic(double a, double alpha) { return {Kind::harmonic, a, alpha, {}}; }
    static ModulationProfile sampled(std::vector<double> s) { return {Kind::sampled, 0.0, 0.0, std::move(s)}; }

    bool operator==(const ModulationProfile&) const = default;
};

struct DriveSpec {
    double epsilon = 0.0;  // drive frequency ε
    double rabi = 1e-3;    // Ω_R

    bool operator==(const DriveSpec&) const = default;
};

struct DetectorSpec {
    int n1 = 0;
    int n2 = 0;
    double gamma_d = 5.0;

    bool operator==(const DetectorSpec&) const = default;
};

struct SystemConfig {
    std::vector<QubitSpec> qubits;
    double omega0 = 0.0;
    double gamma1d = 1.0;
    double modulation_frequency = 1.0;  // Ω
    std::vector<ModulationProfile> modulations;
    DriveSpec drive;
    std::optional<DetectorSpec> detectors;

    std::size_t size() const { return qubits.size(); }
    double period() const { return 2.0 * pi / modulation_frequency; }
    bool operator==(const SystemConfig&) const = default;
};

// Throws ConfigError naming the offending field.
void validate(const SystemConfig& cfg);

SystemConfig parse_config(const std::string& text);
SystemConfig load_config(const std::string& path);
std::string save_config(const SystemConfig& cfg);
// Stable key=value listing, one per line.
std::string echo_config(const SystemConfig& cfg);

double modulation_value(const ModulationProfile& m, double omega, double t);

// Complex weights u_k with A_k(t) = u_k e^{−iΩt} + c.c. (harmonic profiles only).
std::vector<cplx> modulation_weights(const SystemConfig& cfg);

// Parses "1.5", "pi", "-pi/2", "2pi/3", "0.5*pi".
double parse_angle(const std::string& s);

// Convenience constructor for N qubits with common settings.
SystemConfig make_config(std::size_t n, double omega, double amplitude, const std::vector<double>& alphas,
                         double epsilon, double rabi = 1e-3, double gamma_nr = 0.0,
                         const std::vector<double>& phases = {});

}  // namespace cf
