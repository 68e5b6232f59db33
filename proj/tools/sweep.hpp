#pragma once

#include <string>
#include <vector>

namespace cf::cli {

// Grid and option values from the `sweep:` block of a config file.
struct Sweep {
    std::vector<double> alpha;
    std::vector<double> amplitude;
    std::vector<double> amplitude_over_omega;
    std::vector<double> epsilon;  // detuning ε − ω₀
    std::vector<double> phi;
    std::vector<double> tau{0.0};
    int n_lo = -4, n_hi = 4;
    int samples = 256;
    int harmonics = 8;
    int photons = 2;
    bool detector_route = false;
    bool cross_check = false;
    std::string method = "weak_drive";
    double fd_step = 1e-4;
};

// Lists accept numbers and angle strings ("pi/2"); {from, to, count} expands to a linear grid.
Sweep load_sweep(const std::string& path);

}  // namespace cf::cli
