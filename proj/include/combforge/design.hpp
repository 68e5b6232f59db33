#pragma once

#include "combforge/comb.hpp"
#include "combforge/entangle.hpp"

#include <string>
#include <vector>

namespace cf {

// Two-photon target over sidebands [−n_max, n_max]; psi(n1 + n_max, n2 + n_max).
struct DesignTarget {
    int n_max = 0;
    double modulation_frequency = 1.0;
    int samples = 1024;
    ComplexMatrix psi;
};

struct DesignResult {
    double modulation_frequency = 1.0;
    std::vector<double> t;
    std::vector<std::vector<double>> profiles;  // ω⁽¹⁾(t), ω⁽²⁾(t)
    std::vector<FrequencyComb> ideal_combs;     // step-2 combs before discarding the decay part
    std::vector<double> takagi_values;          // λ⁽¹⁾ ≥ λ⁽²⁾, normalized target
    ComplexMatrix achieved;                     // normalized, target window
    double fidelity = 0.0;
    double imaginary_residual = 0.0;  // rms of the discarded decay-rate modulation
};

struct Takagi {
    RealVector values;      // descending
    ComplexMatrix vectors;  // psi = V diag(values) Vᵀ
};
// Symmetric factorization of a complex symmetric matrix.
Takagi takagi(const ComplexMatrix& psi, double sym_tol = 1e-10);

DesignResult design_modulation(const DesignTarget& target);
double design_fidelity(const ComplexMatrix& target, const ComplexMatrix& achieved);
// Comb of each sampled profile, then the pair state on [−n_max, n_max].
ComplexMatrix forward_emission(const std::vector<ModulationProfile>& profiles, double Omega, int n_max);

DesignTarget load_design_target(const std::string& path);
DesignTarget parse_design_target(const std::string& json_text);
std::string design_result_json(const DesignResult& r);

}  // namespace cf
