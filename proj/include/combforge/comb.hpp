#pragma once

#include "combforge/model.hpp"
#include "combforge/numerics.hpp"

#include <vector>

namespace cf {

// Sideband amplitudes a_n, n ∈ [−n_max, n_max], with Σ_n a_n e^{−inΩt} = exp(−i∫ω dt).
struct FrequencyComb {
    int qubit = 0;
    int n_max = 0;
    std::vector<cplx> a;

    cplx at(int n) const { return std::abs(n) > n_max ? cplx{} : a[n + n_max]; }
    std::size_t size() const { return a.size(); }
    double weight() const;
};

int default_window(const ModulationProfile& m, double Omega);

FrequencyComb comb_coefficients(const ModulationProfile& m, double Omega, int n_max = -1);
// One comb per qubit on a common window (the widest default).
std::vector<FrequencyComb> combs_from_config(const SystemConfig& cfg, int n_max = -1);

// |Σ_i a_n⁽ⁱ⁾|²
double intensity_one_photon(const std::vector<FrequencyComb>& combs, int n);
// |Σ_{a≠b} a_{n1}⁽ᵃ⁾ a_{n2}⁽ᵇ⁾|²
double intensity_two_photon(const std::vector<FrequencyComb>& combs, int n1, int n2);

enum class G2Flag { finite, bunching, indeterminate };

struct CombG2 {
    G2Flag flag = G2Flag::finite;
    double value = 0.0;  // meaningful for finite only
};

CombG2 filtered_g2_analytic(const std::vector<FrequencyComb>& combs, int n1, int n2);

struct SidebandCell {
    int n1 = 0, n2 = 0;
    CombG2 g2;
};
std::vector<SidebandCell> sideband_map(const SystemConfig& cfg, int n_lo, int n_hi);

}  // namespace cf
