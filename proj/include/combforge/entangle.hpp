#pragma once

#include "combforge/comb.hpp"
#include "combforge/numerics.hpp"

#include <utility>
#include <vector>

namespace cf {

// M-photon state ψ = core ×₁ Q ×₂ Q ... ×_M Q, where the orthonormal columns of Q
// span the emitting combs. Stored compressed; dense() expands over the sideband window.
struct PhotonWavefunction {
    int photons = 0;
    int n_max = 0;
    ComplexMatrix basis;  // (2 n_max + 1) × r
    ComplexTensor core;   // r^M
    bool normalized = false;

    std::size_t window() const { return static_cast<std::size_t>(2 * n_max + 1); }
    double norm() const { return core.norm(); }
    cplx value(const std::vector<int>& n) const;
    ComplexTensor dense() const;
    ComplexMatrix matrix() const;  // M = 2 only
};

struct EntropyReport {
    std::vector<double> weights;  // |λ_ν|², descending, sum 1
    double entropy = 0.0;         // nats
    double exp_entropy = 1.0;
};

PhotonWavefunction pair_wavefunction(const std::vector<FrequencyComb>& combs);
PhotonWavefunction multiphoton_wavefunction(const std::vector<FrequencyComb>& combs, int photons);
// Contracts photon 1 with conj(comb); the result has M − 1 photons and is renormalized.
PhotonWavefunction project_photon(const PhotonWavefunction& psi, const FrequencyComb& comb);

EntropyReport entropy_from_weights(std::vector<double> w);
EntropyReport entropy_svd(const ComplexMatrix& psi);
EntropyReport entropy_svd(const PhotonWavefunction& psi);
EntropyReport entropy_hosvd(const ComplexTensor& psi, std::size_t axis);
EntropyReport entropy_hosvd(const PhotonWavefunction& psi);

cplx comb_overlap(const FrequencyComb& c1, const FrequencyComb& c2);
std::pair<double, double> pair_singular_values_from_overlap(double x);
// Σ_{i<j} J₀²(2A/Ω sin((α_i − α_j)/2))
double orthogonality_metric_x(const std::vector<double>& alphas, double amplitude, double Omega);
// Σ_{i<j} |(a⁽ⁱ⁾, a⁽ʲ⁾)|²
double orthogonality_metric_x(const std::vector<FrequencyComb>& combs);

}  // namespace cf
