#pragma once

#include "combforge/model.hpp"
#include "combforge/numerics.hpp"

#include <cstdint>
#include <vector>

namespace cf {

// Graded representation: ρ_ab = s^{|a|+|b|} ρ̃_ab, |a| = excitation number, s ≈ Ω_R/γ₁D.
// Every operator below acts on ρ̃ stored column-major as a vector of length dim².
class LiouvilleOperator {
public:
    int sites() const { return n_sites_; }
    int system_sites() const { return n_sys_; }
    std::size_t dim() const { return states_.size(); }
    double scale() const { return s_; }
    double period() const { return 2.0 * pi / omega_; }
    const std::vector<std::uint32_t>& states() const { return states_; }
    int excitations(std::size_t a) const { return pop_[a]; }
    int index_of(std::uint32_t state) const { return index_[state]; }

    // Y = L̃(t) X, one density matrix per column (OpenMP over columns and rows).
    void apply(double t, const ComplexMatrix& X, ComplexMatrix& Y) const;
    // Scaled effective Hamiltonian H̃ − iK̃ acting on state vectors (weak-drive column).
    void apply_column(double t, const ComplexMatrix& X, ComplexMatrix& Y) const;
    // Dense superoperator assembled from Kronecker products (serial reference).
    ComplexMatrix dense(double t) const;

    // ρ = S ρ̃ S
    ComplexMatrix to_physical(const ComplexMatrix& rho_scaled) const;
    ComplexMatrix from_physical(const ComplexMatrix& rho) const;
    // Σ_a s^{2|a|} ρ̃_aa
    cplx physical_trace(const ComplexMatrix& rho_scaled) const;

    // Lowering operator a = i Σ_j w_j σ_j restricted to the basis, unscaled entries.
    ComplexMatrix lowering(const std::vector<cplx>& weights) const;
    ComplexMatrix sigma(int site) const;

    friend LiouvilleOperator build_liouvillian(const SystemConfig& cfg, bool include_detectors,
                                               int max_excitations);

private:
    void energies(double t, std::vector<cplx>& e) const;

    int n_sys_ = 0, n_sites_ = 0;
    double omega_ = 1.0, s_ = 1.0;
    std::vector<std::uint32_t> states_;
    std::vector<int> index_, pop_;
    std::vector<ModulationProfile> mod_;  // per site
    std::vector<double> detuning_;        // static rotating-frame energies
    Eigen::MatrixXd gamma_;               // γ_jk
    Eigen::MatrixXd exchange_;            // γ₁D sin|φ_j − φ_k|
    std::vector<cplx> drive_;             // coefficient of σ_j†
    std::vector<cplx> diag0_;             // static part of H̃_eff diagonal
    // row-compressed off-diagonal H̃_eff
    std::vector<std::size_t> row_ptr_;
    std::vector<std::uint32_t> col_;
    std::vector<cplx> val_;
    // jumps: a → a + j
    std::vector<std::size_t> up_ptr_;
    std::vector<std::uint32_t> up_site_, up_state_;
};

LiouvilleOperator build_liouvillian(const SystemConfig& cfg, bool include_detectors, int max_excitations = -1);

struct PeriodicTrajectory {
    std::vector<double> t;
    std::vector<ComplexMatrix> rho;  // scaled representation
    double residual = 0.0;           // ‖ρ(T) − ρ(0)‖₁, physical
    double scaled_residual = 0.0;    // max |Δρ̃| / max |ρ̃|
};

PeriodicTrajectory periodic_steady_state(const LiouvilleOperator& L, double rtol = 1e-9, int samples = 256);

struct PeriodicColumn {
    std::vector<double> t;
    std::vector<ComplexVector> v;  // scaled coherences ρ̃_{a,0}
    double residual = 0.0;
};
// Leading weak-drive order: ρ_{a0} obeys i dv/dt = (H − iK) v with v_ground ≡ 1.
PeriodicColumn weak_drive_column(const LiouvilleOperator& L, double rtol = 1e-9, int samples = 256);

struct CorrelationRecord {
    std::vector<double> t;
    std::vector<double> tau;
    std::vector<std::vector<double>> g2;  // [tau][t]
    int n_max = 0;
    std::vector<std::vector<cplx>> harmonics;  // [tau][n + n_max], g = Σ g_n e^{−inΩt}
    double denominator = 0.0;                  // ⟨a†a⟩₀ / s²

    cplx harmonic(int n, std::size_t tau_index = 0) const { return harmonics[tau_index][n + n_max]; }
};

struct CorrelationOptions {
    int samples = 256;
    std::vector<double> tau{0.0};
    int n_max = 8;
    double rtol = 1e-9;
};

CorrelationRecord g2_time_resolved(const SystemConfig& cfg, const CorrelationOptions& opt = {});

struct FirstOrderRecord {
    std::vector<double> t;
    std::vector<cplx> g1;  // −2iγ₁D⟨a(t)⟩/Ω_R
    int n_max = 0;
    std::vector<cplx> harmonics;
};
FirstOrderRecord g1_time_resolved(const SystemConfig& cfg, int n_max = 4, double rtol = 1e-9);

struct SmallAHarmonics {
    cplx g0;
    cplx g_minus1;
    cplx g_plus1;
};
SmallAHarmonics g2_harmonic_small_A(const SystemConfig& cfg);

enum class DetectorMethod { density_matrix, weak_drive };

struct DetectorCorrelation {
    double g2 = 0.0;
    double n3 = 0.0;   // period-averaged detector populations, unit s²
    double n4 = 0.0;
    double n34 = 0.0;  // ⟨σ₃†σ₄†σ₄σ₃⟩, unit s⁴
    double max_population = 0.0;  // physical
    bool saturated = false;
};

DetectorCorrelation filtered_g2_detectors(const SystemConfig& cfg, DetectorMethod method = DetectorMethod::weak_drive,
                                          double rtol = 1e-9, int max_excitations = 2);

// Sideband pair amplitude ψ_{n1,n2}: harmonic n1+n2 of the doubly-excited detector coherence.
cplx detector_pair_amplitude(const SystemConfig& cfg, double rtol = 1e-9);

}  // namespace cf
