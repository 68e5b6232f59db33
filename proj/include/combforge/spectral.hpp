#pragma once

#include "combforge/model.hpp"
#include "combforge/numerics.hpp"

#include <functional>
#include <vector>

namespace cf {

struct EffectiveHamiltonian {
    ComplexMatrix h;
    std::vector<double> phases;
    double gamma1d = 1.0;

    Eigen::Index size() const { return h.rows(); }
    ComplexVector phase_vector() const;  // e^{iφ_j}
};

struct GreenFunction {
    cplx omega;
    ComplexMatrix g;
};

EffectiveHamiltonian build_hamiltonian(const SystemConfig& cfg);
EffectiveHamiltonian build_hamiltonian(const std::vector<double>& phases, const std::vector<double>& gamma_nr,
                                       double omega0 = 0.0, double gamma1d = 1.0);

GreenFunction green(const EffectiveHamiltonian& h, cplx omega);
ComplexVector s_plus(const GreenFunction& g, const std::vector<double>& phases);
ComplexVector s_plus(const EffectiveHamiltonian& h, cplx omega);

cplx reflection(const EffectiveHamiltonian& h, double omega);
// γ₁D Σ_k u_k s⁺_k(ω+Ω) s⁺_k(ω)
cplx stokes_reflection_r1(const EffectiveHamiltonian& h, double omega, const std::vector<cplx>& u, double Omega);

// Σ_k J_{n+k}(2u/Ω) r(ω−kΩ) J_k(2u/Ω), |k| ≤ 2u/Ω + 40
cplx homogeneous_sideband_matrix(const std::function<cplx(double)>& r, double u, double Omega, int n,
                                 double omega);

}  // namespace cf
