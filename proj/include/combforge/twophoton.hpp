#pragma once

#include "combforge/spectral.hpp"

#include <vector>

namespace cf {

struct PairResolvent {
    double eps = 0.0;         // possibly shifted off a degenerate pair energy
    bool shifted = false;
    ComplexMatrix inv;        // (2ε − H⊗I − I⊗H)⁻¹, pair index i*N + j
};

PairResolvent pair_resolvent(const EffectiveHamiltonian& h, double eps);
ComplexMatrix vertex_m(const EffectiveHamiltonian& h, double eps);
ComplexMatrix vertex_m1(const EffectiveHamiltonian& h, double eps, const std::vector<cplx>& u, double Omega);

// 2π δ(ω_slot′ − frequency) · weight
struct DeltaTerm {
    int slot = 1;
    double frequency = 0.0;
    cplx weight;
};

struct TwoPhotonAmplitude {
    enum class Kind { s0, s1 };
    Kind kind = Kind::s0;
    double w1p = 0, w2p = 0, w1 = 0, w2 = 0;
    cplx value;                      // incoherent part
    std::vector<DeltaTerm> coherent; // weights exclude the 2π factor
};

TwoPhotonAmplitude amplitude_s0(const EffectiveHamiltonian& h, double w1p, double w2p, double w1, double w2);
TwoPhotonAmplitude amplitude_s1(const EffectiveHamiltonian& h, const std::vector<cplx>& u, double Omega,
                                double w1p, double w2p, double w1, double w2);

enum class FourierMethod { residue, quadrature };

// ∫ S₁ᵢₙc(ω, 2ε+Ω−ω; ε, ε) e^{−iωτ} dω/2π
cplx incoherent_transform(const EffectiveHamiltonian& h, const std::vector<cplx>& u, double Omega, double eps,
                          double tau, FourierMethod method = FourierMethod::residue);

std::vector<double> filtered_g2_01(const EffectiveHamiltonian& h, const std::vector<cplx>& u, double Omega,
                                   double eps, const std::vector<double>& taus,
                                   FourierMethod method = FourierMethod::residue);

}  // namespace cf
