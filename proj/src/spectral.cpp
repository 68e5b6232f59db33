#include "combforge/spectral.hpp"

#include <Eigen/LU>

#include <cmath>
#include <sstream>

namespace cf {

ComplexVector EffectiveHamiltonian::phase_vector() const
{
    ComplexVector p(phases.size());
    for (std::size_t j = 0; j < phases.size(); ++j) p(j) = std::exp(I * phases[j]);
    return p;
}

EffectiveHamiltonian build_hamiltonian(const std::vector<double>& phases, const std::vector<double>& gamma_nr,
                                       double omega0, double gamma1d)
{
    const auto n = static_cast<Eigen::Index>(phases.size());
    EffectiveHamiltonian h;
    h.phases = phases;
    h.gamma1d = gamma1d;
    h.h.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            h.h(i, j) = -I * gamma1d * std::exp(I * std::fabs(phases[i] - phases[j]));
            if (i == j) h.h(i, j) += omega0 - I * (gamma_nr.empty() ? 0.0 : gamma_nr[i]);
        }
    return h;
}

EffectiveHamiltonian build_hamiltonian(const SystemConfig& cfg)
{
    std::vector<double> ph, nr;
    for (const auto& q : cfg.qubits) {
        ph.push_back(q.phase);
        nr.push_back(q.nonradiative_rate);
    }
    return build_hamiltonian(ph, nr, cfg.omega0, cfg.gamma1d);
}

GreenFunction green(const EffectiveHamiltonian& h, cplx omega)
{
    const auto n = h.size();
    ComplexMatrix a = omega * ComplexMatrix::Identity(n, n) - h.h;
    Eigen::PartialPivLU<ComplexMatrix> lu(a);
    const double rc = lu.rcond();
    if (!(rc > 1e-14)) {
        std::ostringstream os;
        os << "green: omega=" << omega << " coincides with an eigenvalue of H (rcond=" << rc << ")";
        throw DomainError(os.str());
    }
    return {omega, lu.inverse()};
}

ComplexVector s_plus(const GreenFunction& g, const std::vector<double>& phases)
{
    ComplexVector p(phases.size());
    for (std::size_t j = 0; j < phases.size(); ++j) p(j) = std::exp(I * phases[j]);
    return g.g * p;
}

ComplexVector s_plus(const EffectiveHamiltonian& h, cplx omega) { return s_plus(green(h, omega), h.phases); }

cplx reflection(const EffectiveHamiltonian& h, double omega)
{
    const ComplexVector p = h.phase_vector();
    const ComplexVector s = green(h, omega).g * p;
    return -I * h.gamma1d * p.transpose() * s;
}

cplx stokes_reflection_r1(const EffectiveHamiltonian& h, double omega, const std::vector<cplx>& u, double Omega)
{
    if (u.size() != static_cast<std::size_t>(h.size())) throw DomainError("stokes_reflection_r1: u size mismatch");
    const ComplexVector a = s_plus(h, omega + Omega);
    const ComplexVector b = s_plus(h, omega);
    cplx r{};
    for (std::size_t k = 0; k < u.size(); ++k) r += u[k] * a(k) * b(k);
    return h.gamma1d * r;
}

cplx homogeneous_sideband_matrix(const std::function<cplx(double)>& r, double u, double Omega, int n,
                                 double omega)
{
    const double x = 2.0 * u / Omega;
    const int kmax = static_cast<int>(std::ceil(std::fabs(x))) + 40;
    const int nmax = kmax + std::abs(n);
    const auto tab = bessel_j_table(nmax, std::fabs(x));
    auto J = [&](int m) {
        const int am = std::abs(m);
        double v = tab[am];
        if ((am % 2) && ((m < 0) != (x < 0.0))) v = -v;
        return v;
    };
    cplx s{};
    for (int k = -kmax; k <= kmax; ++k) {
        const double w = J(n + k) * J(k);
        if (w != 0.0) s += w * r(omega - k * Omega);
    }
    return s;
}

}  // namespace cf
