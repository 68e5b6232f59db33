#include "combforge/twophoton.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <cmath>
#include <sstream>

namespace cf {

namespace {

void check_energy(double lhs, double rhs, double scale, const char* what)
{
    if (std::fabs(lhs - rhs) > 1e-12 * std::max({1.0, scale, std::fabs(rhs)})) {
        std::ostringstream os;
        os << what << ": energy mismatch " << lhs << " != " << rhs;
        throw DomainError(os.str());
    }
}

ComplexMatrix pair_operator(const EffectiveHamiltonian& h)
{
    const auto n = h.size();
    ComplexMatrix p = ComplexMatrix::Zero(n * n, n * n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            for (Eigen::Index k = 0; k < n; ++k) {
                p(i * n + j, k * n + j) += h.h(i, k);
                p(i * n + j, i * n + k) += h.h(j, k);
            }
    return p;
}

ComplexVector hadamard(const ComplexVector& a, const ComplexVector& b) { return a.cwiseProduct(b); }

ComplexVector to_vector(const std::vector<cplx>& u)
{
    ComplexVector v(u.size());
    for (std::size_t k = 0; k < u.size(); ++k) v(k) = u[k];
    return v;
}

}  // namespace

PairResolvent pair_resolvent(const EffectiveHamiltonian& h, double eps)
{
    const auto n = h.size();
    Eigen::ComplexEigenSolver<ComplexMatrix> es(h.h, false);
    const auto& lam = es.eigenvalues();
    double gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = 0; b < n; ++b) gap = std::min(gap, std::abs(2.0 * eps - lam(a) - lam(b)));
    PairResolvent r;
    r.eps = eps;
    if (gap < 1e-10) {
        r.eps = eps + 1e-8 * h.gamma1d;
        r.shifted = true;
    }
    ComplexMatrix a = 2.0 * r.eps * ComplexMatrix::Identity(n * n, n * n) - pair_operator(h);
    Eigen::PartialPivLU<ComplexMatrix> lu(a);
    if (!(lu.rcond() > 1e-15)) throw DomainError("pair_resolvent: degenerate pair energy");
    r.inv = lu.inverse();
    return r;
}

namespace {

ComplexMatrix diagonal_block(const ComplexMatrix& r, Eigen::Index n)
{
    ComplexMatrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) m(i, j) = r(i * n + i, j * n + j);
    return m;
}

}  // namespace

ComplexMatrix vertex_m(const EffectiveHamiltonian& h, double eps)
{
    const auto n = h.size();
    const ComplexMatrix minv = -diagonal_block(pair_resolvent(h, eps).inv, n);
    Eigen::PartialPivLU<ComplexMatrix> lu(minv);
    if (!(lu.rcond() > 1e-15)) throw DomainError("vertex_m: singular M^-1 (degenerate pair energy)");
    return lu.inverse();
}

ComplexMatrix vertex_m1(const EffectiveHamiltonian& h, double eps, const std::vector<cplx>& u, double Omega)
{
    const auto n = h.size();
    if (u.size() != static_cast<std::size_t>(n)) throw DomainError("vertex_m1: u size mismatch");
    const auto r0 = pair_resolvent(h, eps);
    const auto r1 = pair_resolvent(h, eps + 0.5 * Omega);
    ComplexMatrix du = ComplexMatrix::Zero(n * n, n * n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) du(i * n + j, i * n + j) = u[i];
    return diagonal_block(r1.inv * du * r0.inv, n);
}

TwoPhotonAmplitude amplitude_s0(const EffectiveHamiltonian& h, double w1p, double w2p, double w1, double w2)
{
    check_energy(w1p + w2p, w1 + w2, std::max(std::fabs(w1p), std::fabs(w2p)), "amplitude_s0");
    const double g = h.gamma1d;
    const ComplexMatrix m = vertex_m(h, 0.5 * (w1 + w2));
    const ComplexVector out = hadamard(s_plus(h, w1p), s_plus(h, w2p));
    const ComplexVector in = hadamard(s_plus(h, w1), s_plus(h, w2));
    TwoPhotonAmplitude a;
    a.kind = TwoPhotonAmplitude::Kind::s0;
    a.w1p = w1p, a.w2p = w2p, a.w1 = w1, a.w2 = w2;
    a.value = -2.0 * I * g * g * cplx(out.transpose() * m * in);
    const cplx rr = reflection(h, w1) * reflection(h, w2);
    a.coherent = {{1, w1, rr}, {1, w2, rr}};
    return a;
}

TwoPhotonAmplitude amplitude_s1(const EffectiveHamiltonian& h, const std::vector<cplx>& u, double Omega,
                                double w1p, double w2p, double w1, double w2)
{
    check_energy(w1p + w2p, w1 + w2 + Omega, std::max(std::fabs(w1p), std::fabs(w2p)), "amplitude_s1");
    const auto n = h.size();
    if (u.size() != static_cast<std::size_t>(n)) throw DomainError("amplitude_s1: u size mismatch");
    const double g = h.gamma1d;
    const double eps = 0.5 * (w1 + w2);
    const ComplexVector uv = to_vector(u);

    const ComplexMatrix m0 = vertex_m(h, eps);
    const ComplexMatrix mo = vertex_m(h, eps + 0.5 * Omega);
    const ComplexMatrix m1 = vertex_m1(h, eps, u, Omega);

    const ComplexVector s1p = s_plus(h, w1p), s2p = s_plus(h, w2p);
    const ComplexVector s1 = s_plus(h, w1), s2 = s_plus(h, w2);
    const ComplexVector in = hadamard(s1, s2);
    const ComplexVector out = hadamard(s1p, s2p);

    // emission-side insertion
    const ComplexVector hv = m0 * in;
    const ComplexMatrix ga = green(h, w1p - Omega).g;
    const ComplexMatrix gb = green(h, w2p - Omega).g;
    cplx ta = cplx(hadamard(uv, s1p).transpose() * ga * hadamard(hv, s2p)) +
              cplx(hadamard(uv, s2p).transpose() * gb * hadamard(hv, s1p));

    // absorption-side insertion
    const ComplexMatrix gc = green(h, w1 + Omega).g;
    const ComplexMatrix gd = green(h, w2 + Omega).g;
    const ComplexVector w = hadamard(s2, gc.transpose() * hadamard(uv, s1)) +
                            hadamard(s1, gd.transpose() * hadamard(uv, s2));
    const cplx tb = out.transpose() * mo * w;

    const cplx tc = out.transpose() * mo * m1 * m0 * in;

    TwoPhotonAmplitude a;
    a.kind = TwoPhotonAmplitude::Kind::s1;
    a.w1p = w1p, a.w2p = w2p, a.w1 = w1, a.w2 = w2;
    a.value = 2.0 * g * g * (ta + tb) + 4.0 * g * g * tc;
    const cplx c12 = reflection(h, w1) * stokes_reflection_r1(h, w2, u, Omega);
    const cplx c21 = reflection(h, w2) * stokes_reflection_r1(h, w1, u, Omega);
    a.coherent = {{1, w1, c12}, {2, w1, c12}, {1, w2, c21}, {2, w2, c21}};
    return a;
}

namespace {

cplx transform_residue(const EffectiveHamiltonian& h, const std::vector<cplx>& u, double Omega, double eps,
                       double tau)
{
    const auto n = h.size();
    const double g = h.gamma1d;
    const double E = 2.0 * eps;
    const double Ep = E + Omega;
    const ComplexVector uv = to_vector(u);
    const ComplexVector p = h.phase_vector();

    Eigen::ComplexEigenSolver<ComplexMatrix> es(h.h);
    const ComplexVector lam = es.eigenvalues();
    const ComplexMatrix V = es.eigenvectors();
    Eigen::PartialPivLU<ComplexMatrix> vlu(V);
    if (!(vlu.rcond() > 1e-10)) throw ConvergenceError("incoherent_transform: H is not diagonalizable");
    const ComplexMatrix W = vlu.inverse();
    const ComplexVector wp = W * p;

    for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = 0; b < n; ++b)
            if (std::abs(lam(a) - lam(b) - Omega) < 1e-10)
                throw ConvergenceError("incoherent_transform: coincident poles (Omega equals an eigenvalue gap)");

    // fixed vectors
    const ComplexVector se = s_plus(h, eps);
    const ComplexVector b = hadamard(se, se);
    const ComplexMatrix m0 = vertex_m(h, eps);
    const ComplexMatrix mo = vertex_m(h, eps + 0.5 * Omega);
    const ComplexMatrix m1 = vertex_m1(h, eps, u, Omega);
    const ComplexVector hv = m0 * b;
    const ComplexMatrix gq = green(h, eps + Omega).g;
    const ComplexVector wv = 2.0 * hadamard(se, gq.transpose() * hadamard(uv, se));
    const ComplexVector f = 2.0 * g * g * (mo * wv) + 4.0 * g * g * (mo * (m1 * hv));

    cplx total{};
    double scale = 0.0;
    std::vector<std::pair<cplx, cplx>> residues;  // (pole, residue)
    for (Eigen::Index m = 0; m < n; ++m) {
        const ComplexVector q = V.col(m) * wp(m);
        const ComplexVector sr = s_plus(h, Ep - lam(m));
        cplx res = f.transpose() * hadamard(q, sr);
        res += 2.0 * g * g * cplx(hadamard(uv, q).transpose() * green(h, lam(m) - Omega).g * hadamard(hv, sr));
        res += 2.0 * g * g * cplx(hadamard(uv, sr).transpose() * green(h, E - lam(m)).g * hadamard(hv, q));
        residues.emplace_back(lam(m), res);
        // pole of G(ω − Ω) at λ_m + Ω
        const ComplexVector left = hadamard(uv, s_plus(h, lam(m) + Omega));
        const ComplexVector right = hadamard(hv, s_plus(h, E - lam(m)));
        const cplx res2 = 2.0 * g * g * cplx(left.transpose() * V.col(m)) * cplx(W.row(m) * right);
        residues.emplace_back(lam(m) + Omega, res2);
    }
    for (const auto& [z, r] : residues) scale = std::max(scale, std::abs(r));
    for (const auto& [z, r] : residues) {
        if (z.imag() > -1e-13) {
            if (std::abs(r) > 1e-10 * scale)
                throw DomainError("incoherent_transform: pole on the real axis with finite weight");
            continue;
        }
        total += r * std::exp(-I * z * tau);
    }
    return -I * total;
}

// S₁ incoherent part along ω₁′ = ω, ω₂′ = 2ε + Ω − ω with both incoming photons at ε.
class S1Line {
public:
    S1Line(const EffectiveHamiltonian& h, const std::vector<cplx>& u, double Omega, double eps)
        : h_(h), uv_(to_vector(u)), Omega_(Omega), eps_(eps)
    {
        const double g = h.gamma1d;
        const ComplexVector se = s_plus(h, eps);
        const ComplexVector in = hadamard(se, se);
        const ComplexMatrix mo = vertex_m(h, eps + 0.5 * Omega);
        hv_ = vertex_m(h, eps) * in;
        const ComplexMatrix gq = green(h, eps + Omega).g;
        const ComplexVector w = 2.0 * hadamard(se, gq.transpose() * hadamard(uv_, se));
        // out-independent vector: out · f
        f_ = 2.0 * g * g * (mo * w) + 4.0 * g * g * (mo * (vertex_m1(h, eps, u, Omega) * hv_));
    }

    cplx operator()(double w) const
    {
        const double g = h_.gamma1d;
        const double w2 = 2.0 * eps_ + Omega_ - w;
        const ComplexVector s1p = s_plus(h_, w), s2p = s_plus(h_, w2);
        const cplx ta = cplx(hadamard(uv_, s1p).transpose() * green(h_, w - Omega_).g * hadamard(hv_, s2p)) +
                        cplx(hadamard(uv_, s2p).transpose() * green(h_, w2 - Omega_).g * hadamard(hv_, s1p));
        return 2.0 * g * g * ta + cplx(hadamard(s1p, s2p).transpose() * f_);
    }

private:
    const EffectiveHamiltonian& h_;
    ComplexVector uv_;
    double Omega_, eps_;
    ComplexVector hv_, f_;
};

cplx transform_quadrature(const EffectiveHamiltonian& h, const std::vector<cplx>& u, double Omega, double eps,
                          double tau)
{
    const double centre = eps + 0.5 * Omega;
    const double width = h.gamma1d;
    const S1Line F(h, u, Omega, eps);
    // leading 1/x² tail, removed analytically
    const double R = 1e5;
    const cplx c2 = 0.5 * R * R * (F(centre + R) + F(centre - R));
    auto rem = [&](double w) {
        const double x = w - centre;
        return (F(w) - c2 / (x * x + width * width)) * std::exp(-I * w * tau) / (2.0 * pi);
    };
    const cplx tail = c2 * std::exp(-I * centre * tau) * std::exp(-width * tau) / (2.0 * width);
    return integrate_real_line(rem, centre, width, 1e-11) + tail;
}

}  // namespace

cplx incoherent_transform(const EffectiveHamiltonian& h, const std::vector<cplx>& u, double Omega, double eps,
                          double tau, FourierMethod method)
{
    if (tau < 0.0) throw DomainError("incoherent_transform: tau must be >= 0");
    return method == FourierMethod::residue ? transform_residue(h, u, Omega, eps, tau)
                                            : transform_quadrature(h, u, Omega, eps, tau);
}

std::vector<double> filtered_g2_01(const EffectiveHamiltonian& h, const std::vector<cplx>& u, double Omega,
                                   double eps, const std::vector<double>& taus, FourierMethod method)
{
    const cplx r = reflection(h, eps);
    const cplx r1 = stokes_reflection_r1(h, eps, u, Omega);
    const double norm = 8.0 * std::norm(r) * std::norm(r1);
    if (!(norm > 1e-300)) throw DomainError("filtered_g2_01: vanishing normalization |r r1|");
    std::vector<double> out;
    out.reserve(taus.size());
    for (double tau : taus) {
        const cplx coh = 2.0 * r * r1 * (std::exp(-I * eps * tau) + std::exp(-I * (eps + Omega) * tau));
        out.push_back(std::norm(coh + incoherent_transform(h, u, Omega, eps, tau, method)) / norm);
    }
    return out;
}

}  // namespace cf
