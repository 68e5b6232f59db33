#include "combforge/entangle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace cf {

namespace {

void check_window(const std::vector<FrequencyComb>& combs)
{
    if (combs.empty()) throw DomainError("wavefunction: no combs");
}

int common_window(const std::vector<FrequencyComb>& combs)
{
    int n = 0;
    for (const auto& c : combs) n = std::max(n, c.n_max);
    return n;
}

ComplexVector padded(const FrequencyComb& c, int n_max)
{
    ComplexVector v = ComplexVector::Zero(2 * n_max + 1);
    for (int n = -n_max; n <= n_max; ++n) v(n + n_max) = c.at(n);
    return v;
}

// Enumerates ordered selections of `m` distinct labels out of `n`.
void selections(int n, int m, std::vector<int>& cur, std::vector<bool>& used,
                const std::function<void(const std::vector<int>&)>& visit)
{
    if (static_cast<int>(cur.size()) == m) {
        visit(cur);
        return;
    }
    for (int k = 0; k < n; ++k) {
        if (used[k]) continue;
        used[k] = true;
        cur.push_back(k);
        selections(n, m, cur, used, visit);
        cur.pop_back();
        used[k] = false;
    }
}

}  // namespace

cplx PhotonWavefunction::value(const std::vector<int>& n) const
{
    if (static_cast<int>(n.size()) != photons) throw DomainError("PhotonWavefunction::value: index count");
    const auto r = static_cast<std::size_t>(basis.cols());
    std::vector<cplx> rows(photons * r);
    for (int p = 0; p < photons; ++p) {
        if (std::abs(n[p]) > n_max) return {};
        for (std::size_t k = 0; k < r; ++k) rows[p * r + k] = basis(n[p] + n_max, static_cast<Eigen::Index>(k));
    }
    cplx s{};
    std::vector<std::size_t> idx(photons, 0);
    for (std::size_t flat = 0; flat < core.size(); ++flat) {
        std::size_t rem = flat;
        cplx term = core[flat];
        for (int p = photons - 1; p >= 0; --p) {
            term *= rows[p * r + rem % r];
            rem /= r;
        }
        s += term;
    }
    return s;
}

ComplexTensor PhotonWavefunction::dense() const
{
    ComplexTensor t = core;
    for (int p = 0; p < photons; ++p) t = mode_product(t, basis, static_cast<std::size_t>(p));
    return t;
}

ComplexMatrix PhotonWavefunction::matrix() const
{
    if (photons != 2) throw DomainError("PhotonWavefunction::matrix: two photons required");
    const auto r = basis.cols();
    ComplexMatrix c(r, r);
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < r; ++j) c(i, j) = core[static_cast<std::size_t>(i * r + j)];
    return basis * c * basis.transpose();
}

PhotonWavefunction multiphoton_wavefunction(const std::vector<FrequencyComb>& combs, int photons)
{
    check_window(combs);
    const int N = static_cast<int>(combs.size());
    if (photons < 2) throw DomainError("multiphoton_wavefunction: at least two photons");
    if (photons > N) throw DomainError("multiphoton_wavefunction: more photons than qubits");
    if (N > 5) throw DomainError("multiphoton_wavefunction: at most five qubits");

    const int n_max = common_window(combs);
    ComplexMatrix A(2 * n_max + 1, N);
    for (int i = 0; i < N; ++i) A.col(i) = padded(combs[i], n_max);
    const auto sv = svd(A);
    Eigen::Index r = 0;
    while (r < sv.s.size() && sv.s(r) > 1e-12 * sv.s(0)) ++r;

    PhotonWavefunction psi;
    psi.photons = photons;
    psi.n_max = n_max;
    psi.basis = sv.u.leftCols(r);
    const ComplexMatrix B = psi.basis.adjoint() * A;  // r × N coordinates
    psi.core = ComplexTensor(std::vector<std::size_t>(photons, static_cast<std::size_t>(r)));

    std::vector<int> cur;
    std::vector<bool> used(N, false);
    const auto ru = static_cast<std::size_t>(r);
    selections(N, photons, cur, used, [&](const std::vector<int>& sel) {
        for (std::size_t flat = 0; flat < psi.core.size(); ++flat) {
            std::size_t rem = flat;
            cplx term = 1.0;
            for (int p = photons - 1; p >= 0; --p) {
                term *= B(static_cast<Eigen::Index>(rem % ru), sel[p]);
                rem /= ru;
            }
            psi.core[flat] += term;
        }
    });
    const double nrm = psi.core.norm();
    if (!(nrm > 1e-14)) throw DomainError("multiphoton_wavefunction: degenerate state, all amplitudes cancel");
    for (auto& v : psi.core.data) v /= nrm;
    psi.normalized = true;
    return psi;
}

PhotonWavefunction pair_wavefunction(const std::vector<FrequencyComb>& combs)
{
    if (combs.size() < 2) throw DomainError("pair_wavefunction: at least two qubits");
    return multiphoton_wavefunction(combs, 2);
}

PhotonWavefunction project_photon(const PhotonWavefunction& psi, const FrequencyComb& comb)
{
    if (psi.photons < 3) throw DomainError("project_photon: need at least three photons");
    const ComplexVector a = padded(comb, psi.n_max);
    const ComplexMatrix row = (psi.basis.adjoint() * a).adjoint();  // 1 × r
    ComplexTensor t = mode_product(psi.core, row, 0);
    PhotonWavefunction out;
    out.photons = psi.photons - 1;
    out.n_max = psi.n_max;
    out.basis = psi.basis;
    out.core = ComplexTensor(std::vector<std::size_t>(t.shape.begin() + 1, t.shape.end()));
    out.core.data = t.data;
    const double nrm = out.core.norm();
    if (!(nrm > 1e-14)) throw DomainError("project_photon: projection vanishes");
    for (auto& v : out.core.data) v /= nrm;
    out.normalized = true;
    return out;
}

EntropyReport entropy_from_weights(std::vector<double> w)
{
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    if (!(total > 0.0)) throw DomainError("entropy: zero state");
    EntropyReport r;
    std::sort(w.begin(), w.end(), std::greater<>());
    for (double v : w) {
        const double p = v / total;
        if (p < 1e-14) continue;
        r.weights.push_back(p);
        r.entropy -= p * std::log(p);
    }
    r.exp_entropy = std::exp(r.entropy);
    return r;
}

EntropyReport entropy_svd(const ComplexMatrix& psi)
{
    const auto sv = svd(psi);
    std::vector<double> w;
    for (Eigen::Index k = 0; k < sv.s.size(); ++k) w.push_back(sv.s(k) * sv.s(k));
    return entropy_from_weights(std::move(w));
}

EntropyReport entropy_svd(const PhotonWavefunction& psi)
{
    if (psi.photons != 2) throw DomainError("entropy_svd: two photons required");
    const auto r = psi.basis.cols();
    ComplexMatrix c(r, r);
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < r; ++j) c(i, j) = psi.core[static_cast<std::size_t>(i * r + j)];
    return entropy_svd(c);
}

EntropyReport entropy_hosvd(const ComplexTensor& psi, std::size_t axis)
{
    if (axis >= psi.order()) throw DomainError("entropy_hosvd: axis out of range");
    const auto sv = svd(unfold(psi, axis));
    std::vector<double> w;
    for (Eigen::Index k = 0; k < sv.s.size(); ++k) w.push_back(sv.s(k) * sv.s(k));
    return entropy_from_weights(std::move(w));
}

EntropyReport entropy_hosvd(const PhotonWavefunction& psi)
{
    const auto r = entropy_hosvd(psi.core, psi.core.order() - 1);
#ifndef NDEBUG
    for (std::size_t ax = 0; ax + 1 < psi.core.order(); ++ax)
        if (std::fabs(entropy_hosvd(psi.core, ax).entropy - r.entropy) > 1e-9)
            throw DomainError("entropy_hosvd: state is not symmetric under photon exchange");
#endif
    return r;
}

cplx comb_overlap(const FrequencyComb& c1, const FrequencyComb& c2)
{
    const int n_max = std::max(c1.n_max, c2.n_max);
    cplx x{};
    for (int n = -n_max; n <= n_max; ++n) x += std::conj(c1.at(n)) * c2.at(n);
    return x;
}

std::pair<double, double> pair_singular_values_from_overlap(double x)
{
    if (std::fabs(x) > 1.0) throw DomainError("pair_singular_values_from_overlap: |x| > 1");
    const double d = std::sqrt(2.0 * (1.0 + x * x));
    return {std::fabs(1.0 + x) / d, std::fabs(1.0 - x) / d};
}

double orthogonality_metric_x(const std::vector<double>& alphas, double amplitude, double Omega)
{
    double X = 0.0;
    for (std::size_t i = 0; i < alphas.size(); ++i)
        for (std::size_t j = i + 1; j < alphas.size(); ++j) {
            const double v = bessel_j(0, 2.0 * amplitude / Omega * std::sin(0.5 * (alphas[i] - alphas[j])));
            X += v * v;
        }
    return X;
}

double orthogonality_metric_x(const std::vector<FrequencyComb>& combs)
{
    double X = 0.0;
    for (std::size_t i = 0; i < combs.size(); ++i)
        for (std::size_t j = i + 1; j < combs.size(); ++j) X += std::norm(comb_overlap(combs[i], combs[j]));
    return X;
}

}  // namespace cf
