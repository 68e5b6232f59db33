#include "combforge/design.hpp"

#include <json.hpp>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace cf {

namespace {

ComplexMatrix embed(const ComplexMatrix& m, int from, int to)
{
    ComplexMatrix out = ComplexMatrix::Zero(2 * to + 1, 2 * to + 1);
    const int w = std::min(from, to);
    for (int a = -w; a <= w; ++a)
        for (int b = -w; b <= w; ++b) out(a + to, b + to) = m(a + from, b + from);
    return out;
}

}  // namespace

Takagi takagi(const ComplexMatrix& psi, double sym_tol)
{
    if (psi.rows() != psi.cols()) throw DomainError("takagi: matrix must be square");
    const double scale = std::max(psi.norm(), 1e-300);
    if ((psi - psi.transpose()).norm() > sym_tol * scale) throw DomainError("takagi: matrix is not symmetric");
    const auto sv = svd(psi);
    const Eigen::Index n = psi.rows();
    Takagi t;
    t.values = sv.s;
    t.vectors = ComplexMatrix::Zero(n, n);
    Eigen::Index k = 0;
    while (k < n) {
        Eigen::Index e = k + 1;
        while (e < n && std::fabs(sv.s(e) - sv.s(k)) <= 1e-9 * std::max(sv.s(0), 1e-300)) ++e;
        const Eigen::Index m = e - k;
        const ComplexMatrix Uc = sv.u.middleCols(k, m);
        if (sv.s(k) <= 1e-14 * std::max(sv.s(0), 1e-300)) {
            t.vectors.middleCols(k, m) = Uc;  // null space, any basis
        } else {
            // Z = U_c† conj(V_c) is unitary and symmetric: Z = O D Oᵀ with O real orthogonal.
            const ComplexMatrix Z = Uc.adjoint() * sv.v.middleCols(k, m).conjugate();
            const Eigen::MatrixXd X = Z.real(), Y = Z.imag();
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (X + X.transpose()) +
                                                              0.5 * std::sqrt(2.0) * (Y + Y.transpose()));
            const Eigen::MatrixXd O = es.eigenvectors();
            const ComplexMatrix D = O.transpose().cast<cplx>() * Z * O.cast<cplx>();
            ComplexMatrix W = Uc * O.cast<cplx>();
            for (Eigen::Index j = 0; j < m; ++j) W.col(j) *= std::sqrt(D(j, j) / std::abs(D(j, j)));
            t.vectors.middleCols(k, m) = W;
        }
        k = e;
    }
    return t;
}

double design_fidelity(const ComplexMatrix& target, const ComplexMatrix& achieved)
{
    if (target.rows() != achieved.rows() || target.cols() != achieved.cols())
        throw DomainError("design_fidelity: window mismatch");
    const double a = target.norm(), b = achieved.norm();
    if (!(a > 0.0) || !(b > 0.0)) throw DomainError("design_fidelity: zero state");
    const cplx s = (target.conjugate().cwiseProduct(achieved)).sum();
    return std::norm(s) / (a * a * b * b);
}

ComplexMatrix forward_emission(const std::vector<ModulationProfile>& profiles, double Omega, int n_max)
{
    if (profiles.size() != 2) throw DomainError("forward_emission: two profiles required");
    std::vector<FrequencyComb> combs;
    int w = n_max;
    for (const auto& p : profiles) w = std::max(w, default_window(p, Omega));
    for (const auto& p : profiles) combs.push_back(comb_coefficients(p, Omega, w));
    const ComplexMatrix full = pair_wavefunction(combs).matrix();
    return embed(full, w, n_max);
}

DesignResult design_modulation(const DesignTarget& target)
{
    const int W = 2 * target.n_max + 1;
    if (target.psi.rows() != W || target.psi.cols() != W) throw DomainError("design_modulation: target shape");
    if (target.samples < 8) throw DomainError("design_modulation: too few samples");
    const double Omega = target.modulation_frequency;
    const double nrm = target.psi.norm();
    if (!(nrm > 0.0)) throw DomainError("design_modulation: zero target");
    const ComplexMatrix psi = target.psi / nrm;

    const auto tk = takagi(psi);
    int rank = 0;
    for (Eigen::Index k = 0; k < tk.values.size(); ++k)
        if (tk.values(k) > 1e-10 * tk.values(0)) ++rank;
    if (rank > 2) {
        std::ostringstream os;
        os << "design_modulation: target has Schmidt rank " << rank << "; realizing it requires at least " << rank
           << " qubits";
        throw DomainError(os.str());
    }

    DesignResult r;
    r.modulation_frequency = Omega;
    r.takagi_values = {tk.values(0), rank > 1 ? tk.values(1) : 0.0};
    const ComplexVector v1 = std::sqrt(r.takagi_values[0]) * tk.vectors.col(0);
    const ComplexVector v2 = std::sqrt(r.takagi_values[1]) * tk.vectors.col(1);

    const int K = target.samples;
    for (int k = 0; k < K; ++k) r.t.push_back(2.0 * pi * k / (K * Omega));
    double res2 = 0.0;
    std::vector<ModulationProfile> profiles;
    for (int sgn : {1, -1}) {
        ComplexVector a = v1 + static_cast<double>(sgn) * I * v2;
        a /= a.norm();
        FrequencyComb c;
        c.n_max = target.n_max;
        c.a.assign(a.data(), a.data() + a.size());
        r.ideal_combs.push_back(c);

        std::vector<double> w(K);
        double fmax = 0.0;
        std::vector<cplx> f(K), df(K);
        for (int k = 0; k < K; ++k) {
            for (int n = -target.n_max; n <= target.n_max; ++n) {
                const cplx e = a(n + target.n_max) * std::exp(-I * (n * Omega * r.t[k]));
                f[k] += e;
                df[k] += -I * (n * Omega) * e;
            }
            fmax = std::max(fmax, std::abs(f[k]));
        }
        for (int k = 0; k < K; ++k) {
            if (!(std::abs(f[k]) > 1e-12 * fmax)) {
                std::ostringstream os;
                os << "design_modulation: comb amplitude vanishes at t = " << r.t[k] << ", ln has a branch point";
                throw DomainError(os.str());
            }
            const cplx q = df[k] / f[k];  // ω = i q; real part kept, decay part Re q discarded
            w[k] = -q.imag();
            res2 += q.real() * q.real();
        }
        r.profiles.push_back(w);
        profiles.push_back(ModulationProfile::sampled(w));
    }
    r.imaginary_residual = std::sqrt(res2 / (2.0 * K));
    // The emitted pair is normalized over every sideband, not only the target window.
    int wide = target.n_max;
    for (const auto& p : profiles) wide = std::max(wide, default_window(p, Omega));
    const ComplexMatrix full = forward_emission(profiles, Omega, wide);
    r.fidelity = design_fidelity(embed(psi, target.n_max, wide), full);
    r.achieved = embed(full, wide, target.n_max);
    return r;
}

DesignTarget parse_design_target(const std::string& text)
{
    using nlohmann::json;
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("design target: ") + e.what());
    }
    DesignTarget t;
    try {
        t.modulation_frequency = j.value("modulation_frequency", 1.0);
        t.samples = j.value("samples", 1024);
        const auto& entries = j.at("entries");
        int n_max = j.value("n_max", 0);
        for (const auto& e : entries) n_max = std::max({n_max, std::abs(e.at(0).get<int>()), std::abs(e.at(1).get<int>())});
        t.n_max = n_max;
        t.psi = ComplexMatrix::Zero(2 * n_max + 1, 2 * n_max + 1);
        for (const auto& e : entries) {
            if (e.size() != 4) throw ConfigError("design target: entries are [n1, n2, re, im]");
            t.psi(e[0].get<int>() + n_max, e[1].get<int>() + n_max) += cplx(e[2].get<double>(), e[3].get<double>());
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("design target: ") + e.what());
    }
    if (!(t.modulation_frequency > 0.0)) throw ConfigError("design target: modulation_frequency must be positive");
    if (t.samples < 8) throw ConfigError("design target: samples must be at least 8");
    if ((t.psi - t.psi.transpose()).norm() > 1e-12 * std::max(t.psi.norm(), 1e-300))
        throw ConfigError("design target: psi(n1,n2) must equal psi(n2,n1)");
    return t;
}

DesignTarget load_design_target(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("design target: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_design_target(ss.str());
}

std::string design_result_json(const DesignResult& r)
{
    using nlohmann::json;
    json j;
    j["modulation_frequency"] = r.modulation_frequency;
    j["fidelity"] = r.fidelity;
    j["imaginary_residual"] = r.imaginary_residual;
    j["takagi_values"] = r.takagi_values;
    j["profiles"] = r.profiles;
    json ach = json::array();
    const int n_max = static_cast<int>(r.achieved.rows() - 1) / 2;
    for (int a = -n_max; a <= n_max; ++a)
        for (int b = -n_max; b <= n_max; ++b) {
            const cplx v = r.achieved(a + n_max, b + n_max);
            if (std::abs(v) > 1e-14) ach.push_back({a, b, v.real(), v.imag()});
        }
    j["achieved"] = ach;
    return j.dump(2);
}

}  // namespace cf
