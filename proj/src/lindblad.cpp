#include "combforge/lindblad.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <sstream>

namespace cf {

LiouvilleOperator build_liouvillian(const SystemConfig& cfg, bool include_detectors, int max_excitations)
{
    validate(cfg);
    if (include_detectors && !cfg.detectors) throw DomainError("build_liouvillian: config has no detectors");
    LiouvilleOperator L;
    L.n_sys_ = static_cast<int>(cfg.size());
    L.n_sites_ = L.n_sys_ + (include_detectors ? 2 : 0);
    if (L.n_sites_ > 8) throw DomainError("build_liouvillian: more than 8 qubits including detectors");
    L.omega_ = cfg.modulation_frequency;
    const double g = cfg.gamma1d;
    const double rabi = cfg.drive.rabi;
    L.s_ = (rabi > 0.0 && rabi < g) ? rabi / g : 1.0;

    const int n = L.n_sites_;
    std::vector<double> phase(n, 0.0), extra(n, 0.0);
    L.detuning_.assign(n, 0.0);
    L.drive_.assign(n, cplx{});
    L.mod_.assign(n, ModulationProfile::harmonic(0.0, 0.0));
    for (int j = 0; j < L.n_sys_; ++j) {
        phase[j] = cfg.qubits[j].phase;
        extra[j] = cfg.qubits[j].nonradiative_rate;
        L.detuning_[j] = cfg.omega0 - cfg.drive.epsilon;
        L.mod_[j] = cfg.modulations[j];
        L.drive_[j] = -I * (0.5 * rabi) * std::exp(I * phase[j]);
    }
    if (include_detectors) {
        const auto& d = *cfg.detectors;
        if (d.gamma_d < 0.0) throw DomainError("build_liouvillian: negative detector rate");
        L.detuning_[L.n_sys_] = d.n1 * cfg.modulation_frequency;
        L.detuning_[L.n_sys_ + 1] = d.n2 * cfg.modulation_frequency;
        extra[L.n_sys_] = extra[L.n_sys_ + 1] = d.gamma_d;
    }
    for (double e : extra)
        if (e < 0.0) throw DomainError("build_liouvillian: negative rate");

    L.gamma_.resize(n, n);
    L.exchange_.resize(n, n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            L.gamma_(j, k) = g * std::cos(phase[j] - phase[k]) + (j == k ? extra[j] : 0.0);
            L.exchange_(j, k) = j == k ? 0.0 : g * std::sin(std::fabs(phase[j] - phase[k]));
        }

    const std::uint32_t full = 1u << n;
    for (std::uint32_t m = 0; m < full; ++m)
        if (max_excitations < 0 || std::popcount(m) <= max_excitations) L.states_.push_back(m);
    std::stable_sort(L.states_.begin(), L.states_.end(),
                     [](auto a, auto b) { return std::popcount(a) < std::popcount(b); });
    L.index_.assign(full, -1);
    L.pop_.resize(L.states_.size());
    for (std::size_t a = 0; a < L.states_.size(); ++a) {
        L.index_[L.states_[a]] = static_cast<int>(a);
        L.pop_[a] = std::popcount(L.states_[a]);
    }

    const std::size_t d = L.states_.size();
    L.diag0_.assign(d, cplx{});
    L.row_ptr_.assign(1, 0);
    L.up_ptr_.assign(1, 0);
    for (std::size_t a = 0; a < d; ++a) {
        const std::uint32_t sa = L.states_[a];
        for (int j = 0; j < n; ++j)
            if (sa >> j & 1u) L.diag0_[a] += L.detuning_[j] - I * L.gamma_(j, j);
        for (int j = 0; j < n; ++j) {
            const bool has_j = sa >> j & 1u;
            if (has_j) {
                for (int k = 0; k < n; ++k) {
                    if (k == j || (sa >> k & 1u)) continue;
                    const int c = L.index_[(sa & ~(1u << j)) | (1u << k)];
                    if (c < 0) continue;
                    L.col_.push_back(c);
                    L.val_.push_back(L.exchange_(j, k) - I * L.gamma_(j, k));
                }
                const int c = L.index_[sa & ~(1u << j)];
                if (c >= 0 && L.drive_[j] != cplx{}) {
                    L.col_.push_back(c);
                    L.val_.push_back(L.drive_[j] / L.s_);
                }
            } else {
                const int c = L.index_[sa | (1u << j)];
                if (c < 0) continue;
                if (L.drive_[j] != cplx{}) {
                    L.col_.push_back(c);
                    L.val_.push_back(std::conj(L.drive_[j]) * L.s_);
                }
                L.up_site_.push_back(j);
                L.up_state_.push_back(c);
            }
        }
        L.row_ptr_.push_back(L.col_.size());
        L.up_ptr_.push_back(L.up_site_.size());
    }
    return L;
}

void LiouvilleOperator::energies(double t, std::vector<cplx>& e) const
{
    std::vector<double> amp(n_sites_);
    for (int j = 0; j < n_sites_; ++j) amp[j] = modulation_value(mod_[j], omega_, t);
    e.resize(states_.size());
    for (std::size_t a = 0; a < states_.size(); ++a) {
        cplx v = diag0_[a];
        for (int j = 0; j < n_sites_; ++j)
            if (states_[a] >> j & 1u) v += amp[j];
        e[a] = v;
    }
}

void LiouvilleOperator::apply(double t, const ComplexMatrix& X, ComplexMatrix& Y) const
{
    const long d = static_cast<long>(dim());
    const long dd = d * d;
    if (X.rows() != dd) throw DomainError("LiouvilleOperator::apply: state size mismatch");
    std::vector<cplx> e;
    energies(t, e);
    Y.resize(X.rows(), X.cols());
    const long ncol = X.cols();
    const double s2 = 2.0 * s_ * s_;
    const cplx* xd = X.data();
    cplx* yd = Y.data();

#pragma omp parallel for collapse(2) schedule(static)
    for (long col = 0; col < ncol; ++col)
        for (long b = 0; b < d; ++b) {
            const cplx* x = xd + col * dd;
            cplx* y = yd + col * dd;
            const cplx eb = std::conj(e[b]);
            for (long a = 0; a < d; ++a) {
                cplx v = -I * (e[a] - eb) * x[a + d * b];
                for (std::size_t p = row_ptr_[a]; p < row_ptr_[a + 1]; ++p) v -= I * val_[p] * x[col_[p] + d * b];
                for (std::size_t p = row_ptr_[b]; p < row_ptr_[b + 1]; ++p)
                    v += I * std::conj(val_[p]) * x[a + d * col_[p]];
                for (std::size_t p = up_ptr_[a]; p < up_ptr_[a + 1]; ++p)
                    for (std::size_t q = up_ptr_[b]; q < up_ptr_[b + 1]; ++q)
                        v += s2 * gamma_(up_site_[p], up_site_[q]) * x[up_state_[p] + d * up_state_[q]];
                y[a + d * b] = v;
            }
        }
}

void LiouvilleOperator::apply_column(double t, const ComplexMatrix& X, ComplexMatrix& Y) const
{
    const long d = static_cast<long>(dim());
    if (X.rows() != d) throw DomainError("LiouvilleOperator::apply_column: state size mismatch");
    std::vector<cplx> e;
    energies(t, e);
    Y.resize(X.rows(), X.cols());
    for (long col = 0; col < X.cols(); ++col) {
        Y(0, col) = 0.0;
        for (long a = 1; a < d; ++a) {
            cplx v = e[a] * X(a, col);
            for (std::size_t p = row_ptr_[a]; p < row_ptr_[a + 1]; ++p) v += val_[p] * X(col_[p], col);
            Y(a, col) = -I * v;
        }
    }
}

ComplexMatrix LiouvilleOperator::dense(double t) const
{
    using Eigen::kroneckerProduct;
    const int n = n_sites_;
    const Eigen::Index D = Eigen::Index(1) << n;
    ComplexMatrix lower(2, 2);
    lower << 0.0, 1.0, 0.0, 0.0;  // |0⟩⟨1|
    std::vector<ComplexMatrix> sig(n);
    for (int j = 0; j < n; ++j) {
        const ComplexMatrix left = ComplexMatrix::Identity(Eigen::Index(1) << (n - 1 - j), Eigen::Index(1) << (n - 1 - j));
        const ComplexMatrix right = ComplexMatrix::Identity(Eigen::Index(1) << j, Eigen::Index(1) << j);
        sig[j] = kroneckerProduct(left, kroneckerProduct(lower, right).eval()).eval();
    }
    ComplexMatrix H = ComplexMatrix::Zero(D, D);
    ComplexMatrix K = ComplexMatrix::Zero(D, D);
    for (int j = 0; j < n; ++j) {
        const ComplexMatrix sd = sig[j].adjoint();
        H += (detuning_[j] + modulation_value(mod_[j], omega_, t)) * (sd * sig[j]);
        H += drive_[j] * sd + std::conj(drive_[j]) * sig[j];
        for (int k = 0; k < n; ++k) {
            if (k != j) H += exchange_(j, k) * (sd * sig[k]);
            K += gamma_(j, k) * (sig[k].adjoint() * sig[j]);
        }
    }
    const ComplexMatrix Heff = H - I * K;

    const Eigen::Index d = static_cast<Eigen::Index>(dim());
    ComplexMatrix P = ComplexMatrix::Zero(D, d);
    Eigen::VectorXd S(d);
    for (Eigen::Index a = 0; a < d; ++a) {
        P(states_[a], a) = 1.0;
        S(a) = std::pow(s_, pop_[a]);
    }
    const ComplexMatrix Sinv = S.cwiseInverse().cast<cplx>().asDiagonal();
    const ComplexMatrix Sm = S.cast<cplx>().asDiagonal();
    const ComplexMatrix Hs = Sinv * (P.transpose() * Heff * P) * Sm;
    const ComplexMatrix Id = ComplexMatrix::Identity(d, d);
    ComplexMatrix Lm = -I * (kroneckerProduct(Id, Hs).eval() - kroneckerProduct(Hs.conjugate().eval(), Id).eval());
    std::vector<ComplexMatrix> sr(n);
    for (int j = 0; j < n; ++j) sr[j] = Sinv * (P.transpose() * sig[j] * P) * Sm;
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
            if (gamma_(j, k) != 0.0)
                Lm += 2.0 * gamma_(j, k) * kroneckerProduct(sr[k].conjugate().eval(), sr[j]).eval();
    return Lm;
}

ComplexMatrix LiouvilleOperator::to_physical(const ComplexMatrix& r) const
{
    ComplexMatrix p = r;
    for (Eigen::Index a = 0; a < p.rows(); ++a)
        for (Eigen::Index b = 0; b < p.cols(); ++b) p(a, b) *= std::pow(s_, pop_[a] + pop_[b]);
    return p;
}

ComplexMatrix LiouvilleOperator::from_physical(const ComplexMatrix& r) const
{
    ComplexMatrix p = r;
    for (Eigen::Index a = 0; a < p.rows(); ++a)
        for (Eigen::Index b = 0; b < p.cols(); ++b) p(a, b) /= std::pow(s_, pop_[a] + pop_[b]);
    return p;
}

cplx LiouvilleOperator::physical_trace(const ComplexMatrix& r) const
{
    cplx t{};
    for (Eigen::Index a = 0; a < r.rows(); ++a) t += std::pow(s_, 2 * pop_[a]) * r(a, a);
    return t;
}

ComplexMatrix LiouvilleOperator::sigma(int site) const
{
    const auto d = static_cast<Eigen::Index>(dim());
    ComplexMatrix m = ComplexMatrix::Zero(d, d);
    for (Eigen::Index a = 0; a < d; ++a)
        if (states_[a] >> site & 1u) {
            const int c = index_[states_[a] & ~(1u << site)];
            if (c >= 0) m(c, a) = 1.0;
        }
    return m;
}

ComplexMatrix LiouvilleOperator::lowering(const std::vector<cplx>& w) const
{
    const auto d = static_cast<Eigen::Index>(dim());
    ComplexMatrix m = ComplexMatrix::Zero(d, d);
    for (std::size_t j = 0; j < w.size(); ++j) m += I * w[j] * sigma(static_cast<int>(j));
    return m;
}

// ---------------------------------------------------------------- steady state

namespace {

ComplexMatrix unvec(const ComplexVector& v, Eigen::Index d) { return Eigen::Map<const ComplexMatrix>(v.data(), d, d); }

// Solves (Φ − I) x = 0 with w·x = 1 imposed in place of row `row`. A degenerate
// fixed-point space (e.g. an undriven dark state) is resolved by projecting the
// start vector e_row onto the generalized unit-eigenvalue space of Φ.
ComplexVector fixed_point(const OdeRhs& f, Eigen::Index n, double T, const ComplexVector& w, Eigen::Index row,
                          double rtol)
{
    OdeOptions opt;
    opt.rtol = rtol;
    const ComplexMatrix phi = ode_propagate(f, ComplexMatrix::Identity(n, n), 0.0, T, opt);
    ComplexMatrix A = phi - ComplexMatrix::Identity(n, n);
    A.row(row) = w.transpose();
    ComplexVector rhs = ComplexVector::Zero(n);
    rhs(row) = 1.0;
    Eigen::PartialPivLU<ComplexMatrix> lu(A);
    if (lu.rcond() > 1e-11) return lu.solve(rhs);

    // Riesz projector (1/2πi)∮(z − Φ)⁻¹dz on a circle separating the unit cluster; Jordan-safe.
    Eigen::ComplexEigenSolver<ComplexMatrix> es(phi, false);
    const double tol = std::max(1e3 * rtol, 1e-8);
    double inner = 1e-14, outer = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < n; ++k) {
        const double dist = std::abs(es.eigenvalues()(k) - 1.0);
        if (dist < tol) inner = std::max(inner, dist);
        else outer = std::min(outer, dist);
    }
    if (!(outer > 10.0 * inner)) throw ConvergenceError("periodic steady state: unit eigenvalue cluster not isolated");
    const double radius = std::sqrt(inner * std::min(outer, 1.0));
    const int nodes = 64;
    ComplexVector x = ComplexVector::Zero(n);
    for (int k = 0; k < nodes; ++k) {
        const cplx dz = radius * std::exp(I * (2.0 * pi * (k + 0.5) / nodes));
        const ComplexMatrix zr = (1.0 + dz) * ComplexMatrix::Identity(n, n) - phi;
        x += (dz / static_cast<double>(nodes)) * Eigen::PartialPivLU<ComplexMatrix>(zr).solve(rhs);
    }
    const cplx norm = (w.transpose() * x)(0);
    if (!(std::abs(norm) > 1e-12)) throw ConvergenceError("periodic steady state: no normalizable fixed point");
    return x / norm;
}

double trace_norm_hermitian(const ComplexMatrix& m)
{
    const ComplexMatrix h = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().sum();
}

}  // namespace

PeriodicTrajectory periodic_steady_state(const LiouvilleOperator& L, double rtol, int samples)
{
    if (samples < 1) throw DomainError("periodic_steady_state: need at least one sample");
    const auto d = static_cast<Eigen::Index>(L.dim());
    const Eigen::Index n = d * d;
    const double T = L.period();
    OdeRhs f = [&L](double t, const ComplexMatrix& x, ComplexMatrix& y) { L.apply(t, x, y); };
    OdeOptions opt;
    opt.rtol = rtol;

    ComplexVector x0;
    if (n <= 4096) {
        ComplexVector w = ComplexVector::Zero(n);
        for (Eigen::Index a = 0; a < d; ++a) w(a + d * a) = std::pow(L.scale(), 2 * L.excitations(a));
        x0 = fixed_point(f, n, T, w, 0, rtol);
    } else {
        x0 = ComplexVector::Zero(n);
        x0(0) = 1.0;
        bool done = false;
        double res = 0.0;
        for (int p = 0; p < 10000 && !done; ++p) {
            ComplexVector x1 = ode_propagate(f, x0, 0.0, T, opt);
            res = trace_norm_hermitian(L.to_physical(unvec(x1 - x0, d)));
            x0 = x1;
            done = res < 10.0 * rtol;
        }
        if (!done) {
            std::ostringstream os;
            os << "periodic_steady_state: no convergence after 10^4 periods, residual " << res;
            throw ConvergenceError(os.str());
        }
    }

    PeriodicTrajectory tr;
    ComplexMatrix x = x0;
    for (int k = 0; k < samples; ++k) {
        const double t0 = T * k / samples;
        const double t1 = T * (k + 1) / samples;
        tr.t.push_back(t0);
        tr.rho.push_back(unvec(x, d));
        x = ode_propagate(f, x, t0, t1, opt);
    }
    const ComplexVector diff = ComplexVector(x) - x0;
    tr.residual = trace_norm_hermitian(L.to_physical(unvec(diff, d)));
    tr.scaled_residual = diff.cwiseAbs().maxCoeff() / std::max(x0.cwiseAbs().maxCoeff(), 1e-300);
    if (!(tr.scaled_residual < 1e4 * rtol)) {
        std::ostringstream os;
        os << "periodic_steady_state: stroboscopic residual " << tr.scaled_residual << " exceeds tolerance";
        throw ConvergenceError(os.str());
    }
    return tr;
}

PeriodicColumn weak_drive_column(const LiouvilleOperator& L, double rtol, int samples)
{
    const auto d = static_cast<Eigen::Index>(L.dim());
    const double T = L.period();
    OdeRhs f = [&L](double t, const ComplexMatrix& x, ComplexMatrix& y) { L.apply_column(t, x, y); };
    ComplexVector w = ComplexVector::Zero(d);
    w(0) = 1.0;
    const ComplexVector x0 = fixed_point(f, d, T, w, 0, rtol);
    OdeOptions opt;
    opt.rtol = rtol;
    PeriodicColumn c;
    ComplexMatrix x = x0;
    for (int k = 0; k < samples; ++k) {
        const double t0 = T * k / samples;
        c.t.push_back(t0);
        c.v.push_back(x);
        x = ode_propagate(f, x, t0, T * (k + 1) / samples, opt);
    }
    c.residual = (ComplexVector(x) - x0).cwiseAbs().maxCoeff() / x0.cwiseAbs().maxCoeff();
    if (!(c.residual < 1e4 * rtol)) throw ConvergenceError("weak_drive_column: periodic residual too large");
    return c;
}

// ---------------------------------------------------------------- correlations

namespace {

cplx expect(const LiouvilleOperator& L, const ComplexMatrix& op, const ComplexMatrix& rho_scaled)
{
    return (op * L.to_physical(rho_scaled)).trace();
}

SystemConfig without_modulation(SystemConfig c)
{
    for (auto& m : c.modulations) m = ModulationProfile::harmonic(0.0, 0.0);
    return c;
}

std::vector<cplx> output_weights(const SystemConfig& cfg)
{
    std::vector<cplx> w;
    for (const auto& q : cfg.qubits) w.push_back(std::exp(I * q.phase));
    return w;
}

}  // namespace

CorrelationRecord g2_time_resolved(const SystemConfig& cfg, const CorrelationOptions& opt)
{
    const auto L = build_liouvillian(cfg, false);
    const auto L0 = build_liouvillian(without_modulation(cfg), false);
    const ComplexMatrix a = L.lowering(output_weights(cfg));
    const ComplexMatrix n_op = a.adjoint() * a;
    const ComplexMatrix nn_op = a.adjoint() * a.adjoint() * a * a;

    const auto tr0 = periodic_steady_state(L0, opt.rtol, 1);
    const double den = expect(L0, n_op, tr0.rho[0]).real();
    if (!(den > 1e-30)) throw DomainError("g2_time_resolved: undefined normalization, <a+a> vanishes");

    const auto tr = periodic_steady_state(L, opt.rtol, opt.samples);
    CorrelationRecord rec;
    rec.t = tr.t;
    rec.tau = opt.tau;
    rec.denominator = den / (L.scale() * L.scale());
    rec.g2.assign(opt.tau.size(), std::vector<double>(tr.t.size(), 0.0));

    const double s2 = L.scale() * L.scale();
    const long nt = static_cast<long>(tr.t.size());
    parallel_for(nt, [&](long k) {
        ComplexMatrix chi = s2 * (a * tr.rho[k] * a.adjoint());
        double t = tr.t[k];
        OdeOptions o;
        o.rtol = opt.rtol;
        OdeRhs f = [&L](double tt, const ComplexMatrix& x, ComplexMatrix& y) { L.apply(tt, x, y); };
        const auto d = static_cast<Eigen::Index>(L.dim());
        for (std::size_t j = 0; j < opt.tau.size(); ++j) {
            const double target = tr.t[k] + opt.tau[j];
            if (target < t) throw DomainError("g2_time_resolved: tau grid must be ascending");
            if (target > t) {
                ComplexMatrix v = Eigen::Map<ComplexMatrix>(chi.data(), d * d, 1);
                v = ode_propagate(f, v, t, target, o);
                chi = Eigen::Map<ComplexMatrix>(v.data(), d, d);
                t = target;
            }
            const double num = opt.tau[j] == 0.0 ? expect(L, nn_op, tr.rho[k]).real() : expect(L, n_op, chi).real();
            rec.g2[j][k] = num / (den * den);
        }
    });
    rec.n_max = std::min<int>(opt.n_max, static_cast<int>(tr.t.size()) / 4);
    for (const auto& row : rec.g2) {
        std::vector<cplx> z(row.begin(), row.end());
        rec.harmonics.push_back(periodic_fourier_harmonics(z, rec.n_max));
    }
    return rec;
}

FirstOrderRecord g1_time_resolved(const SystemConfig& cfg, int n_max, double rtol)
{
    if (!(cfg.drive.rabi > 0.0)) throw DomainError("g1_time_resolved: drive must be on");
    const auto L = build_liouvillian(cfg, false);
    const ComplexMatrix a = L.lowering(output_weights(cfg));
    const int samples = std::max(256, 4 * n_max);
    const auto tr = periodic_steady_state(L, rtol, samples);
    FirstOrderRecord r;
    r.t = tr.t;
    for (const auto& rho : tr.rho) r.g1.push_back(-2.0 * I * cfg.gamma1d * expect(L, a, rho) / cfg.drive.rabi);
    r.n_max = n_max;
    r.harmonics = periodic_fourier_harmonics(r.g1, n_max);
    return r;
}

SmallAHarmonics g2_harmonic_small_A(const SystemConfig& cfg)
{
    if (cfg.size() != 2) throw DomainError("g2_harmonic_small_A: requires two qubits");
    for (const auto& q : cfg.qubits)
        if (q.phase != cfg.qubits[0].phase) throw DomainError("g2_harmonic_small_A: requires phi = 0");
    for (const auto& m : cfg.modulations)
        if (m.kind != ModulationProfile::Kind::harmonic) throw DomainError("g2_harmonic_small_A: harmonic modulation required");
    const double g = cfg.gamma1d;
    const double D = (cfg.drive.epsilon - cfg.omega0) / g;
    const double W = cfg.modulation_frequency / g;
    const double A = cfg.modulations[0].amplitude / g;
    const double alpha = cfg.modulations[1].phase - cfg.modulations[0].phase;
    SmallAHarmonics h;
    h.g0 = (1.0 + 0.25 * D * D) / (1.0 + D * D);
    const cplx z = -2.0 * I + W;
    const cplx num = 10.0 + 4.0 * D * D + 7.0 * I * W - W * W;
    const cplx den = (4.0 * D * D - z * z) * (D * D - z * z);
    h.g_minus1 = -h.g0 * (2.0 * A * D) * std::cos(0.5 * alpha) * num / den;
    h.g_plus1 = std::conj(h.g_minus1);
    return h;
}

DetectorCorrelation filtered_g2_detectors(const SystemConfig& cfg, DetectorMethod method, double rtol,
                                          int max_excitations)
{
    if (!cfg.detectors) throw DomainError("filtered_g2_detectors: detectors not configured");
    const auto L = build_liouvillian(cfg, true, max_excitations);
    const int d3 = L.system_sites(), d4 = d3 + 1;
    const double s2 = L.scale() * L.scale();
    DetectorCorrelation out;
    double a3 = 0.0, a4 = 0.0, a34 = 0.0;
    if (method == DetectorMethod::density_matrix) {
        const auto tr = periodic_steady_state(L, rtol, 256);
        for (const auto& r : tr.rho) {
            const ComplexMatrix p = L.to_physical(r);
            double n3 = 0.0, n4 = 0.0, n34 = 0.0;
            for (std::size_t a = 0; a < L.dim(); ++a) {
                const auto st = L.states()[a];
                const double v = p(a, a).real();
                if (st >> d3 & 1u) n3 += v;
                if (st >> d4 & 1u) n4 += v;
                if ((st >> d3 & 1u) && (st >> d4 & 1u)) n34 += v;
            }
            a3 += n3, a4 += n4, a34 += n34;
            out.max_population = std::max({out.max_population, n3, n4});
        }
        const double k = static_cast<double>(tr.rho.size());
        out.n3 = a3 / k / s2;
        out.n4 = a4 / k / s2;
        out.n34 = a34 / k / (s2 * s2);
    } else {
        const auto col = weak_drive_column(L, rtol, 256);
        const int i3 = L.index_of(1u << d3), i4 = L.index_of(1u << d4), i34 = L.index_of((1u << d3) | (1u << d4));
        for (const auto& v : col.v) {
            a3 += std::norm(v(i3));
            a4 += std::norm(v(i4));
            a34 += std::norm(v(i34));
            out.max_population = std::max({out.max_population, s2 * std::norm(v(i3)), s2 * std::norm(v(i4))});
        }
        const double k = static_cast<double>(col.v.size());
        out.n3 = a3 / k;
        out.n4 = a4 / k;
        out.n34 = a34 / k;
    }
    out.saturated = out.max_population > 0.1;
    const double den = out.n3 * out.n4;
    out.g2 = den > 0.0 ? out.n34 / den : std::numeric_limits<double>::infinity();
    return out;
}

cplx detector_pair_amplitude(const SystemConfig& cfg, double rtol)
{
    if (!cfg.detectors) throw DomainError("detector_pair_amplitude: detectors not configured");
    const auto L = build_liouvillian(cfg, true, 2);
    const int k = cfg.detectors->n1 + cfg.detectors->n2;
    const int samples = std::max(256, 8 * std::abs(k));
    const auto col = weak_drive_column(L, rtol, samples);
    const int i34 = L.index_of((1u << L.system_sites()) | (1u << (L.system_sites() + 1)));
    std::vector<cplx> z;
    for (const auto& v : col.v) z.push_back(v(i34));
    const int nm = std::abs(k);
    return periodic_fourier_harmonics(z, std::max(nm, 1))[k + std::max(nm, 1)];
}

}  // namespace cf
