#include "combforge/comb.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cf {

namespace {

constexpr double zero_floor = 1e-10;

// Fourier coefficients of a real periodic sample table: ω(t) = Σ_j w_j e^{−ijΩt}.
std::vector<cplx> sample_spectrum(const std::vector<double>& s, int& jmax)
{
    const int K = static_cast<int>(s.size());
    jmax = (K - 1) / 2;
    std::vector<cplx> w(2 * jmax + 1);
    for (int j = -jmax; j <= jmax; ++j) {
        cplx c{};
        for (int k = 0; k < K; ++k) c += s[k] * std::exp(I * (2.0 * pi * j * k / K));
        w[j + jmax] = c / static_cast<double>(K);
    }
    return w;
}

FrequencyComb sampled_comb(const ModulationProfile& m, double Omega, int n_max)
{
    if (m.samples.size() < 4) throw DomainError("comb_coefficients: sampled profile needs at least 4 points");
    int jmax = 0;
    const auto w = sample_spectrum(m.samples, jmax);
    const double mean = w[jmax].real();
    const double shift_f = mean / Omega;
    const int shift = static_cast<int>(std::lround(shift_f));
    if (std::fabs(shift_f - shift) > 1e-9 * std::max(1.0, std::fabs(shift_f))) {
        std::ostringstream os;
        os << "comb_coefficients: profile mean " << mean << " is not a multiple of Omega";
        throw DomainError(os.str());
    }
    const int K = std::max<int>(static_cast<int>(m.samples.size()), 4 * (n_max + std::abs(shift)) + 4);
    std::vector<cplx> f(K);
    for (int k = 0; k < K; ++k) {
        const double t = 2.0 * pi * k / (K * Omega);
        cplx phase{};
        for (int j = -jmax; j <= jmax; ++j)
            if (j != 0) phase += w[j + jmax] * std::exp(-I * (j * Omega * t)) / (-I * (j * Omega));
        f[k] = std::exp(-I * phase);
    }
    const int nm = n_max + std::abs(shift);
    const auto c = periodic_fourier_harmonics(f, nm);
    FrequencyComb out;
    out.n_max = n_max;
    out.a.assign(2 * n_max + 1, cplx{});
    for (int n = -n_max; n <= n_max; ++n) {
        const int src = n - shift;
        if (std::abs(src) <= nm) out.a[n + n_max] = c[src + nm];
    }
    return out;
}

bool vanishes(double value, double scale) { return !(value > zero_floor * scale); }

}  // namespace

double FrequencyComb::weight() const
{
    double s = 0.0;
    for (auto v : a) s += std::norm(v);
    return s;
}

int default_window(const ModulationProfile& m, double Omega)
{
    double amp = std::fabs(m.amplitude);
    if (m.kind == ModulationProfile::Kind::sampled)
        for (double v : m.samples) amp = std::max(amp, std::fabs(v));
    return static_cast<int>(std::ceil(amp / Omega)) + 40;
}

FrequencyComb comb_coefficients(const ModulationProfile& m, double Omega, int n_max)
{
    if (!(Omega > 0.0)) throw DomainError("comb_coefficients: Omega must be positive");
    if (n_max < 0) n_max = default_window(m, Omega);
    FrequencyComb out;
    if (m.kind == ModulationProfile::Kind::harmonic) {
        out.n_max = n_max;
        out.a.resize(2 * n_max + 1);
        const double x = m.amplitude / Omega;
        for (int n = -n_max; n <= n_max; ++n) out.a[n + n_max] = bessel_j(n, x) * std::exp(-I * (n * m.phase));
    } else {
        out = sampled_comb(m, Omega, n_max);
    }
    const double err = std::fabs(1.0 - out.weight());
    if (err > 1e-8) {
        std::ostringstream os;
        os << "comb_coefficients: unitarity violated by " << err << " with n_max = " << n_max;
        throw DomainError(os.str());
    }
    return out;
}

std::vector<FrequencyComb> combs_from_config(const SystemConfig& cfg, int n_max)
{
    if (n_max < 0)
        for (const auto& m : cfg.modulations) n_max = std::max(n_max, default_window(m, cfg.modulation_frequency));
    std::vector<FrequencyComb> out;
    for (std::size_t i = 0; i < cfg.modulations.size(); ++i) {
        out.push_back(comb_coefficients(cfg.modulations[i], cfg.modulation_frequency, n_max));
        out.back().qubit = static_cast<int>(i);
    }
    return out;
}

double intensity_one_photon(const std::vector<FrequencyComb>& combs, int n)
{
    cplx s{};
    for (const auto& c : combs) s += c.at(n);
    return std::norm(s);
}

double intensity_two_photon(const std::vector<FrequencyComb>& combs, int n1, int n2)
{
    cplx s{};
    for (std::size_t a = 0; a < combs.size(); ++a)
        for (std::size_t b = 0; b < combs.size(); ++b)
            if (a != b) s += combs[a].at(n1) * combs[b].at(n2);
    return std::norm(s);
}

CombG2 filtered_g2_analytic(const std::vector<FrequencyComb>& combs, int n1, int n2)
{
    // Zero tests are relative to the same sums without interference.
    double m1 = 0.0, m2 = 0.0, m12 = 0.0;
    for (std::size_t a = 0; a < combs.size(); ++a) {
        m1 += std::abs(combs[a].at(n1));
        m2 += std::abs(combs[a].at(n2));
        for (std::size_t b = 0; b < combs.size(); ++b)
            if (a != b) m12 += std::abs(combs[a].at(n1) * combs[b].at(n2));
    }
    const double i1 = intensity_one_photon(combs, n1);
    const double i2 = intensity_one_photon(combs, n2);
    const double i12 = intensity_two_photon(combs, n1, n2);
    const bool z1 = vanishes(i1, m1 * m1), z2 = vanishes(i2, m2 * m2), z12 = vanishes(i12, m12 * m12);
    CombG2 g;
    if (z1 || z2) {
        g.flag = z12 ? G2Flag::indeterminate : G2Flag::bunching;
        return g;
    }
    g.value = z12 ? 0.0 : i12 / (i1 * i2);
    return g;
}

std::vector<SidebandCell> sideband_map(const SystemConfig& cfg, int n_lo, int n_hi)
{
    if (n_hi < n_lo) throw DomainError("sideband_map: empty sideband range");
    const int span = std::max(std::abs(n_lo), std::abs(n_hi));
    int n_max = span;
    for (const auto& m : cfg.modulations) n_max = std::max(n_max, default_window(m, cfg.modulation_frequency));
    const auto combs = combs_from_config(cfg, n_max);
    std::vector<SidebandCell> out;
    for (int a = n_lo; a <= n_hi; ++a)
        for (int b = n_lo; b <= n_hi; ++b) out.push_back({a, b, filtered_g2_analytic(combs, a, b)});
    return out;
}

}  // namespace cf
