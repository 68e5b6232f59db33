#include "combforge/numerics.hpp"

#include <Eigen/SVD>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace cf {

ComplexTensor::ComplexTensor(std::vector<std::size_t> s) : shape(std::move(s))
{
    std::size_t n = 1;
    for (auto d : shape) n *= d;
    data.assign(n, cplx{0.0, 0.0});
}

std::size_t ComplexTensor::offset(const std::vector<std::size_t>& idx) const
{
    std::size_t k = 0;
    for (std::size_t a = 0; a < shape.size(); ++a) k = k * shape[a] + idx[a];
    return k;
}

double ComplexTensor::norm() const
{
    double s = 0.0;
    for (const auto& z : data) s += std::norm(z);
    return std::sqrt(s);
}

// ---------------------------------------------------------------- Bessel

namespace {

double bessel_series(int n, double x)
{
    // n >= 0, |x| < 2
    const double h = 0.5 * x;
    if (h == 0.0) return n == 0 ? 1.0 : 0.0;
    const double lead = n * std::log(std::fabs(h)) - std::lgamma(n + 1.0);
    if (lead < -745.0) return 0.0;
    double term = std::exp(lead);
    if (h < 0.0 && (n % 2)) term = -term;
    double sum = term;
    const double q = -h * h;
    for (int k = 0; k < 200; ++k) {
        term *= q / ((k + 1.0) * (k + 1.0 + n));
        sum += term;
        if (std::fabs(term) < 1e-18 * std::fabs(sum)) break;
    }
    return sum;
}

// J_0..J_nmax for x > 0 by downward recurrence, normalised with J0 + 2ΣJ_2k = 1.
std::vector<double> bessel_miller(int nmax, double x)
{
    const double big = std::max<double>(nmax, x);
    int m = static_cast<int>(big + 60.0 + 2.0 * std::sqrt(big));
    m += m % 2;
    std::vector<double> j(static_cast<std::size_t>(std::max(m, nmax)) + 2, 0.0);
    double jp1 = 0.0, jk = 1e-30, norm = 0.0;
    j[m] = jk;
    for (int k = m; k > 0; --k) {
        const double jm1 = (2.0 * k / x) * jk - jp1;
        jp1 = jk;
        jk = jm1;
        j[k - 1] = jk;
        if (std::fabs(jk) > 1e250) {
            for (int i = k - 1; i <= m; ++i) j[i] *= 1e-250;
            jk *= 1e-250;
            jp1 *= 1e-250;
        }
    }
    norm = j[0];
    for (int k = 2; k <= m; k += 2) norm += 2.0 * j[k];
    std::vector<double> out(nmax + 1);
    for (int k = 0; k <= nmax; ++k) out[k] = j[k] / norm;
    return out;
}

void check_bessel_domain(int n, double x)
{
    if (std::abs(n) > 200 || !(std::fabs(x) <= 1000.0)) {
        std::ostringstream os;
        os << "bessel_j: order " << n << " or argument " << x << " outside |n|<=200, |x|<=1000";
        throw DomainError(os.str());
    }
}

}  // namespace

std::vector<double> bessel_j_table(int nmax, double x)
{
    check_bessel_domain(nmax, x);
    if (nmax < 0) throw DomainError("bessel_j_table: negative nmax");
    std::vector<double> out(nmax + 1);
    const double ax = std::fabs(x);
    if (ax < 2.0) {
        for (int k = 0; k <= nmax; ++k) out[k] = bessel_series(k, ax);
    } else {
        out = bessel_miller(nmax, ax);
    }
    if (x < 0.0)
        for (int k = 1; k <= nmax; k += 2) out[k] = -out[k];
    return out;
}

double bessel_j(int n, double x)
{
    check_bessel_domain(n, x);
    const int an = std::abs(n);
    double v;
    if (std::fabs(x) < 2.0)
        v = bessel_series(an, std::fabs(x));
    else
        v = bessel_miller(an, std::fabs(x))[an];
    if (x < 0.0 && (an % 2)) v = -v;
    if (n < 0 && (an % 2)) v = -v;
    return v;
}

double bessel_j0_zero(int k)
{
    if (k < 1 || k > 20) throw DomainError("bessel_j0_zero: index must be in [1, 20]");
    const double b = (k - 0.25) * pi;
    double x = b + 1.0 / (8.0 * b) - 124.0 / (3.0 * std::pow(8.0 * b, 3));
    for (int it = 0; it < 50; ++it) {
        const double dx = bessel_j(0, x) / bessel_j(1, x);
        x += dx;
        if (std::fabs(dx) < 1e-15 * x) break;
    }
    return x;
}

// ---------------------------------------------------------------- SVD / HOSVD

SvdResult svd(const ComplexMatrix& m)
{
    if (!m.allFinite()) throw DomainError("svd: non-finite input");
    Eigen::JacobiSVD<ComplexMatrix> dec(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return {dec.singularValues(), dec.matrixU(), dec.matrixV()};
}

ComplexMatrix unfold(const ComplexTensor& t, std::size_t mode)
{
    const std::size_t M = t.order();
    const std::size_t rows = t.shape[mode];
    const std::size_t cols = rows ? t.size() / rows : 0;
    std::size_t inner = 1;
    for (std::size_t a = mode + 1; a < M; ++a) inner *= t.shape[a];
    ComplexMatrix u(rows, cols);
    // flat index = (outer * rows + i) * inner + j ; column = outer * inner + j
    const std::size_t outer = cols / std::max<std::size_t>(inner, 1);
    for (std::size_t o = 0; o < outer; ++o)
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < inner; ++j) u(i, o * inner + j) = t.data[(o * rows + i) * inner + j];
    return u;
}

ComplexTensor mode_product(const ComplexTensor& t, const ComplexMatrix& m, std::size_t mode)
{
    if (static_cast<std::size_t>(m.cols()) != t.shape[mode]) throw DomainError("mode_product: shape mismatch");
    auto shape = t.shape;
    shape[mode] = m.rows();
    ComplexTensor r(shape);
    std::size_t inner = 1;
    for (std::size_t a = mode + 1; a < t.order(); ++a) inner *= t.shape[a];
    const std::size_t n_in = t.shape[mode];
    const std::size_t n_out = m.rows();
    const std::size_t outer = t.size() / (n_in * inner);
    for (std::size_t o = 0; o < outer; ++o)
        for (std::size_t i = 0; i < n_out; ++i)
            for (std::size_t k = 0; k < n_in; ++k) {
                const cplx w = m(i, k);
                if (w == cplx{}) continue;
                const cplx* src = &t.data[(o * n_in + k) * inner];
                cplx* dst = &r.data[(o * n_out + i) * inner];
                for (std::size_t j = 0; j < inner; ++j) dst[j] += w * src[j];
            }
    return r;
}

HosvdResult hosvd(const ComplexTensor& t)
{
    if (t.order() < 2 || t.order() > 5) throw DomainError("hosvd: tensor order must be in [2, 5]");
    HosvdResult h;
    ComplexTensor core = t;
    for (std::size_t a = 0; a < t.order(); ++a) {
        auto s = svd(unfold(t, a));
        h.factors.push_back(s.u);
        h.mode_singular_values.push_back(s.s);
        core = mode_product(core, s.u.adjoint(), a);
    }
    h.core = std::move(core);
    return h;
}

ComplexTensor hosvd_reconstruct(const HosvdResult& h)
{
    ComplexTensor t = h.core;
    for (std::size_t a = 0; a < h.factors.size(); ++a) t = mode_product(t, h.factors[a], a);
    return t;
}

// ---------------------------------------------------------------- ODE

ComplexMatrix ode_propagate(const OdeRhs& f, const ComplexMatrix& y0, double t0, double t1,
                            const OdeOptions& opt, OdeStats* stats)
{
    if (!(opt.rtol >= 1e-12)) throw DomainError("ode_propagate: rtol must be >= 1e-12");
    if (t1 < t0) throw DomainError("ode_propagate: t1 < t0");
    ComplexMatrix y = y0;
    if (t1 == t0) return y;

    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                     a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                     e6 = 22.0 / 525, e7 = -1.0 / 40;

    const auto rows = y.rows(), cols = y.cols();
    ComplexMatrix k1(rows, cols), k2(rows, cols), k3(rows, cols), k4(rows, cols), k5(rows, cols),
        k6(rows, cols), k7(rows, cols), tmp(rows, cols), ynew(rows, cols);

    double t = t0;
    f(t, y, k1);

    double h = opt.h_init;
    if (h <= 0.0) {
        double d0 = 0.0, d1 = 0.0;
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            const double sc = opt.atol + opt.rtol * std::abs(y.data()[i]);
            d0 = std::max(d0, std::abs(y.data()[i]) / sc);
            d1 = std::max(d1, std::abs(k1.data()[i]) / sc);
        }
        h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 * (t1 - t0) : 0.01 * d0 / d1;
    }
    h = std::min(h, t1 - t0);

    long steps = 0;
    bool last_rejected = false;
    while (t < t1) {
        if (++steps > opt.max_steps) throw ConvergenceError("ode_propagate: step budget exhausted");
        bool final_step = false;
        if (t + h >= t1 || t + 1.01 * h >= t1) {
            h = t1 - t;
            final_step = true;
        }
        tmp = y + h * a21 * k1;
        f(t + c2 * h, tmp, k2);
        tmp = y + h * (a31 * k1 + a32 * k2);
        f(t + c3 * h, tmp, k3);
        tmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
        f(t + c4 * h, tmp, k4);
        tmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
        f(t + c5 * h, tmp, k5);
        tmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
        f(t + h, tmp, k6);
        ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        f(t + h, ynew, k7);

        double err = 0.0;
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            const cplx e = h * (e1 * k1.data()[i] + e3 * k3.data()[i] + e4 * k4.data()[i] + e5 * k5.data()[i] +
                                e6 * k6.data()[i] + e7 * k7.data()[i]);
            const double sc =
                opt.atol + opt.rtol * std::max(std::abs(y.data()[i]), std::abs(ynew.data()[i]));
            err = std::max(err, std::abs(e) / sc);
        }
        if (!std::isfinite(err)) err = 1e10;

        if (err <= 1.0) {
            t = final_step ? t1 : t + h;
            y.swap(ynew);
            k1.swap(k7);
            if (stats) {
                ++stats->accepted;
                stats->last_h = h;
            }
            double fac = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
            fac = std::clamp(fac, 0.2, last_rejected ? 1.0 : 5.0);
            h *= fac;
            last_rejected = false;
        } else {
            if (stats) ++stats->rejected;
            h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
            last_rejected = true;
        }
        if (h < 1e-15 * std::max(1.0, std::fabs(t))) {
            std::ostringstream os;
            os << "ode_propagate: step-size underflow at t=" << t << " (h=" << h << ", err=" << err << ")";
            throw ConvergenceError(os.str());
        }
    }
    return y;
}

// ---------------------------------------------------------------- Fourier / quadrature

std::vector<cplx> periodic_fourier_harmonics(const std::vector<cplx>& samples, int n_max)
{
    const std::size_t K = samples.size();
    if (n_max < 0 || K < 4 * static_cast<std::size_t>(std::max(n_max, 1)))
        throw DomainError("periodic_fourier_harmonics: need at least 4*n_max samples per period");
    std::vector<cplx> roots(K);
    for (std::size_t k = 0; k < K; ++k) roots[k] = std::polar(1.0, 2.0 * pi * static_cast<double>(k) / K);
    std::vector<cplx> c(2 * n_max + 1);
    for (int n = -n_max; n <= n_max; ++n) {
        cplx s{};
        const long nn = ((n % static_cast<long>(K)) + static_cast<long>(K)) % static_cast<long>(K);
        for (std::size_t k = 0; k < K; ++k) s += samples[k] * roots[(nn * k) % K];
        c[n + n_max] = s / static_cast<double>(K);
    }
    return c;
}

cplx integrate(const std::function<cplx(double)>& f, double a, double b, double tol, double* error)
{
    double err = 0.0;
    const cplx v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 15, tol, &err);
    if (error) *error = err;
    return v;
}

cplx integrate_real_line(const std::function<cplx(double)>& f, double centre, double width, double tol,
                         double* error)
{
    auto g = [&](double th) {
        const double c = std::cos(th);
        return f(centre + width * std::tan(th)) * (width / (c * c));
    };
    return integrate(g, -0.5 * pi, 0.5 * pi, tol, error);
}

}  // namespace cf
