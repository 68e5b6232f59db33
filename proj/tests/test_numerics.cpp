#include "doctest.h"

#include "combforge/numerics.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <random>
#include <stdexcept>

using namespace cf;

namespace {

// J₀(x) = (1/π) ∫₀^π cos(x sin θ) dθ, trapezoid on a periodic integrand
double j0_integral(double x)
{
    const int n = 400;
    double s = 0.0;
    for (int k = 0; k < n; ++k) s += std::cos(x * std::sin(pi * k / n));
    return s / n;
}

double bisect(double (*f)(double), double a, double b)
{
    double fa = f(a);
    for (int it = 0; it < 200; ++it) {
        double m = 0.5 * (a + b);
        double fm = f(m);
        if ((fm < 0) == (fa < 0)) { a = m; fa = fm; } else b = m;
    }
    return 0.5 * (a + b);
}

ComplexMatrix random_matrix(int r, int c, unsigned seed)
{
    std::mt19937 rng(seed);
    std::normal_distribution<double> d;
    ComplexMatrix m(r, c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) m(i, j) = cplx(d(rng), d(rng));
    return m;
}

}  // namespace

TEST_CASE("bessel values")
{
    CHECK(bessel_j(0, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(bessel_j(1, 0.0)) < 1e-15);
    CHECK(std::abs(bessel_j(0, 2.404826)) < 1e-6);

    for (int n = 0; n <= 30; ++n)
        for (double x : {0.1, 0.7, 1.5, 2.0, 3.3, 10.0, 25.0, 60.0}) {
            double ref = std::cyl_bessel_j(double(n), x);
            CHECK(std::abs(bessel_j(n, x) - ref) < 1e-12);
            CHECK(bessel_j(-n, x) == doctest::Approx((n % 2 ? -1 : 1) * ref).epsilon(1e-10));
            CHECK(bessel_j(n, -x) == doctest::Approx((n % 2 ? -1 : 1) * ref).epsilon(1e-10));
        }

    auto tab = bessel_j_table(12, 4.2);
    for (int n = 0; n <= 12; ++n) CHECK(std::abs(tab[n] - bessel_j(n, 4.2)) < 1e-14);
}

TEST_CASE("bessel sum rule")
{
    for (double x = 0.0; x <= 20.0; x += 0.5) {
        int nmax = int(x) + 40;
        double s = 0.0;
        for (int n = -nmax; n <= nmax; ++n) s += bessel_j(n, x) * bessel_j(n, x);
        CHECK(std::abs(s - 1.0) < 1e-10);
    }
}

TEST_CASE("bessel zeros")
{
    double z1 = bisect(j0_integral, 2.0, 3.0);
    double z2 = bisect(j0_integral, 5.0, 6.0);
    CHECK(bessel_j0_zero(1) == doctest::Approx(z1).epsilon(1e-10));
    CHECK(bessel_j0_zero(2) == doctest::Approx(z2).epsilon(1e-10));
    CHECK(z1 == doctest::Approx(2.404826).epsilon(1e-6));
    CHECK(z2 == doctest::Approx(5.520078).epsilon(1e-6));
    for (int k = 1; k <= 6; ++k) CHECK(std::abs(bessel_j(0, bessel_j0_zero(k))) < 1e-10);
    CHECK_THROWS_AS(bessel_j0_zero(0), DomainError);
}

TEST_CASE("svd")
{
    auto id = svd(ComplexMatrix::Identity(2, 2));
    CHECK(id.s(0) == doctest::Approx(1.0));
    CHECK(id.s(1) == doctest::Approx(1.0));

    ComplexVector u = random_matrix(4, 1, 1).col(0).normalized();
    ComplexVector v = random_matrix(4, 1, 2).col(0).normalized();
    auto r1 = svd(u * v.adjoint());
    CHECK(r1.s(0) == doctest::Approx(1.0).epsilon(1e-12));
    for (int k = 1; k < 4; ++k) CHECK(r1.s(k) < 1e-12);

    ComplexMatrix m = random_matrix(4, 4, 7);
    auto r = svd(m);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m.adjoint() * m);
    for (int k = 0; k < 4; ++k) CHECK(r.s(k) == doctest::Approx(std::sqrt(es.eigenvalues()(3 - k))).epsilon(1e-10));
    for (int k = 1; k < 4; ++k) CHECK(r.s(k) <= r.s(k - 1));
    CHECK((r.u * r.s.cast<cplx>().asDiagonal() * r.v.adjoint() - m).norm() < 1e-12);

    // unitary invariance
    Eigen::HouseholderQR<ComplexMatrix> qr(random_matrix(4, 4, 9));
    ComplexMatrix q = qr.householderQ();
    auto rq = svd(q * m);
    for (int k = 0; k < 4; ++k) CHECK(std::abs(rq.s(k) - r.s(k)) < 1e-10);

    ComplexMatrix bad = m;
    bad(0, 0) = cplx(std::nan(""), 0.0);
    CHECK_THROWS_AS(svd(bad), DomainError);
}

TEST_CASE("hosvd")
{
    ComplexMatrix m = random_matrix(3, 5, 11);
    ComplexTensor t({3, 5});
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 5; ++j) t[t.offset({std::size_t(i), std::size_t(j)})] = m(i, j);
    auto h = hosvd(t);
    auto s = svd(m);
    for (int k = 0; k < 3; ++k) {
        CHECK(std::abs(h.mode_singular_values[0](k) - s.s(k)) < 1e-10);
        CHECK(std::abs(h.core[h.core.offset({std::size_t(k), std::size_t(k)})]) ==
              doctest::Approx(s.s(k)).epsilon(1e-10));
    }

    // separable
    ComplexVector a = random_matrix(3, 1, 1).col(0), b = random_matrix(4, 1, 2).col(0),
                  c = random_matrix(2, 1, 3).col(0);
    ComplexTensor sep({3, 4, 2});
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 4; ++j)
            for (std::size_t k = 0; k < 2; ++k) sep[sep.offset({i, j, k})] = a(i) * b(j) * c(k);
    auto hs = hosvd(sep);
    int nonzero = 0;
    for (auto x : hs.core.data) nonzero += std::abs(x) > 1e-10;
    CHECK(nonzero == 1);
    CHECK(std::abs(hs.core[0]) == doctest::Approx(a.norm() * b.norm() * c.norm()).epsilon(1e-12));

    // symmetric 3×3×3, all-orthogonality
    ComplexTensor sym({3, 3, 3});
    ComplexTensor raw({3, 3, 3});
    std::mt19937 rng(5);
    std::normal_distribution<double> d;
    for (auto& x : raw.data) x = cplx(d(rng), d(rng));
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            for (std::size_t k = 0; k < 3; ++k)
                sym[sym.offset({i, j, k})] = raw[raw.offset({i, j, k})] + raw[raw.offset({i, k, j})] +
                                             raw[raw.offset({j, i, k})] + raw[raw.offset({j, k, i})] +
                                             raw[raw.offset({k, i, j})] + raw[raw.offset({k, j, i})];
    auto hy = hosvd(sym);
    for (std::size_t mode = 0; mode < 3; ++mode) {
        ComplexMatrix un = unfold(hy.core, mode);
        ComplexMatrix gram = un * un.adjoint();
        for (int p = 0; p < 3; ++p)
            for (int q = 0; q < 3; ++q)
                if (p != q) CHECK(std::abs(gram(p, q)) < 1e-10);
    }
    ComplexTensor back = hosvd_reconstruct(hy);
    double err = 0.0;
    for (std::size_t k = 0; k < sym.size(); ++k) err = std::max(err, std::abs(back[k] - sym[k]));
    CHECK(err < 1e-12 * sym.norm());
}

TEST_CASE("ode propagate")
{
    OdeOptions opt;
    opt.rtol = 1e-10;
    auto decay = [](double, const ComplexMatrix& x, ComplexMatrix& y) { y = -x; };
    ComplexMatrix y = ode_propagate(decay, ComplexMatrix::Ones(1, 1), 0.0, 1.0, opt);
    CHECK(std::abs(y(0, 0) - std::exp(-1.0)) < 10 * opt.rtol);

    auto rot = [](double, const ComplexMatrix& x, ComplexMatrix& y) { y = I * 3.0 * x; };
    ComplexMatrix r = ode_propagate(rot, ComplexMatrix::Ones(1, 1), 0.0, 2.0, opt);
    CHECK(std::abs(std::abs(r(0, 0)) - 1.0) < 10 * opt.rtol);

    // driven two-level Bloch equations, constant generator
    Eigen::Matrix3d B;
    B << -0.5, 0.3, 0.0, -0.3, -0.5, 0.8, 0.0, -0.8, -1.0;
    Eigen::Vector3d b(0.0, 0.0, -1.0);
    Eigen::Matrix4d aug = Eigen::Matrix4d::Zero();
    aug.topLeftCorner<3, 3>() = B;
    aug.topRightCorner<3, 1>() = b;
    Eigen::Matrix4d ex = (aug * 3.0).exp();
    Eigen::Vector4d x0(0.0, 0.0, -1.0, 1.0);
    Eigen::Vector4d ref = ex * x0;
    ComplexMatrix Bc = aug.cast<cplx>();
    auto bloch = [&](double, const ComplexMatrix& x, ComplexMatrix& y) { y = Bc * x; };
    double prev = 1.0;
    for (double tol : {1e-6, 1e-8, 1e-10}) {
        opt.rtol = tol;
        ComplexMatrix z = ode_propagate(bloch, x0.cast<cplx>(), 0.0, 3.0, opt);
        double e = (z.real().col(0) - ref).norm();
        CHECK(e < 10 * tol);
        CHECK(e <= prev);
        prev = e;
    }

    auto blowup = [](double t, const ComplexMatrix& x, ComplexMatrix& y) { y = x / (1.0 - t); };
    opt.max_steps = 100000;
    CHECK_THROWS_AS(ode_propagate(blowup, ComplexMatrix::Ones(1, 1), 0.0, 2.0, opt), ConvergenceError);
}

TEST_CASE("periodic fourier harmonics")
{
    const int n = 64;
    std::vector<cplx> c1(n, 1.0), e(n), c2(n);
    for (int k = 0; k < n; ++k) {
        double th = 2 * pi * k / n;  // Ωt
        e[k] = std::exp(-I * th);
        c2[k] = std::cos(2 * th);
    }
    auto h = periodic_fourier_harmonics(c1, 4);
    CHECK(std::abs(h[4] - 1.0) < 1e-14);
    for (int m = 0; m < 9; ++m)
        if (m != 4) CHECK(std::abs(h[m]) < 1e-14);
    auto he = periodic_fourier_harmonics(e, 4);
    CHECK(std::abs(he[5] - 1.0) < 1e-12);
    for (int m = 0; m < 9; ++m)
        if (m != 5) CHECK(std::abs(he[m]) < 1e-12);
    auto hc = periodic_fourier_harmonics(c2, 4);
    CHECK(std::abs(hc[6] - 0.5) < 1e-12);
    CHECK(std::abs(hc[2] - 0.5) < 1e-12);
    CHECK_THROWS_AS(periodic_fourier_harmonics(std::vector<cplx>(6, 1.0), 4), DomainError);
}

TEST_CASE("quadrature")
{
    cplx g = integrate_real_line([](double x) { return cplx(std::exp(-x * x)); }, 0.0, 1.0);
    CHECK(std::abs(g - std::sqrt(pi)) < 1e-10);
    cplx s = integrate([](double x) { return std::exp(I * x); }, 0.0, pi);
    CHECK(std::abs(s - 2.0 * I) < 1e-12);
    // Lorentzian
    cplx l = integrate_real_line([](double x) { return cplx(1.0 / (x * x + 0.01)); }, 0.0, 0.1);
    CHECK(std::abs(l - pi / 0.1) < 1e-8);
}

TEST_CASE("parallel_for rethrows")
{
    std::vector<int> hit(100, 0);
    parallel_for(100, [&](long k) { hit[k] = 1; });
    int total = 0;
    for (int h : hit) total += h;
    CHECK(total == 100);
    CHECK_THROWS_AS(parallel_for(10,
                                 [](long k) {
                                     if (k == 3) throw ConvergenceError("worker");
                                 }),
                    ConvergenceError);
}
