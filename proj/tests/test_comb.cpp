#include "doctest.h"

#include "combforge/comb.hpp"

#include <cmath>

using namespace cf;

namespace {

std::vector<FrequencyComb> pair(double A, double Om, double alpha)
{
    return combs_from_config(make_config(2, Om, A, {0.0, alpha}, 0.0));
}

}  // namespace

TEST_CASE("comb coefficients")
{
    auto z = comb_coefficients(ModulationProfile::harmonic(0.0, 0.0), 2.0);
    CHECK(std::abs(z.at(0) - 1.0) < 1e-15);
    for (int n = 1; n <= z.n_max; ++n) CHECK(std::abs(z.at(n)) + std::abs(z.at(-n)) == 0.0);

    auto c = comb_coefficients(ModulationProfile::harmonic(3.0, 0.0), 2.0);
    CHECK(c.n_max == default_window(ModulationProfile::harmonic(3.0, 0.0), 2.0));
    for (int n = -10; n <= 10; ++n) CHECK(std::abs(c.at(n) - bessel_j(n, 1.5)) < 1e-14);
    CHECK(std::abs(c.weight() - 1.0) < 1e-10);

    auto ph = comb_coefficients(ModulationProfile::harmonic(3.0, 0.7), 2.0);
    for (int n = -10; n <= 10; ++n) CHECK(std::abs(ph.at(n) - bessel_j(n, 1.5) * std::exp(-I * (n * 0.7))) < 1e-14);

    // sampled table of the same profile
    std::vector<double> table(512);
    for (std::size_t k = 0; k < table.size(); ++k) table[k] = 3.0 * std::cos(2 * pi * k / 512.0);
    auto s = comb_coefficients(ModulationProfile::sampled(table), 2.0, c.n_max);
    for (int n = -c.n_max; n <= c.n_max; ++n) CHECK(std::abs(s.at(n) - c.at(n)) < 1e-8);
    CHECK(std::abs(s.weight() - 1.0) < 1e-10);

    CHECK_THROWS_AS(comb_coefficients(ModulationProfile::harmonic(30.0, 0.0), 1.0, 3), DomainError);
}

TEST_CASE("sideband intensities")
{
    const double A = 3.1, Om = 2.0, x = A / Om;
    for (double alpha : {0.0, 0.9, pi / 2, pi}) {
        auto c = pair(A, Om, alpha);
        for (int n = -6; n <= 6; ++n) {
            double j = bessel_j(n, x);
            CHECK(std::abs(intensity_one_photon(c, n) - 2.0 * j * j * (1.0 + std::cos(n * alpha))) < 1e-12);
            CHECK(std::abs(intensity_two_photon(c, n, n) - 4.0 * std::pow(j, 4)) < 1e-12);
        }
    }
    auto in = pair(A, Om, 0.0);
    auto anti = pair(A, Om, pi);
    for (int n1 = -5; n1 <= 5; ++n1) {
        CHECK(std::abs(intensity_one_photon(in, n1) - 4.0 * std::pow(bessel_j(n1, x), 2)) < 1e-12);
        if (n1 % 2) CHECK(intensity_one_photon(anti, n1) < 1e-28);
        for (int n2 = -5; n2 <= 5; ++n2) {
            double ref = 4.0 * std::pow(bessel_j(n1, x) * bessel_j(n2, x), 2);
            CHECK(std::abs(intensity_two_photon(in, n1, n2) - ref) < 1e-12);
            if ((n1 - n2) % 2) CHECK(intensity_two_photon(anti, n1, n2) < 1e-28);
        }
    }
    auto still = pair(0.0, Om, 1.0);
    CHECK(std::abs(intensity_one_photon(still, 0) - 4.0) < 1e-14);
}

TEST_CASE("amplitude sign flip equals phase shift by pi")
{
    const double Om = 1.5;
    auto cfg = make_config(2, Om, 2.2, {0.0, 0.4}, 0.0);
    auto shifted = cfg;
    shifted.modulations[1].phase += pi;
    auto flipped = cfg;
    flipped.modulations[1].amplitude = -2.2;
    auto a = combs_from_config(shifted), b = combs_from_config(flipped);
    for (int n1 = -6; n1 <= 6; ++n1) {
        CHECK(std::abs(intensity_one_photon(a, n1) - intensity_one_photon(b, n1)) < 1e-12);
        for (int n2 = -6; n2 <= 6; ++n2)
            CHECK(std::abs(intensity_two_photon(a, n1, n2) - intensity_two_photon(b, n1, n2)) < 1e-12);
    }
}

TEST_CASE("selection rules for sampled anti-symmetric profiles")
{
    std::vector<double> p(256), q(256);
    for (std::size_t k = 0; k < p.size(); ++k) {
        double th = 2 * pi * k / 256.0;
        p[k] = 1.3 * std::cos(th) + 0.6 * std::sin(2 * th) + 0.2 * std::cos(3 * th);
    }
    for (std::size_t k = 0; k < p.size(); ++k) q[k] = p[(k + 128) % 256];  // half-period shift
    auto cfg = make_config(2, 1.0, 0.0, {0.0, 0.0}, 0.0);
    cfg.modulations = {ModulationProfile::sampled(p), ModulationProfile::sampled(q)};
    auto c = combs_from_config(cfg);
    for (const auto& x : c) CHECK(std::abs(x.weight() - 1.0) < 1e-10);
    for (int n = -7; n <= 7; n += 2) CHECK(intensity_one_photon(c, n) < 1e-20);
    CHECK(intensity_one_photon(c, 2) > 1e-3);

    // with odd harmonics only, the shift is a sign flip
    std::vector<double> r(256), s(256);
    for (std::size_t k = 0; k < r.size(); ++k) {
        double th = 2 * pi * k / 256.0;
        r[k] = 1.3 * std::cos(th) - 0.4 * std::sin(3 * th);
        s[k] = -r[k];
    }
    cfg.modulations = {ModulationProfile::sampled(r), ModulationProfile::sampled(s)};
    auto d = combs_from_config(cfg);
    for (int n = -7; n <= 7; n += 2) CHECK(intensity_one_photon(d, n) < 1e-20);
}

TEST_CASE("analytic filtered g2")
{
    auto anti = pair(300.0, 200.0, pi);
    CHECK(filtered_g2_analytic(anti, 1, 1).flag == G2Flag::bunching);
    CHECK(filtered_g2_analytic(anti, 1, -3).flag == G2Flag::bunching);
    CHECK(filtered_g2_analytic(anti, 0, 1).flag == G2Flag::indeterminate);
    CHECK(filtered_g2_analytic(anti, 0, 2).flag == G2Flag::finite);
    auto in = pair(300.0, 200.0, 0.0);
    for (int n1 = -3; n1 <= 3; ++n1)
        for (int n2 = -3; n2 <= 3; ++n2) {
            auto g = filtered_g2_analytic(in, n1, n2);
            REQUIRE(g.flag == G2Flag::finite);
            CHECK(g.value == doctest::Approx(0.25).epsilon(1e-12));  // 4J²J² / (4J²·4J²)
        }

    auto quarter = sideband_map(make_config(2, 200.0, 300.0, {0.0, pi / 2}, 0.0), -3, 3);
    int above = 0, below = 0;
    for (const auto& cell : quarter)
        if (cell.g2.flag == G2Flag::finite) (cell.g2.value > 1.0 ? above : below)++;
    CHECK(above > 0);
    CHECK(below > 0);
    auto map0 = sideband_map(make_config(2, 200.0, 300.0, {0.0, 0.0}, 0.0), -3, 3);
    CHECK(map0.size() == 49);
    for (const auto& cell : map0) CHECK(cell.g2.flag == G2Flag::finite);
    CHECK_THROWS_AS(sideband_map(make_config(2, 200.0, 300.0, {0.0, 0.0}, 0.0), 2, 1), DomainError);
}
