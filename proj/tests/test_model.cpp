#include "doctest.h"

#include "combforge/model.hpp"

#include <cmath>
#include <string>

using namespace cf;

namespace {

const char* two_qubits = R"(
units: gamma_1d
gamma_1d: 1
omega_0: 0
modulation_frequency: 5
drive: {epsilon: 1.5, rabi: 1.0e-3}
qubits:
  - {phase: 0, nonradiative_rate: 0.05}
  - {phase: pi/2, nonradiative_rate: 0.05}
modulations:
  - {kind: harmonic, amplitude: 0.5, phase: 0}
  - {kind: harmonic, amplitude: 0.5, phase: pi}
)";

}  // namespace

TEST_CASE("parse and round trip")
{
    SystemConfig c = parse_config(two_qubits);
    CHECK(c.size() == 2);
    CHECK(c.qubits[1].phase == doctest::Approx(pi / 2));
    CHECK(c.modulations[1].phase == doctest::Approx(pi));
    CHECK(c.drive.epsilon == 1.5);
    CHECK_FALSE(c.detectors.has_value());
    CHECK(parse_config(save_config(c)) == c);

    SystemConfig s = make_config(2, 3.0, 0.0, {0.0, 0.0}, 0.0);
    std::vector<double> table(128);
    for (std::size_t k = 0; k < table.size(); ++k) table[k] = 0.1 * std::sin(2 * pi * k / 128.0) + 1e-3 * k;
    s.modulations[1] = ModulationProfile::sampled(table);
    s.detectors = DetectorSpec{1, -2, 5.0};
    CHECK(parse_config(save_config(s)) == s);
    CHECK(echo_config(s) == echo_config(parse_config(save_config(s))));
}

TEST_CASE("shipped figure configs are valid")
{
    SystemConfig c = load_config(std::string(CF_SOURCE_DIR) + "/configs/filtered_map.yaml");
    CHECK(c.size() == 2);
    CHECK(c.modulation_frequency == 200.0);
    CHECK(c.modulations[0].amplitude == doctest::Approx(1.5 * 200.0));
    CHECK(c.qubits[0].nonradiative_rate == 0.05);
    REQUIRE(c.detectors.has_value());
    CHECK(c.detectors->gamma_d == 5.0);
    for (const char* f : {"entropy_pair", "time_g2", "harmonic_map", "strong_modulation", "distance_sweep",
                          "entropy_three"})
        CHECK_NOTHROW(load_config(std::string(CF_SOURCE_DIR) + "/configs/" + f + ".yaml"));
}

TEST_CASE("config errors")
{
    SystemConfig c = make_config(2, 5.0, 1.0, {0.0, 0.0}, 0.0);
    SystemConfig empty = c;
    empty.qubits.clear();
    empty.modulations.clear();
    CHECK_THROWS_AS(validate(empty), ConfigError);
    SystemConfig mismatch = c;
    mismatch.modulations.pop_back();
    CHECK_THROWS_AS(validate(mismatch), ConfigError);
    SystemConfig neg = c;
    neg.qubits[0].nonradiative_rate = -1.0;
    CHECK_THROWS_AS(validate(neg), ConfigError);

    std::string bad = std::string(two_qubits) + "bogus: 1\n";
    try {
        parse_config(bad);
        FAIL("no error");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("bogus") != std::string::npos);
        CHECK(std::string(e.what()).find("line") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_config("qubits: [\n"), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/file.yaml"), ConfigError);
}

TEST_CASE("modulation values")
{
    auto h0 = ModulationProfile::harmonic(2.0, 0.0);
    auto hp = ModulationProfile::harmonic(2.0, pi);
    CHECK(modulation_value(h0, 3.0, 0.0) == doctest::Approx(2.0));
    CHECK(modulation_value(hp, 3.0, 0.0) == doctest::Approx(-2.0));
    const double T = 2 * pi / 3.0;
    for (double t : {0.1, 0.77, 1.3}) CHECK(std::abs(modulation_value(h0, 3.0, t) - modulation_value(h0, 3.0, t + T)) < 1e-13);

    std::vector<double> table(256);
    for (std::size_t k = 0; k < table.size(); ++k) table[k] = 2.0 * std::cos(2 * pi * k / 256.0);
    auto s = ModulationProfile::sampled(table);
    for (double t = 0.0; t < 2 * T; t += 0.013) {
        CHECK(std::abs(modulation_value(s, 3.0, t) - modulation_value(h0, 3.0, t)) < 1e-4 * 2.0);
        CHECK(std::abs(modulation_value(s, 3.0, t) - modulation_value(s, 3.0, t + T)) < 1e-12);
    }

    auto u = modulation_weights(make_config(2, 5.0, 1.0, {0.0, pi / 2}, 0.0));
    CHECK(std::abs(u[0] - 0.5) < 1e-15);
    CHECK(std::abs(u[1] - 0.5 * std::exp(-I * pi / 2.0)) < 1e-15);
}

TEST_CASE("angles")
{
    CHECK(parse_angle("1.5") == 1.5);
    CHECK(parse_angle("pi") == doctest::Approx(pi));
    CHECK(parse_angle("-pi/2") == doctest::Approx(-pi / 2));
    CHECK(parse_angle("2pi/3") == doctest::Approx(2 * pi / 3));
    CHECK(parse_angle("0.5*pi") == doctest::Approx(pi / 2));
    CHECK_THROWS(parse_angle("tau"));
}
