#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    fs::path p = fs::temp_directory_path() / ("combforge_cli_" + std::to_string(::getpid())) / name;
    fs::create_directories(p);
    return p;
}

int run(const std::string& args)
{
    std::string cmd = std::string(CF_CLI) + " " + args + " > /dev/null 2>&1";
    int st = std::system(cmd.c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

const char* small_time = R"(units: gamma_1d
modulation_frequency: 5
drive: {epsilon: 5, rabi: 1.0e-3}
qubits: [{phase: 0}, {phase: 0}]
modulations:
  - {kind: harmonic, amplitude: 0.5, phase: 0}
  - {kind: harmonic, amplitude: 0.5, phase: 0}
sweep:
  alpha: [0, pi]
  samples: 64
  harmonics: 4
)";

const char* small_map = R"(units: gamma_1d
modulation_frequency: 5
drive: {epsilon: 0, rabi: 1.0e-3}
qubits: [{phase: 0}, {phase: 0}]
modulations:
  - {kind: harmonic, amplitude: 0.5, phase: 0}
  - {kind: harmonic, amplitude: 0.5, phase: 0}
detectors: {n1: 0, n2: 0, gamma_d: 5}
sweep:
  alpha: [pi]
  n_range: [-1, 1]
)";

}  // namespace

TEST_CASE("cli time_g2 output is deterministic")
{
    fs::path d = scratch("time");
    write(d / "cfg.yaml", small_time);
    REQUIRE(run("time_g2 --config " + (d / "cfg.yaml").string() + " --out " + (d / "a").string()) == 0);
    REQUIRE(run("time_g2 --config " + (d / "cfg.yaml").string() + " --out " + (d / "b").string() + " --jobs 1") ==
            0);
    int files = 0;
    for (const auto& e : fs::directory_iterator(d / "a")) {
        if (e.path().extension() != ".csv") continue;
        ++files;
        std::string a = slurp(e.path());
        CHECK(a == slurp(d / "b" / e.path().filename()));
        CHECK(a.rfind("# combforge ", 0) == 0);
    }
    CHECK(files >= 3);
    std::string summary = slurp(d / "a" / "time_g2_summary.csv");
    CHECK(summary.find("alpha,amplitude,min_g2_minus_1") != std::string::npos);
}

TEST_CASE("cli exit codes")
{
    fs::path d = scratch("codes");
    write(d / "bad.yaml", "units: gamma_1d\nqubits: []\nmodulation_frequency: 1\nmodulations: []\n");
    CHECK(run("time_g2 --config " + (d / "bad.yaml").string() + " --out " + d.string()) == 2);
    CHECK(run("time_g2 --config " + (d / "missing.yaml").string() + " --out " + d.string()) == 2);
    write(d / "range.yaml", std::string(small_map).replace(std::string(small_map).find("[-1, 1]"), 7, "[1, -1]"));
    CHECK(run("filtered_map --config " + (d / "range.yaml").string() + " --out " + d.string()) == 2);

    // Ω = 5 is outside the sideband-resolved regime: warning, escalated by --strict
    write(d / "map.yaml", small_map);
    CHECK(run("filtered_map --config " + (d / "map.yaml").string() + " --out " + (d / "m").string()) == 0);
    CHECK(fs::exists(d / "m" / "filtered_map_0.csv"));
    CHECK(run("filtered_map --config " + (d / "map.yaml").string() + " --out " + (d / "s").string() + " --strict") ==
          4);

    // one-photon line with α ≠ 0 and no nonradiative decay pumps the dark state
    const std::string hmap = R"(units: gamma_1d
modulation_frequency: 5
drive: {epsilon: 0, rabi: 1.0e-3}
qubits: [{phase: 0, nonradiative_rate: NR}, {phase: 0, nonradiative_rate: NR}]
modulations:
  - {kind: harmonic, amplitude: 0.025, phase: 0}
  - {kind: harmonic, amplitude: 0.025, phase: 0}
sweep:
  alpha: [0, pi/2]
  epsilon: [2.5, 5]
  samples: 32
  harmonics: 2
)";
    auto with_nr = [&](const char* nr) {
        std::string t = hmap;
        for (std::size_t at; (at = t.find("NR")) != std::string::npos;) t.replace(at, 2, nr);
        return t;
    };
    write(d / "hm0.yaml", with_nr("0"));
    write(d / "hm1.yaml", with_nr("0.05"));
    CHECK(run("harmonic_map --config " + (d / "hm0.yaml").string() + " --out " + (d / "h0").string()) == 0);
    CHECK(run("harmonic_map --config " + (d / "hm0.yaml").string() + " --out " + (d / "h0").string() + " --strict") == 4);
    CHECK(run("harmonic_map --config " + (d / "hm1.yaml").string() + " --out " + (d / "h1").string() + " --strict") == 0);

    write(d / "target.json", R"({"modulation_frequency": 1, "samples": 64, "n_max": 1,
        "entries": [[-1, -1, 1, 0], [0, 0, 1, 0], [1, 1, 1, 0]]})");
    CHECK(run("design --config " + (d / "target.json").string() + " --out " + d.string()) == 2);
    CHECK(run("nonsense --config x --out y") != 0);
}
