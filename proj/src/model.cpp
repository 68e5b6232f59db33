#include "combforge/model.hpp"

#include <yaml-cpp/yaml.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <regex>
#include <sstream>

namespace cf {

namespace {

// shortest round-trip form
std::string fmt(double v)
{
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

std::string where(const YAML::Node& n)
{
    const auto m = n.Mark();
    if (m.is_null()) return "";
    return " (line " + std::to_string(m.line + 1) + ", column " + std::to_string(m.column + 1) + ")";
}

double as_number(const YAML::Node& n, const std::string& field)
{
    if (!n.IsScalar()) throw ConfigError(field + ": expected a number" + where(n));
    try {
        return parse_angle(n.Scalar());
    } catch (const std::exception&) {
        throw ConfigError(field + ": cannot parse '" + n.Scalar() + "' as a number" + where(n));
    }
}

int as_int(const YAML::Node& n, const std::string& field)
{
    const double v = as_number(n, field);
    if (std::floor(v) != v) throw ConfigError(field + ": expected an integer" + where(n));
    return static_cast<int>(v);
}

void check_keys(const YAML::Node& map, const std::vector<std::string>& allowed, const std::string& ctx)
{
    if (!map.IsMap()) throw ConfigError(ctx + ": expected a mapping" + where(map));
    for (const auto& kv : map) {
        const auto key = kv.first.as<std::string>();
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw ConfigError(ctx + ": unknown key '" + key + "'" + where(kv.first));
    }
}

}  // namespace

double parse_angle(const std::string& raw)
{
    std::string s;
    for (char c : raw)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    static const std::regex re(R"(^([+-]?)((?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?(\*?pi)?(?:/((?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?))?$)");
    std::smatch m;
    if (s.empty() || !std::regex_match(s, m, re) || (!m[2].matched && !m[3].matched))
        throw std::invalid_argument("not a number: " + raw);
    double v = m[2].matched ? std::stod(m[2].str()) : 1.0;
    if (m[3].matched) v *= pi;
    if (m[4].matched) v /= std::stod(m[4].str());
    if (m[1].str() == "-") v = -v;
    return v;
}

void validate(const SystemConfig& c)
{
    if (c.qubits.empty()) throw ConfigError("qubits: at least one qubit is required");
    if (c.qubits.size() > 8) throw ConfigError("qubits: at most 8 qubits are supported");
    if (c.modulations.size() != c.qubits.size())
        throw ConfigError("modulations: " + std::to_string(c.modulations.size()) + " entries for " +
                          std::to_string(c.qubits.size()) + " qubits");
    if (!(c.gamma1d > 0.0) || !std::isfinite(c.gamma1d)) throw ConfigError("gamma_1d: must be > 0");
    if (!(c.modulation_frequency > 0.0) || !std::isfinite(c.modulation_frequency))
        throw ConfigError("modulation_frequency: must be > 0");
    if (!std::isfinite(c.omega0)) throw ConfigError("omega_0: must be finite");
    if (!std::isfinite(c.drive.epsilon)) throw ConfigError("drive.epsilon: must be finite");
    if (!(c.drive.rabi >= 0.0) || !std::isfinite(c.drive.rabi)) throw ConfigError("drive.rabi: must be >= 0");
    for (std::size_t i = 0; i < c.qubits.size(); ++i) {
        const auto tag = "qubits[" + std::to_string(i) + "]";
        if (!std::isfinite(c.qubits[i].phase)) throw ConfigError(tag + ".phase: must be finite");
        if (!(c.qubits[i].nonradiative_rate >= 0.0) || !std::isfinite(c.qubits[i].nonradiative_rate))
            throw ConfigError(tag + ".nonradiative_rate: must be >= 0");
    }
    for (std::size_t i = 0; i < c.modulations.size(); ++i) {
        const auto& m = c.modulations[i];
        const auto tag = "modulations[" + std::to_string(i) + "]";
        if (m.kind == ModulationProfile::Kind::harmonic) {
            if (!m.samples.empty()) throw ConfigError(tag + ".samples: not allowed for harmonic kind");
            if (!std::isfinite(m.amplitude) || !std::isfinite(m.phase))
                throw ConfigError(tag + ": amplitude and phase must be finite");
        } else {
            if (m.samples.size() < 64) throw ConfigError(tag + ".samples: need at least 64 points");
            for (double v : m.samples)
                if (!std::isfinite(v)) throw ConfigError(tag + ".samples: non-finite entry");
        }
    }
    if (c.detectors) {
        if (!(c.detectors->gamma_d >= 0.0)) throw ConfigError("detectors.gamma_d: must be >= 0");
        if (c.qubits.size() + 2 > 8) throw ConfigError("detectors: qubits plus detectors exceed 8");
    }
}

SystemConfig parse_config(const std::string& text)
{
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        throw ConfigError("parse error at line " + std::to_string(e.mark.line + 1) + ", column " +
                          std::to_string(e.mark.column + 1) + ": " + e.msg);
    }
    if (!root.IsMap()) throw ConfigError("config: top level must be a mapping");
    check_keys(root,
               {"units", "gamma_1d", "omega_0", "modulation_frequency", "drive", "qubits", "modulations",
                "detectors", "sweep", "description"},
               "config");

    SystemConfig c;
    if (root["units"] && root["units"].Scalar() != "gamma_1d")
        throw ConfigError("units: only 'gamma_1d' is supported" + where(root["units"]));
    if (root["gamma_1d"]) c.gamma1d = as_number(root["gamma_1d"], "gamma_1d");
    if (root["omega_0"]) c.omega0 = as_number(root["omega_0"], "omega_0");
    if (!root["modulation_frequency"]) throw ConfigError("modulation_frequency: missing");
    c.modulation_frequency = as_number(root["modulation_frequency"], "modulation_frequency");

    if (auto d = root["drive"]) {
        check_keys(d, {"epsilon", "rabi"}, "drive");
        if (d["epsilon"]) c.drive.epsilon = as_number(d["epsilon"], "drive.epsilon");
        if (d["rabi"]) c.drive.rabi = as_number(d["rabi"], "drive.rabi");
    }

    auto q = root["qubits"];
    if (!q || !q.IsSequence()) throw ConfigError("qubits: expected a list" + (q ? where(q) : std::string()));
    for (std::size_t i = 0; i < q.size(); ++i) {
        const auto tag = "qubits[" + std::to_string(i) + "]";
        check_keys(q[i], {"phase", "nonradiative_rate"}, tag);
        QubitSpec s;
        if (q[i]["phase"]) s.phase = as_number(q[i]["phase"], tag + ".phase");
        if (q[i]["nonradiative_rate"])
            s.nonradiative_rate = as_number(q[i]["nonradiative_rate"], tag + ".nonradiative_rate");
        c.qubits.push_back(s);
    }

    auto m = root["modulations"];
    if (!m || !m.IsSequence()) throw ConfigError("modulations: expected a list" + (m ? where(m) : std::string()));
    for (std::size_t i = 0; i < m.size(); ++i) {
        const auto tag = "modulations[" + std::to_string(i) + "]";
        check_keys(m[i], {"kind", "amplitude", "phase", "samples"}, tag);
        ModulationProfile p;
        const std::string kind = m[i]["kind"] ? m[i]["kind"].Scalar() : "harmonic";
        if (kind == "harmonic") {
            p.kind = ModulationProfile::Kind::harmonic;
            if (m[i]["amplitude"]) p.amplitude = as_number(m[i]["amplitude"], tag + ".amplitude");
            if (m[i]["phase"]) p.phase = as_number(m[i]["phase"], tag + ".phase");
            if (m[i]["samples"]) throw ConfigError(tag + ".samples: not allowed for harmonic kind" + where(m[i]["samples"]));
        } else if (kind == "sampled") {
            p.kind = ModulationProfile::Kind::sampled;
            if (m[i]["amplitude"] || m[i]["phase"])
                throw ConfigError(tag + ": amplitude/phase not allowed for sampled kind" + where(m[i]));
            auto s = m[i]["samples"];
            if (!s || !s.IsSequence()) throw ConfigError(tag + ".samples: expected a list" + where(m[i]));
            for (std::size_t k = 0; k < s.size(); ++k) p.samples.push_back(as_number(s[k], tag + ".samples"));
        } else {
            throw ConfigError(tag + ".kind: expected 'harmonic' or 'sampled'" + where(m[i]["kind"]));
        }
        c.modulations.push_back(std::move(p));
    }

    if (auto d = root["detectors"]) {
        check_keys(d, {"n1", "n2", "gamma_d"}, "detectors");
        DetectorSpec ds;
        if (d["n1"]) ds.n1 = as_int(d["n1"], "detectors.n1");
        if (d["n2"]) ds.n2 = as_int(d["n2"], "detectors.n2");
        if (d["gamma_d"]) ds.gamma_d = as_number(d["gamma_d"], "detectors.gamma_d");
        c.detectors = ds;
    }

    validate(c);

    // normalise to γ₁D = 1
    const double g = c.gamma1d;
    if (g != 1.0) {
        c.omega0 /= g;
        c.modulation_frequency /= g;
        c.drive.epsilon /= g;
        c.drive.rabi /= g;
        for (auto& s : c.qubits) s.nonradiative_rate /= g;
        for (auto& p : c.modulations) {
            p.amplitude /= g;
            for (auto& v : p.samples) v /= g;
        }
        if (c.detectors) c.detectors->gamma_d /= g;
        c.gamma1d = 1.0;
    }
    return c;
}

SystemConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string save_config(const SystemConfig& c)
{
    std::ostringstream os;
    os << "# all rates and frequencies in units of gamma_1d\n";
    os << "units: gamma_1d\n";
    os << "gamma_1d: " << fmt(c.gamma1d) << "\n";
    os << "omega_0: " << fmt(c.omega0) << "              # [frequency]\n";
    os << "modulation_frequency: " << fmt(c.modulation_frequency) << "   # Omega [frequency]\n";
    os << "drive:\n";
    os << "  epsilon: " << fmt(c.drive.epsilon) << "   # [frequency]\n";
    os << "  rabi: " << fmt(c.drive.rabi) << "         # Omega_R [rate]\n";
    os << "qubits:\n";
    for (const auto& q : c.qubits)
        os << "  - {phase: " << fmt(q.phase) << ", nonradiative_rate: " << fmt(q.nonradiative_rate) << "}\n";
    os << "modulations:\n";
    for (const auto& m : c.modulations) {
        if (m.kind == ModulationProfile::Kind::harmonic) {
            os << "  - {kind: harmonic, amplitude: " << fmt(m.amplitude) << ", phase: " << fmt(m.phase) << "}\n";
        } else {
            os << "  - kind: sampled\n    samples: [";
            for (std::size_t k = 0; k < m.samples.size(); ++k) os << (k ? ", " : "") << fmt(m.samples[k]);
            os << "]\n";
        }
    }
    if (c.detectors)
        os << "detectors: {n1: " << c.detectors->n1 << ", n2: " << c.detectors->n2
           << ", gamma_d: " << fmt(c.detectors->gamma_d) << "}\n";
    return os.str();
}

std::string echo_config(const SystemConfig& c)
{
    std::ostringstream os;
    os << "gamma_1d=" << fmt(c.gamma1d) << "\n";
    os << "omega_0=" << fmt(c.omega0) << "\n";
    os << "modulation_frequency=" << fmt(c.modulation_frequency) << "\n";
    os << "drive.epsilon=" << fmt(c.drive.epsilon) << "\n";
    os << "drive.rabi=" << fmt(c.drive.rabi) << "\n";
    os << "qubits.count=" << c.qubits.size() << "\n";
    for (std::size_t i = 0; i < c.qubits.size(); ++i) {
        os << "qubits[" << i << "].phase=" << fmt(c.qubits[i].phase) << "\n";
        os << "qubits[" << i << "].nonradiative_rate=" << fmt(c.qubits[i].nonradiative_rate) << "\n";
    }
    for (std::size_t i = 0; i < c.modulations.size(); ++i) {
        const auto& m = c.modulations[i];
        if (m.kind == ModulationProfile::Kind::harmonic) {
            os << "modulations[" << i << "].kind=harmonic\n";
            os << "modulations[" << i << "].amplitude=" << fmt(m.amplitude) << "\n";
            os << "modulations[" << i << "].phase=" << fmt(m.phase) << "\n";
        } else {
            os << "modulations[" << i << "].kind=sampled\n";
            os << "modulations[" << i << "].samples=" << m.samples.size() << "\n";
        }
    }
    if (c.detectors) {
        os << "detectors.n1=" << c.detectors->n1 << "\n";
        os << "detectors.n2=" << c.detectors->n2 << "\n";
        os << "detectors.gamma_d=" << fmt(c.detectors->gamma_d) << "\n";
    }
    return os.str();
}

double modulation_value(const ModulationProfile& m, double omega, double t)
{
    if (m.kind == ModulationProfile::Kind::harmonic) return m.amplitude * std::cos(omega * t + m.phase);
    const std::size_t K = m.samples.size();
    double x = omega * t / (2.0 * pi);
    x -= std::floor(x);
    x *= static_cast<double>(K);
    std::size_t i = static_cast<std::size_t>(x);
    if (i >= K) i = K - 1;
    const double f = x - static_cast<double>(i);
    return (1.0 - f) * m.samples[i] + f * m.samples[(i + 1) % K];
}

std::vector<cplx> modulation_weights(const SystemConfig& cfg)
{
    std::vector<cplx> u;
    for (const auto& m : cfg.modulations) {
        if (m.kind != ModulationProfile::Kind::harmonic)
            throw DomainError("modulation_weights: harmonic profiles required");
        u.push_back(0.5 * m.amplitude * std::exp(-I * m.phase));
    }
    return u;
}

SystemConfig make_config(std::size_t n, double omega, double amplitude, const std::vector<double>& alphas,
                         double epsilon, double rabi, double gamma_nr, const std::vector<double>& phases)
{
    SystemConfig c;
    c.modulation_frequency = omega;
    c.drive = {epsilon, rabi};
    for (std::size_t i = 0; i < n; ++i) {
        c.qubits.push_back({phases.empty() ? 0.0 : phases[i], gamma_nr});
        c.modulations.push_back(ModulationProfile::harmonic(amplitude, alphas.empty() ? 0.0 : alphas[i]));
    }
    validate(c);
    return c;
}

}  // namespace cf
