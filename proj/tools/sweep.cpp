#include "sweep.hpp"

#include "combforge/model.hpp"

#include <yaml-cpp/yaml.h>

#include <set>

namespace cf::cli {

namespace {

std::string where(const YAML::Node& n)
{
    const auto m = n.Mark();
    if (m.is_null()) return "";
    return " (line " + std::to_string(m.line + 1) + ", column " + std::to_string(m.column + 1) + ")";
}

double number(const YAML::Node& n, const std::string& field)
{
    if (!n.IsScalar()) throw ConfigError("sweep." + field + ": expected a number" + where(n));
    try {
        return parse_angle(n.Scalar());
    } catch (const std::exception&) {
        throw ConfigError("sweep." + field + ": cannot parse '" + n.Scalar() + "'" + where(n));
    }
}

int integer(const YAML::Node& n, const std::string& field)
{
    const double v = number(n, field);
    if (v != static_cast<int>(v)) throw ConfigError("sweep." + field + ": expected an integer" + where(n));
    return static_cast<int>(v);
}

std::vector<double> grid(const YAML::Node& n, const std::string& field)
{
    std::vector<double> out;
    if (n.IsSequence()) {
        for (std::size_t i = 0; i < n.size(); ++i) out.push_back(number(n[i], field));
    } else if (n.IsMap()) {
        for (const auto& kv : n) {
            const auto k = kv.first.Scalar();
            if (k != "from" && k != "to" && k != "count")
                throw ConfigError("sweep." + field + ": unknown key '" + k + "'" + where(kv.first));
        }
        if (!n["from"] || !n["to"] || !n["count"]) throw ConfigError("sweep." + field + ": needs from, to, count" + where(n));
        const double a = number(n["from"], field), b = number(n["to"], field);
        const int c = integer(n["count"], field);
        if (c < 1) throw ConfigError("sweep." + field + ": count must be >= 1" + where(n));
        for (int i = 0; i < c; ++i) out.push_back(c == 1 ? a : a + (b - a) * i / (c - 1));
    } else {
        out.push_back(number(n, field));
    }
    if (out.empty()) throw ConfigError("sweep." + field + ": empty grid" + where(n));
    return out;
}

}  // namespace

Sweep load_sweep(const std::string& path)
{
    YAML::Node root;
    try {
        root = YAML::LoadFile(path);
    } catch (const YAML::BadFile&) {
        throw ConfigError("config: cannot open " + path);
    } catch (const YAML::ParserException& e) {
        throw ConfigError("parse error at line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
    }
    Sweep s;
    const auto n = root["sweep"];
    if (!n) return s;
    if (!n.IsMap()) throw ConfigError("sweep: expected a mapping" + where(n));
    static const std::set<std::string> keys{"alpha",   "amplitude", "amplitude_over_omega", "epsilon", "phi",
                                            "tau",     "n_range",   "samples",              "harmonics",
                                            "photons", "detector_route", "cross_check",     "method", "fd_step"};
    for (const auto& kv : n)
        if (!keys.count(kv.first.Scalar()))
            throw ConfigError("sweep: unknown key '" + kv.first.Scalar() + "'" + where(kv.first));
    if (n["alpha"]) s.alpha = grid(n["alpha"], "alpha");
    if (n["amplitude"]) s.amplitude = grid(n["amplitude"], "amplitude");
    if (n["amplitude_over_omega"]) s.amplitude_over_omega = grid(n["amplitude_over_omega"], "amplitude_over_omega");
    if (n["epsilon"]) s.epsilon = grid(n["epsilon"], "epsilon");
    if (n["phi"]) s.phi = grid(n["phi"], "phi");
    if (n["tau"]) s.tau = grid(n["tau"], "tau");
    if (n["n_range"]) {
        const auto r = n["n_range"];
        if (!r.IsSequence() || r.size() != 2) throw ConfigError("sweep.n_range: expected [lo, hi]" + where(r));
        s.n_lo = integer(r[0], "n_range");
        s.n_hi = integer(r[1], "n_range");
        if (s.n_hi < s.n_lo) throw ConfigError("sweep.n_range: empty range" + where(r));
    }
    if (n["samples"]) s.samples = integer(n["samples"], "samples");
    if (n["harmonics"]) s.harmonics = integer(n["harmonics"], "harmonics");
    if (n["photons"]) s.photons = integer(n["photons"], "photons");
    if (n["detector_route"]) s.detector_route = n["detector_route"].as<bool>();
    if (n["cross_check"]) s.cross_check = n["cross_check"].as<bool>();
    if (n["method"]) {
        s.method = n["method"].Scalar();
        if (s.method != "weak_drive" && s.method != "density_matrix")
            throw ConfigError("sweep.method: expected weak_drive or density_matrix" + where(n["method"]));
    }
    if (n["fd_step"]) s.fd_step = number(n["fd_step"], "fd_step");
    if (s.samples < 16) throw ConfigError("sweep.samples: must be >= 16");
    if (s.harmonics < 1 || 4 * s.harmonics > s.samples) throw ConfigError("sweep.harmonics: need 1 <= harmonics <= samples/4");
    if (!(s.fd_step > 0.0)) throw ConfigError("sweep.fd_step: must be > 0");
    for (double t : s.tau)
        if (t < 0.0) throw ConfigError("sweep.tau: delays must be >= 0");
    return s;
}

}  // namespace cf::cli
