#include "sweep.hpp"

#include "combforge/comb.hpp"
#include "combforge/design.hpp"
#include "combforge/entangle.hpp"
#include "combforge/lindblad.hpp"
#include "combforge/model.hpp"
#include "combforge/spectral.hpp"
#include "combforge/version.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <omp.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace cf;
using cli::Sweep;

namespace {

struct Options {
    std::string config;
    std::string out;
    int jobs = 0;
    double rtol = 1e-9;
    bool strict = false;
};

class RegimeWarning : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Run {
    std::string command;
    Options opt;
    std::vector<std::string> warnings;

    void warn(const std::string& w)
    {
        warnings.push_back(w);
        std::cerr << "warning: " << w << "\n";
    }
};

std::string num(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string flag_token(const CombG2& g)
{
    switch (g.flag) {
    case G2Flag::bunching: return "inf";
    case G2Flag::indeterminate: return "indet";
    default: return num(g.value);
    }
}

class Csv {
public:
    Csv(const Run& run, const std::string& name, const std::string& extra_meta = "")
        : path_(fs::path(run.opt.out) / name), out_(path_)
    {
        if (!out_) throw ConfigError("cannot write " + path_.string());
        out_ << "# combforge " << version << " " << run.command << "\n";
        out_ << "# config=" << fs::path(run.opt.config).filename().string() << " rtol=" << num(run.opt.rtol) << "\n";
        if (!extra_meta.empty()) {
            std::istringstream is(extra_meta);
            for (std::string line; std::getline(is, line);) out_ << "# " << line << "\n";
        }
    }
    void header(const std::string& cols) { out_ << cols << "\n"; }
    template <class... T>
    void row(const T&... v)
    {
        bool first = true;
        ((out_ << (first ? "" : ",") << v, first = false), ...);
        out_ << "\n";
    }

private:
    fs::path path_;
    std::ofstream out_;
};

void write_report(const Run& run, const std::string& name, const nlohmann::json& body)
{
    nlohmann::json j = body;
    j["subcommand"] = run.command;
    j["version"] = version;
    j["warnings"] = run.warnings;
    std::ofstream f(fs::path(run.opt.out) / name);
    f << j.dump(2) << "\n";
}

SystemConfig with_relative_phase(SystemConfig c, double alpha)
{
    for (std::size_t i = 0; i < c.modulations.size(); ++i)
        if (c.modulations[i].kind == ModulationProfile::Kind::harmonic) c.modulations[i].phase = alpha * static_cast<double>(i);
    return c;
}

SystemConfig with_amplitude(SystemConfig c, double a)
{
    for (auto& m : c.modulations)
        if (m.kind == ModulationProfile::Kind::harmonic) m.amplitude = a;
    return c;
}

std::vector<double> or_default(const std::vector<double>& v, double d) { return v.empty() ? std::vector<double>{d} : v; }

double config_amplitude(const SystemConfig& c) { return c.modulations.empty() ? 0.0 : c.modulations[0].amplitude; }

double config_alpha(const SystemConfig& c)
{
    return c.modulations.size() > 1 ? c.modulations[1].phase - c.modulations[0].phase : 0.0;
}

// ------------------------------------------------------------------ subcommands

void cmd_filtered_map(Run& run, const SystemConfig& cfg, const Sweep& sw)
{
    if (!cfg.detectors) throw ConfigError("filtered_map: config needs a detectors block");
    if (cfg.modulation_frequency < 20.0 * cfg.gamma1d)
        run.warn("filtered_map: Omega < 20 gamma_1d, the analytic comb map is outside the sideband-resolved regime");
    const auto method = sw.method == "density_matrix" ? DetectorMethod::density_matrix : DetectorMethod::weak_drive;
    const auto alphas = or_default(sw.alpha, config_alpha(cfg));
    nlohmann::json report = nlohmann::json::array();
    for (std::size_t ia = 0; ia < alphas.size(); ++ia) {
        const SystemConfig base = with_relative_phase(cfg, alphas[ia]);
        const auto analytic = sideband_map(base, sw.n_lo, sw.n_hi);
        const long cells = static_cast<long>(analytic.size());
        std::vector<DetectorCorrelation> numeric(cells);
        std::vector<double> cross(cells, std::nan(""));
        parallel_for(cells, [&](long k) {
            SystemConfig c = base;
            c.detectors->n1 = analytic[k].n1;
            c.detectors->n2 = analytic[k].n2;
            numeric[k] = filtered_g2_detectors(c, method, run.opt.rtol);
            if (sw.cross_check) {
                const auto other = method == DetectorMethod::weak_drive ? DetectorMethod::density_matrix : DetectorMethod::weak_drive;
                const double g = filtered_g2_detectors(c, other, run.opt.rtol).g2;
                cross[k] = std::fabs(g - numeric[k].g2) / std::max(std::fabs(numeric[k].g2), 1e-300);
            }
        });
        Csv csv(run, "filtered_map_" + std::to_string(ia) + ".csv",
                "alpha=" + num(alphas[ia]) + " method=" + sw.method + "\n" + echo_config(base));
        csv.header("n1,n2,g2_numeric,g2_analytic,flag");
        int agree = 0, compared = 0, saturated = 0;
        double max_cross = 0.0;
        for (long k = 0; k < cells; ++k) {
            const auto& a = analytic[k];
            const auto& n = numeric[k];
            const bool tie = a.g2.flag == G2Flag::finite && std::fabs(a.g2.value - 1.0) < 1e-9;
            std::string flag = a.g2.flag == G2Flag::bunching ? "bunching"
                             : a.g2.flag == G2Flag::indeterminate ? "indeterminate"
                             : tie ? "coherent"
                             : (a.g2.value > 1.0 ? "bunching" : "antibunching");
            if (n.saturated) {
                flag += "|saturated";
                ++saturated;
            }
            if (a.g2.flag != G2Flag::indeterminate && !tie) {
                const bool an = a.g2.flag == G2Flag::bunching || a.g2.value > 1.0;
                ++compared;
                agree += (n.g2 > 1.0) == an;
            }
            if (!std::isnan(cross[k])) max_cross = std::max(max_cross, cross[k]);
            csv.row(a.n1, a.n2, num(n.g2), flag_token(a.g2), flag);
        }
        if (saturated) run.warn("filtered_map: " + std::to_string(saturated) + " cells with detector population > 0.1");
        nlohmann::json r{{"alpha", alphas[ia]}, {"cells", cells}, {"pattern_compared", compared}, {"pattern_agree", agree}};
        if (sw.cross_check) r["max_rel_dev_density_vs_weak_drive"] = max_cross;
        report.push_back(r);
    }
    write_report(run, "filtered_map_report.json", {{"maps", report}});
}

void cmd_time_g2(Run& run, const SystemConfig& cfg, const Sweep& sw)
{
    const auto alphas = or_default(sw.alpha, config_alpha(cfg));
    const auto amps = or_default(sw.amplitude, config_amplitude(cfg));
    CorrelationOptions co;
    co.samples = sw.samples;
    co.tau = sw.tau;
    co.n_max = sw.harmonics;
    co.rtol = run.opt.rtol;
    const long points = static_cast<long>(alphas.size() * amps.size());
    std::vector<CorrelationRecord> rec(points);
    parallel_for(points, [&](long p) {
        rec[p] = g2_time_resolved(with_amplitude(with_relative_phase(cfg, alphas[p / amps.size()]), amps[p % amps.size()]), co);
    });

    Csv summary(run, "time_g2_summary.csv", echo_config(cfg));
    summary.header("alpha,amplitude,min_g2_minus_1,max_g2,abs_g2_h1,max_odd_over_max");
    nlohmann::json rep = nlohmann::json::array();
    for (long p = 0; p < points; ++p) {
        const double alpha = alphas[p / amps.size()], amp = amps[p % amps.size()];
        const auto& r = rec[p];
        const std::string tag = std::to_string(p / amps.size()) + "_" + std::to_string(p % amps.size());
        const std::string meta = "alpha=" + num(alpha) + " amplitude=" + num(amp);
        Csv t(run, "time_g2_" + tag + ".csv", meta);
        std::string head = "t";
        for (double tau : r.tau) head += ",g2_tau_" + num(tau);
        t.header(head);
        for (std::size_t k = 0; k < r.t.size(); ++k) {
            std::ostringstream os;
            os << num(r.t[k]);
            for (std::size_t j = 0; j < r.tau.size(); ++j) os << "," << num(r.g2[j][k]);
            t.row(os.str());
        }
        Csv h(run, "harmonics_" + tag + ".csv", meta);
        h.header("tau,n,re,im,abs");
        double mx = 0.0, odd = 0.0;
        for (std::size_t j = 0; j < r.tau.size(); ++j)
            for (int n = -r.n_max; n <= r.n_max; ++n) {
                const cplx v = r.harmonic(n, j);
                h.row(num(r.tau[j]), n, num(v.real()), num(v.imag()), num(std::abs(v)));
                if (j == 0) {
                    mx = std::max(mx, std::abs(v));
                    if (n % 2) odd = std::max(odd, std::abs(v));
                }
            }
        double mn = 1e300, mxg = -1e300;
        for (double v : r.g2[0]) mn = std::min(mn, v), mxg = std::max(mxg, v);
        summary.row(num(alpha), num(amp), num(mn - 1.0), num(mxg), num(std::abs(r.harmonic(1))), num(odd / mx));
        rep.push_back({{"alpha", alpha}, {"amplitude", amp}, {"odd_harmonic_ratio", odd / mx}});
    }
    write_report(run, "time_g2_report.json", {{"points", rep}});
}

void cmd_harmonic_map(Run& run, const SystemConfig& cfg, const Sweep& sw)
{
    if (cfg.size() != 2) throw ConfigError("harmonic_map: requires two qubits");
    const double A = config_amplitude(cfg);
    if (!(A > 0.0)) throw ConfigError("harmonic_map: modulation amplitude must be > 0");
    if (A > 0.05 * cfg.gamma1d) run.warn("harmonic_map: A > 0.05 gamma_1d, outside the linear regime");
    const auto alphas = or_default(sw.alpha, config_alpha(cfg));
    const auto eps = or_default(sw.epsilon, cfg.drive.epsilon - cfg.omega0);
    CorrelationOptions co;
    co.samples = sw.samples;
    co.n_max = sw.harmonics;
    co.rtol = run.opt.rtol;
    const long points = static_cast<long>(alphas.size() * eps.size());
    std::vector<double> numeric(points), closed(points);
    parallel_for(points, [&](long p) {
        SystemConfig c = with_relative_phase(cfg, alphas[p / eps.size()]);
        c.drive.epsilon = cfg.omega0 + eps[p % eps.size()];
        numeric[p] = std::abs(g2_time_resolved(c, co).harmonic(1)) / A;
        bool in_phase_frame = true;
        for (const auto& q : c.qubits) in_phase_frame = in_phase_frame && q.phase == c.qubits[0].phase;
        closed[p] = in_phase_frame ? std::abs(g2_harmonic_small_A(c).g_minus1) / A : std::nan("");
    });
    const double W = cfg.modulation_frequency;
    double step = 1e300;
    for (std::size_t k = 1; k < eps.size(); ++k) step = std::min(step, std::fabs(eps[k] - eps[k - 1]));
    const double half = eps.size() > 1 ? 0.5 * step : 1e-9;
    Csv csv(run, "harmonic_map.csv", echo_config(cfg));
    csv.header("alpha,detuning,abs_g1_over_A,closed_form_over_A,line");
    bool undamped = true;
    for (const auto& q : cfg.qubits) undamped = undamped && q.nonradiative_rate == 0.0;
    int dark_hits = 0;
    double dev = 0.0, top = 0.0;
    for (double v : closed)
        if (!std::isnan(v)) top = std::max(top, v);
    for (long p = 0; p < points; ++p) {
        const double d = eps[p % eps.size()];
        std::string line;
        if (std::fabs(std::fabs(d) - W) < half) line = "one_photon";
        else if (std::fabs(std::fabs(d) - 0.5 * W) < half) line = "two_photon";
        if (undamped && line == "one_photon" && std::fabs(std::remainder(alphas[p / eps.size()], 2.0 * pi)) > 1e-12)
            ++dark_hits;
        if (!std::isnan(closed[p]) && closed[p] > 1e-6 * top) dev = std::max(dev, std::fabs(numeric[p] - closed[p]) / closed[p]);
        csv.row(num(alphas[p / eps.size()]), num(d), num(numeric[p]), num(closed[p]), line);
    }
    if (dark_hits)
        run.warn("harmonic_map: " + std::to_string(dark_hits) +
                 " points on the one-photon lines with alpha != 0 pump the undamped dark state; not linear in A");
    write_report(run, "harmonic_map_report.json", {{"max_rel_dev_numeric_vs_closed_form", dev}});
}

void cmd_entropy(Run& run, const SystemConfig& cfg, const Sweep& sw)
{
    const int N = static_cast<int>(cfg.size());
    const int M = sw.photons;
    if (M > N) throw ConfigError("entropy: photons (" + std::to_string(M) + ") exceed qubits (" + std::to_string(N) + ")");
    if (M < 2) throw ConfigError("entropy: photons must be >= 2");
    const double W = cfg.modulation_frequency;
    const auto ratios = or_default(sw.amplitude_over_omega, config_amplitude(cfg) / W);
    const auto alphas = or_default(sw.alpha, config_alpha(cfg));
    const bool detector = sw.detector_route;
    if (detector && (N != 2 || !cfg.detectors)) throw ConfigError("entropy: detector route needs two qubits and detectors");
    const long points = static_cast<long>(ratios.size() * alphas.size());
    std::vector<double> es(points), eo(points, std::nan("")), ed(points, std::nan("")), xm(points);
    parallel_for(points, [&](long p) {
        const double A = ratios[p / alphas.size()] * W, alpha = alphas[p % alphas.size()];
        const SystemConfig c = with_amplitude(with_relative_phase(cfg, alpha), A);
        const auto combs = combs_from_config(c);
        const auto psi = multiphoton_wavefunction(combs, M);
        es[p] = (M == 2 ? entropy_svd(psi) : entropy_hosvd(psi)).exp_entropy;
        xm[p] = orthogonality_metric_x(combs);
        if (N == 2 && M == 2) {
            const double x = std::real(comb_overlap(combs[0], combs[1]));
            const auto [l1, l2] = pair_singular_values_from_overlap(std::clamp(x, -1.0, 1.0));
            eo[p] = entropy_from_weights({l1 * l1, l2 * l2}).exp_entropy;
        }
        if (detector) {
            const int w = sw.n_hi;
            const int lo = sw.n_lo;
            const int S = w - lo + 1;
            ComplexMatrix m(S, S);
            for (int a = lo; a <= w; ++a)
                for (int b = a; b <= w; ++b) {
                    SystemConfig d = c;
                    d.detectors->n1 = a;
                    d.detectors->n2 = b;
                    m(a - lo, b - lo) = m(b - lo, a - lo) = detector_pair_amplitude(d, run.opt.rtol);
                }
            ed[p] = entropy_svd(m).exp_entropy;
        }
    });
    Csv csv(run, "entropy.csv", "photons=" + std::to_string(M) + "\n" + echo_config(cfg));
    csv.header("A_over_Omega,alpha,exp_S,exp_S_overlap,exp_S_detector,X");
    double dev_o = 0.0, dev_d = 0.0;
    for (long p = 0; p < points; ++p) {
        if (!std::isnan(eo[p])) dev_o = std::max(dev_o, std::fabs(es[p] - eo[p]) / eo[p]);
        if (!std::isnan(ed[p])) dev_d = std::max(dev_d, std::fabs(ed[p] - es[p]) / es[p]);
        csv.row(num(ratios[p / alphas.size()]), num(alphas[p % alphas.size()]), num(es[p]), num(eo[p]), num(ed[p]), num(xm[p]));
    }
    nlohmann::json r{{"max_rel_dev_svd_vs_overlap", dev_o}};
    if (detector) r["max_rel_dev_detector_vs_analytic"] = dev_d;
    write_report(run, "entropy_report.json", r);
}

void cmd_distance_sweep(Run& run, const SystemConfig& cfg, const Sweep& sw)
{
    if (cfg.size() != 2) throw ConfigError("distance_sweep: requires two qubits");
    const auto phis = or_default(sw.phi, cfg.qubits[1].phase - cfg.qubits[0].phase);
    const auto eps = or_default(sw.epsilon, cfg.drive.epsilon - cfg.omega0);
    const auto alphas = sw.alpha.empty() ? std::vector<double>{0.0, pi} : sw.alpha;
    const double h = sw.fd_step;
    const long pe = static_cast<long>(phis.size() * eps.size());
    std::vector<double> elastic(pe);
    std::vector<std::vector<double>> dg1(alphas.size(), std::vector<double>(pe)), dg2 = dg1;
    CorrelationOptions co;
    co.samples = sw.samples;
    co.n_max = sw.harmonics;
    co.rtol = run.opt.rtol;
    parallel_for(pe, [&](long p) {
        SystemConfig c = cfg;
        c.qubits[0].phase = 0.0;
        c.qubits[1].phase = phis[p / eps.size()];
        c.drive.epsilon = cfg.omega0 + eps[p % eps.size()];
        c = with_amplitude(c, 0.0);
        elastic[p] = std::abs(g1_time_resolved(c, 2, run.opt.rtol).harmonics[2]);
        for (std::size_t ia = 0; ia < alphas.size(); ++ia) {
            const SystemConfig cp = with_amplitude(with_relative_phase(c, alphas[ia]), h);
            const SystemConfig cm = with_amplitude(with_relative_phase(c, alphas[ia]), -h);
            const auto g1p = g1_time_resolved(cp, 2, run.opt.rtol), g1m = g1_time_resolved(cm, 2, run.opt.rtol);
            dg1[ia][p] = std::abs((g1p.harmonics[3] - g1m.harmonics[3]) / (2.0 * h));
            const auto g2p = g2_time_resolved(cp, co), g2m = g2_time_resolved(cm, co);
            dg2[ia][p] = std::abs((g2p.harmonic(1) - g2m.harmonic(1)) / (2.0 * h));
        }
    });
    Csv el(run, "distance_elastic.csv", echo_config(cfg));
    el.header("phi,detuning,abs_g1");
    for (long p = 0; p < pe; ++p) el.row(num(phis[p / eps.size()]), num(eps[p % eps.size()]), num(elastic[p]));
    for (std::size_t ia = 0; ia < alphas.size(); ++ia) {
        Csv in(run, "distance_inelastic_" + std::to_string(ia) + ".csv", "alpha=" + num(alphas[ia]) + " fd_step=" + num(h));
        in.header("phi,detuning,abs_dg1_dA,abs_dg2_dA");
        for (long p = 0; p < pe; ++p)
            in.row(num(phis[p / eps.size()]), num(eps[p % eps.size()]), num(dg1[ia][p]), num(dg2[ia][p]));
    }
    write_report(run, "distance_sweep_report.json", {{"points", pe}, {"alphas", alphas}});
}

void cmd_design(Run& run)
{
    const auto target = load_design_target(run.opt.config);
    const auto r = design_modulation(target);
    {
        std::ofstream f(fs::path(run.opt.out) / "design.json");
        f << design_result_json(r) << "\n";
    }
    Csv prof(run, "design_profiles.csv", "modulation_frequency=" + num(target.modulation_frequency));
    prof.header("t,omega1,omega2");
    for (std::size_t k = 0; k < r.t.size(); ++k) prof.row(num(r.t[k]), num(r.profiles[0][k]), num(r.profiles[1][k]));
    Csv ach(run, "design_achieved.csv", "fidelity=" + num(r.fidelity));
    ach.header("n1,n2,target_re,target_im,achieved_re,achieved_im");
    const int n = target.n_max;
    const ComplexMatrix t = target.psi / target.psi.norm();
    for (int a = -n; a <= n; ++a)
        for (int b = -n; b <= n; ++b) {
            const cplx x = t(a + n, b + n), y = r.achieved(a + n, b + n);
            ach.row(a, b, num(x.real()), num(x.imag()), num(y.real()), num(y.imag()));
        }
    write_report(run, "design_report.json",
                 {{"fidelity", r.fidelity}, {"imaginary_residual", r.imaginary_residual}, {"takagi_values", r.takagi_values}});
    std::cout << "fidelity=" << num(r.fidelity) << "\n";
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"combforge: frequency-comb photon correlations from modulated qubit arrays"};
    app.require_subcommand(1);
    Options opt;
    const std::vector<std::string> names{"filtered_map", "time_g2", "harmonic_map", "entropy", "distance_sweep", "design"};
    for (const auto& n : names) {
        auto* sc = app.add_subcommand(n);
        sc->add_option("--config", opt.config, "config file (YAML; JSON target for design)")->required();
        sc->add_option("--out", opt.out, "output directory")->required();
        sc->add_option("--jobs", opt.jobs, "worker threads (0 = all)")->check(CLI::NonNegativeNumber);
        sc->add_option("--rtol", opt.rtol, "ODE relative tolerance")->check(CLI::Range(1e-12, 1e-3));
        sc->add_flag("--strict", opt.strict, "regime warnings become errors (exit 4)");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    Run run;
    run.command = app.get_subcommands().front()->get_name();
    run.opt = opt;
    if (opt.jobs > 0) omp_set_num_threads(opt.jobs);
    omp_set_max_active_levels(1);
    try {
        fs::create_directories(opt.out);
        if (run.command == "design") {
            cmd_design(run);
        } else {
            const auto cfg = load_config(opt.config);
            const auto sweep = cli::load_sweep(opt.config);
            std::cout << echo_config(cfg);
            if (run.command == "filtered_map") cmd_filtered_map(run, cfg, sweep);
            else if (run.command == "time_g2") cmd_time_g2(run, cfg, sweep);
            else if (run.command == "harmonic_map") cmd_harmonic_map(run, cfg, sweep);
            else if (run.command == "entropy") cmd_entropy(run, cfg, sweep);
            else cmd_distance_sweep(run, cfg, sweep);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ConvergenceError& e) {
        std::cerr << "convergence error: " << e.what() << "\n";
        return 3;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    if (opt.strict && !run.warnings.empty()) {
        std::cerr << "strict: " << run.warnings.size() << " regime warning(s)\n";
        return 4;
    }
    return 0;
}
