#include "rmwg/recipes.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <random>
#include <set>
#include <sstream>

#include <gsl/gsl_version.h>

#include "rmwg/io.hpp"
#include "rmwg/version.hpp"

namespace rmwg {

namespace fs = std::filesystem;
using io::json;

namespace {

const std::set<std::string>& setting_keys() {
    static const std::set<std::string> keys = {
        "seed",           "threads",        "bootstrap_n",   "VQ_min",      "VQ_max",     "VQ_steps",
        "E_min",          "E_max",          "E_steps",       "t_end",       "t_steps",    "kinds",
        "ldos_site",      "peak_points",    "peak_prominence", "rabi_freq", "T1",         "T2",
        "detuning",       "w_left",         "w_right",       "drive_on_until", "ramsey_detuning", "excitation",
        "observations",   "gaps",           "far_detuned_VQ", "fix",        "jitter_MHz", "s_lL",
        "s_lR",           "s_rL",           "s_rR",          "s_lL_std",    "s_lR_std",   "s_rL_std",
        "s_rR_std",       "traces",         "lpf_MHz",       "prefilter_MHz", "noise",    "emission_samples"};
    return keys;
}

bool has(const KeyValues& kv, const std::string& key) { return kv.count(key) != 0; }

double number(const KeyValues& kv, const std::string& key, double fallback) {
    const auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    const std::string& s = it->second;
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        fail(ErrorCode::parse, "setting '" + key + "' is not a number: '" + s + "'");
    return v;
}

long integer(const KeyValues& kv, const std::string& key, long fallback) {
    const double v = number(kv, key, static_cast<double>(fallback));
    require(v == std::floor(v) && std::abs(v) < 1e15, ErrorCode::usage, "setting '" + key + "' must be an integer");
    return static_cast<long>(v);
}

std::string text(const KeyValues& kv, const std::string& key, const std::string& fallback) {
    const auto it = kv.find(key);
    return it == kv.end() ? fallback : it->second;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ',')) {
        const auto b = item.find_first_not_of(' ');
        const auto e = item.find_last_not_of(' ');
        if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
    }
    return out;
}

std::vector<double> linspace(double lo, double hi, long steps) {
    require(steps >= 0, ErrorCode::usage, "grid step count must be >= 0");
    std::vector<double> g(static_cast<std::size_t>(steps));
    for (long i = 0; i < steps; ++i)
        g[static_cast<std::size_t>(i)] = steps == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps - 1);
    return g;
}

// <prefix>_min, <prefix>_max, <prefix>_steps with defaults.
std::vector<double> grid_from(const KeyValues& kv, const std::string& prefix, double lo, double hi, long steps) {
    const double a = number(kv, prefix + "_min", lo);
    const double b = number(kv, prefix + "_max", hi);
    const long n = integer(kv, prefix + "_steps", steps);
    require(n >= 1, ErrorCode::usage, prefix + " grid is empty (" + prefix + "_steps must be >= 1)");
    require(std::isfinite(a) && std::isfinite(b) && a <= b, ErrorCode::usage,
            prefix + " grid needs finite " + prefix + "_min <= " + prefix + "_max");
    return linspace(a, b, n);
}

bool has_grid(const KeyValues& kv, const std::string& prefix) {
    return has(kv, prefix + "_min") || has(kv, prefix + "_max") || has(kv, prefix + "_steps");
}

struct Output {
    const RunConfig& cfg;
    std::vector<std::string> files;

    void text(const std::string& name, const std::string& body) {
        io::write_text((fs::path(cfg.out_dir) / name).string(), body);
        files.push_back(name);
    }
    void json(const std::string& name, const io::json& j) {
        io::write_json((fs::path(cfg.out_dir) / name).string(), j);
        files.push_back(name);
    }
    std::vector<std::string> finish() {
        io::json m;
        m["tool"] = "rmwg";
        m["version"] = kVersion;
        m["command"] = cfg.command;
        m["preset"] = cfg.preset;
        m["config"] = cfg.config_path;
        m["seed"] = cfg.seed;
        m["threads"] = cfg.threads;
        m["bootstrap_n"] = cfg.bootstrap_n;
        m["params"] = io::to_json(cfg.params);
        m["settings"] = cfg.settings;
        m["outputs"] = files;
        m["libraries"] = {{"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                                        "." + std::to_string(EIGEN_MINOR_VERSION)},
                          {"gsl", GSL_VERSION},
                          {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                                std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                                std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
        json("manifest.json", m);
        return files;
    }
};

std::string role_name(const SiteRoles& r, int site) {
    if (site == r.portL) return "portL";
    if (site == r.portR) return "portR";
    if (site == r.NL) return "NL";
    if (site == r.M) return "M";
    if (site == r.NR) return "NR";
    if (site == r.Q) return "Q";
    return site < r.M ? "left" : "right";
}

}  // namespace

KeyValues preset_settings(const std::string& preset) {
    if (preset.empty() || preset == "fig3") return {};
    if (preset == "fig1") return {{"VQ_min", "-150"}, {"VQ_max", "150"}, {"VQ_steps", "601"}};
    if (preset == "fig4")
        return {{"VQ_min", "-100"}, {"VQ_max", "200"},  {"VQ_steps", "61"},
                {"E_min", "-200"},  {"E_max", "300"},   {"E_steps", "1001"},
                {"kinds", "S_LL,S_LR,S_RL,S_RR"}};
    if (preset == "fig5") return {{"rabi_freq", "10"}};
    if (preset == "appc")
        return {{"s_lL", "108.2"},   {"s_lR", "0.3"},     {"s_rL", "0.7"},     {"s_rR", "54.5"},
                {"s_lL_std", "0.3"}, {"s_lR_std", "0.3"}, {"s_rL_std", "0.3"}, {"s_rR_std", "0.3"}};
    presets::by_name(preset);  // raises the usage error
    return {};
}

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names = {"spectrum", "scatter", "emit", "fit", "chi"};
    return names;
}

RunConfig make_run_config(const std::string& command, const std::string& preset, const std::string& config_path,
                          const std::string& out_dir, std::optional<std::uint64_t> seed, std::optional<int> threads) {
    const auto& names = command_names();
    require(std::find(names.begin(), names.end(), command) != names.end(), ErrorCode::usage,
            "unknown command '" + command + "'");
    RunConfig cfg;
    cfg.command = command;
    cfg.preset = preset;
    cfg.config_path = config_path;
    cfg.out_dir = out_dir.empty() ? "." : out_dir;
    if (!preset.empty()) cfg.params = presets::by_name(preset);
    cfg.settings = preset_settings(preset);
    if (!config_path.empty()) {
        const KeyValues kv = read_key_values(config_path);
        cfg.params = params_from_key_values(kv, cfg.params);
        for (const auto& [k, v] : kv) {
            if (is_model_key(k)) continue;
            require(setting_keys().count(k) != 0, ErrorCode::usage,
                    config_path + ": unknown setting '" + k + "'");
            cfg.settings[k] = v;
        }
    } else if (preset.empty()) {
        fail(ErrorCode::usage, "need --preset or --config");
    }
    cfg.params.validate();
    cfg.seed = static_cast<std::uint64_t>(integer(cfg.settings, "seed", 1));
    cfg.threads = static_cast<int>(integer(cfg.settings, "threads", 1));
    cfg.bootstrap_n = static_cast<int>(integer(cfg.settings, "bootstrap_n", 1000));
    if (seed) cfg.seed = *seed;
    if (threads) cfg.threads = *threads;
    require(cfg.threads >= 1, ErrorCode::usage, "threads must be >= 1");
    require(cfg.bootstrap_n >= 0, ErrorCode::usage, "bootstrap_n must be >= 0");
    return cfg;
}

// ---------------------------------------------------------------------------
// spectrum

std::vector<std::string> cmd_spectrum(const RunConfig& cfg) {
    fs::create_directories(cfg.out_dir);
    Output out{cfg, {}};
    const ModelParams& prm = cfg.params;
    const double span = std::max(150.0, 4.0 * std::abs(prm.V));
    const auto VQ_grid = grid_from(cfg.settings, "VQ", -span, span, static_cast<long>(2.0 * span / 0.5) + 1);
    const auto sweep = sweep_qubit_energy(prm, VQ_grid, cfg.threads);
    out.text("sweep.csv", io::sweep_csv(sweep));

    const BandGap gap = reference_gap(prm);
    const SiteRoles roles = site_roles(prm.p);
    json report;
    report["reference_gap"] = io::to_json(gap);

    std::vector<std::pair<std::string, double>> points = {{"configured", prm.VQ}};
    if (prm.V != 0.0) {
        const WorkingPoints wp = working_points(prm);
        report["working_points"] = {{"VQ_left", wp.VQ_left},
                                    {"VQ_right", wp.VQ_right},
                                    {"chi_left", io::number_or_null(wp.chi_left)},
                                    {"chi_right", io::number_or_null(wp.chi_right)}};
        points.emplace_back("left_working_point", wp.VQ_left);
        points.emplace_back("right_working_point", wp.VQ_right);
        try {
            const double mid = bidirectional_point(prm, wp);
            report["bidirectional_VQ"] = mid;
            points.emplace_back("bidirectional_point", mid);
        } catch (const Error& e) {
            report["bidirectional_VQ"] = nullptr;
            report["bidirectional_note"] = e.what();
        }
    } else {
        report["working_points"] = nullptr;
    }

    std::string pop = "label,VQ_MHz,mode_index,energy_MHz,site,role,population\n";
    json states = json::array();
    for (const auto& [label, vq] : points) {
        ModelParams at = prm;
        at.VQ = vq;
        const ModeSet modes = with_gap(eigenmodes(build_hamiltonian(at, false)), gap);
        for (int k = 0; k < modes.size(); ++k) {
            if (!modes.classes[k].in_gap) continue;
            const Eigen::VectorXcd v = modes.vector(k);
            for (int s = 1; s <= roles.dim; ++s)
                pop += label + ',' + io::format_number(vq) + ',' + std::to_string(k) + ',' +
                       io::format_number(modes.eigenvalues[k].real()) + ',' + std::to_string(s) + ',' +
                       role_name(roles, s) + ',' + io::format_number(std::norm(v(SiteRoles::idx(s)))) + '\n';
            states.push_back({{"label", label},
                              {"VQ", vq},
                              {"mode_index", k},
                              {"energy", modes.eigenvalues[k].real()},
                              {"qubit_weight", modes.classes[k].qubit_weight},
                              {"leftward", io::to_json(directionality(v, roles, Direction::left))},
                              {"rightward", io::to_json(directionality(v, roles, Direction::right))}});
        }
    }
    report["states"] = states;
    out.text("edge_states.csv", pop);
    out.json("directionality.json", report);
    return out.finish();
}

// ---------------------------------------------------------------------------
// scatter

namespace {

json far_detuned_peak_report(const RunConfig& cfg) {
    ModelParams far = cfg.params;
    const double c = band_centre(far);
    if (std::abs(far.VQ - c) < 10.0 * std::max(far.t1, far.t2)) far = far_detuned(far);
    // Range set by the waveguide poles; the parked qubit pole is left out.
    std::vector<double> poles = dressed_pole_energies(far);
    const auto q = std::min_element(poles.begin(), poles.end(),
                                    [&](double a, double b) { return std::abs(a - far.VQ) < std::abs(b - far.VQ); });
    poles.erase(q);
    const double lo = poles.front() - 100.0, hi = poles.back() + 100.0;
    const auto n = static_cast<std::size_t>(integer(cfg.settings, "peak_points", 4000));
    const double prominence = number(cfg.settings, "peak_prominence", 1e-3);
    const auto grid = pole_aware_grid(far, lo, hi, n);
    const LabeledHamiltonian h = build_hamiltonian(far, true);
    std::vector<double> y(grid.size()), x(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        y[i] = std::abs(s_matrix(h, grid[i]).S_RL);
        x[i] = grid[i] + far.f0;
    }
    const PeakSet peaks = extract_peaks(x, y, prominence, far.VQ + far.f0);
    json freq = json::array(), amp = json::array();
    for (const auto& p : peaks.peaks) {
        freq.push_back(p.frequency);
        amp.push_back(p.amplitude);
    }
    return {{"VQ_MHz", far.VQ + far.f0},
            {"kind", "S_RL"},
            {"n_points", grid.size()},
            {"E_range_MHz", {lo + far.f0, hi + far.f0}},
            {"prominence", prominence},
            {"n_peaks", peaks.size()},
            {"expected_peaks", 4 * far.p + 3},
            {"frequencies_MHz", freq},
            {"amplitudes", amp}};
}

}  // namespace

std::vector<std::string> cmd_scatter(const RunConfig& cfg) {
    fs::create_directories(cfg.out_dir);
    Output out{cfg, {}};
    const ModelParams& prm = cfg.params;
    const std::vector<double> VQ_grid =
        has_grid(cfg.settings, "VQ") ? grid_from(cfg.settings, "VQ", prm.VQ, prm.VQ, 1) : std::vector<double>{prm.VQ};
    std::vector<double> E_grid;
    if (has_grid(cfg.settings, "E")) {
        E_grid = grid_from(cfg.settings, "E", -500.0, 500.0, 2001);
    } else if (!VQ_grid.empty()) {
        ModelParams at = prm;
        at.VQ = VQ_grid.front();
        E_grid = default_energy_grid(VQ_grid.size() == 1 ? at : far_detuned(prm));
    }
    const int ldos_site = static_cast<int>(integer(cfg.settings, "ldos_site", 0));
    for (const auto& name : split_list(text(cfg.settings, "kinds", "S_RL"))) {
        const SpectrumKind kind = spectrum_kind_from_string(name);
        const SpectrumMap map = transmission_map(prm, E_grid, VQ_grid, kind, ldos_site, cfg.threads);
        const std::string csv = "map_" + name + ".csv";
        out.text(csv, io::map_csv(map));
        json header = io::map_header(map, csv);
        if (kind == SpectrumKind::LDOS) header["ldos_site"] = ldos_site > 0 ? ldos_site : site_roles(prm.p).portL;
        out.json("map_" + name + ".json", header);
    }
    out.json("peaks.json", far_detuned_peak_report(cfg));
    return out.finish();
}

// ---------------------------------------------------------------------------
// emit

std::vector<std::string> cmd_emit(const RunConfig& cfg) {
    fs::create_directories(cfg.out_dir);
    Output out{cfg, {}};
    const ModelParams& prm = cfg.params;
    const auto samples = static_cast<std::size_t>(integer(cfg.settings, "emission_samples", 20001));
    const std::string exc = text(cfg.settings, "excitation", "dressed");
    require(exc == "dressed" || exc == "bare", ErrorCode::usage, "excitation must be 'dressed' or 'bare'");

    json report;
    const bool lossy = prm.sigmaL.imag() < 0.0 || prm.sigmaR.imag() < 0.0;
    double T1 = number(cfg.settings, "T1", 0.0);
    double w_left = 0.5, w_right = 0.5;
    {
        const BandGap gap = reference_gap(prm);
        const QubitEdgeState st = qubit_edge_state(prm, gap);
        const auto d = directionality(st.vector, site_roles(prm.p), Direction::left);
        const double side = d.pop_left + d.pop_right;
        if (side > 0.0) {
            w_left = d.pop_left / side;
            w_right = d.pop_right / side;
        }
        report["edge_state"] = {{"energy", st.energy}, {"leftward", io::to_json(d)}};
    }
    if (lossy) {
        const double dressed_T1 = dressed_decay_time(prm);
        if (!has(cfg.settings, "T1")) T1 = dressed_T1;
        report["dressed_T1_ns"] = io::number_or_null(dressed_T1);
        json lattice = json::object();
        for (const auto& [name, kind] : {std::pair{"dressed", Excitation::dressed_mode},
                                         std::pair{"bare", Excitation::bare_qubit}}) {
            const EmissionSummary em = qubit_emission(prm, kind, samples);
            lattice[name] = {{"emitted_L", em.emitted_L},
                             {"emitted_R", em.emitted_R},
                             {"ratio", io::number_or_null(em.ratio)},
                             {"ratio_dB", io::number_or_null(em.ratio_dB)},
                             {"final_norm", em.final_norm},
                             {"method", em.trace.method}};
            if (name == exc) {
                const SiteRoles r = site_roles(prm.p);
                TimeTrace small;
                const std::size_t stride = std::max<std::size_t>(1, samples / 2000);
                const std::vector<std::string> keep = {"port_L", "port_R", "site_" + std::to_string(r.Q),
                                                       "site_" + std::to_string(r.M)};
                for (std::size_t i = 0; i < em.trace.t.size(); i += stride) small.t.push_back(em.trace.t[i]);
                for (const auto& k : keep) {
                    std::vector<cplx> ch;
                    const auto& src = em.trace.channel(k);
                    for (std::size_t i = 0; i < src.size(); i += stride) ch.push_back(src[i]);
                    small.add(k, std::move(ch));
                }
                out.text("lattice_trace.csv", io::trace_csv(small));
            }
        }
        report["lattice_emission"] = lattice;
        report["excitation"] = exc;
    } else {
        report["dressed_T1_ns"] = nullptr;
        report["lattice_emission"] = nullptr;
    }
    require(T1 > 0.0, ErrorCode::invalid_parameter, "closed ports: set T1 in the config for the Bloch trace");

    BlochParams bp;
    bp.rabi_freq = number(cfg.settings, "rabi_freq", 10.0);
    bp.T1 = T1;
    bp.T2 = number(cfg.settings, "T2", 2.0 * T1);
    bp.detuning = number(cfg.settings, "detuning", 0.0);
    if (has(cfg.settings, "w_left") || has(cfg.settings, "w_right")) {
        bp.w_left = number(cfg.settings, "w_left", 1.0 - number(cfg.settings, "w_right", 0.0));
        bp.w_right = number(cfg.settings, "w_right", 1.0 - bp.w_left);
    } else {
        bp.w_left = w_left;
        bp.w_right = w_right;
    }
    const double t_end = number(cfg.settings, "t_end", 5.0 * bp.T1);
    const auto t_steps = integer(cfg.settings, "t_steps", static_cast<long>(std::ceil(t_end)) + 1);
    const auto t_grid = uniform_grid(t_end, static_cast<std::size_t>(std::max(0L, t_steps)));
    const double drive_until = number(cfg.settings, "drive_on_until", t_end);
    const TimeTrace bloch = bloch_rabi_trace(bp, t_grid, drive_until);
    out.text("bloch_trace.csv", io::trace_csv(bloch));
    report["bloch"] = {{"rabi_freq", bp.rabi_freq}, {"T1_ns", bp.T1},         {"T2_ns", bp.T2},
                       {"detuning", bp.detuning},   {"w_left", bp.w_left},    {"w_right", bp.w_right},
                       {"t_end_ns", t_end},         {"drive_on_until_ns", drive_until}};

    if (has(cfg.settings, "ramsey_detuning")) {
        const double delta = number(cfg.settings, "ramsey_detuning", 0.0);
        const auto pe = ramsey_trace(delta, t_grid, bp.T2);
        std::string csv = "wait_ns,P_e\n";
        for (std::size_t i = 0; i < t_grid.size(); ++i)
            csv += io::format_number(t_grid[i]) + ',' + io::format_number(pe[i]) + '\n';
        out.text("ramsey.csv", csv);
        report["ramsey_detuning"] = delta;
    }
    out.json("emission.json", report);
    return out.finish();
}

// ---------------------------------------------------------------------------
// fit

std::vector<std::string> cmd_fit(const RunConfig& cfg) {
    fs::create_directories(cfg.out_dir);
    Output out{cfg, {}};
    FitObservations obs;
    json source;
    if (has(cfg.settings, "observations")) {
        obs.peaks = io::read_observations_csv(cfg.settings.at("observations"));
        require(!obs.peaks.peaks.empty(), ErrorCode::invalid_input, "observation file has no rows");
        if (has(cfg.settings, "gaps")) obs.gaps = io::read_gaps_csv(cfg.settings.at("gaps"));
        if (has(cfg.settings, "far_detuned_VQ")) {
            obs.far_detuned_VQ = number(cfg.settings, "far_detuned_VQ", 0.0);
        } else {
            const double x0 = obs.peaks.peaks.front().position;
            for (const auto& p : obs.peaks.peaks)
                require(p.position == x0, ErrorCode::usage,
                        "peaks come from several slices; set far_detuned_VQ in the config");
            obs.far_detuned_VQ = x0;
        }
        source = {{"observations", cfg.settings.at("observations")}, {"gaps", text(cfg.settings, "gaps", "")}};
    } else {
        const double jitter = number(cfg.settings, "jitter_MHz", 2.0);
        obs = synthesize_observations(cfg.params, jitter, cfg.seed);
        out.text("synthetic_peaks.csv", io::observations_csv(obs.peaks));
        out.text("synthetic_gaps.csv", io::gaps_csv(obs.gaps));
        source = {{"synthetic", true}, {"jitter_MHz", jitter}};
    }
    FitMask mask = kAllFree;
    for (const auto& name : split_list(text(cfg.settings, "fix", ""))) {
        const auto it = std::find(kFitParamNames.begin(), kFitParamNames.end(), name);
        require(it != kFitParamNames.end(), ErrorCode::usage, "unknown fit parameter '" + name + "' in fix");
        mask[static_cast<std::size_t>(it - kFitParamNames.begin())] = false;
    }
    FitOptions opt;
    opt.seed = cfg.seed;
    const FitResult fit = cfg.bootstrap_n > 0
                              ? bootstrap_fit(obs, cfg.params, mask, cfg.bootstrap_n, cfg.seed, cfg.threads, opt)
                              : fit_hamiltonian(obs, cfg.params, mask, opt);
    json j = io::to_json(fit);
    j["source"] = source;
    j["far_detuned_VQ"] = obs.far_detuned_VQ;
    j["n_peaks"] = obs.peaks.size();
    j["n_gaps"] = obs.gaps.size();
    if (!fit.converged) j["warning"] = "fit did not converge; best point found is reported";
    out.json("fit.json", j);
    out.text("fit_params.cfg", params_to_config(fit.best));
    return out.finish();
}

// ---------------------------------------------------------------------------
// chi

std::vector<std::string> cmd_chi(const RunConfig& cfg) {
    fs::create_directories(cfg.out_dir);
    Output out{cfg, {}};
    static const std::array<const char*, 4> names = {"s_lL", "s_lR", "s_rL", "s_rR"};
    SignalAmplitudes amps;
    auto set_amp = [&](std::size_t k, double v, double sd) {
        switch (k) {
            case 0: amps.s_lL = v; break;
            case 1: amps.s_lR = v; break;
            case 2: amps.s_rL = v; break;
            default: amps.s_rR = v; break;
        }
        amps.stds[k] = sd;
    };
    json source;
    DemodOptions dopt;
    dopt.cutoff_MHz = number(cfg.settings, "lpf_MHz", kDefaultLowPassMHz);
    dopt.display_prefilter_MHz = number(cfg.settings, "prefilter_MHz", 0.0);
    const int n_boot = std::max(cfg.bootstrap_n, 100);

    const bool direct = std::all_of(names.begin(), names.end(), [&](const char* k) { return has(cfg.settings, k); });
    if (direct) {
        for (std::size_t k = 0; k < 4; ++k)
            set_amp(k, number(cfg.settings, names[k], 0.0), number(cfg.settings, std::string(names[k]) + "_std", 0.0));
        source = {{"amplitudes", "config"}};
    } else {
        TimeTrace traces;
        double f_rabi = number(cfg.settings, "rabi_freq", 10.0);
        if (has(cfg.settings, "traces")) {
            require(has(cfg.settings, "rabi_freq"), ErrorCode::usage, "trace input needs rabi_freq");
            traces = io::read_trace_csv(cfg.settings.at("traces"));
            source = {{"traces", cfg.settings.at("traces")}};
        } else {
            // Synthetic pair of Rabi experiments at the two working points.
            const ModelParams& prm = cfg.params;
            require(prm.sigmaL.imag() < 0.0 && prm.sigmaR.imag() < 0.0, ErrorCode::invalid_parameter,
                    "synthetic traces need lossy ports (or give amplitudes / traces)");
            const WorkingPoints wp = working_points(prm);
            const double noise = number(cfg.settings, "noise", 0.0);
            std::mt19937_64 rng(cfg.seed);
            std::normal_distribution<double> gauss(0.0, noise > 0.0 ? noise : 1.0);
            const double t_end = number(cfg.settings, "t_end", 1000.0);
            const auto t_grid =
                uniform_grid(t_end, static_cast<std::size_t>(integer(cfg.settings, "t_steps", static_cast<long>(t_end) + 1)));
            traces.t = t_grid;
            traces.method = "synthetic";
            const BandGap gap = reference_gap(prm);
            for (int side = 0; side < 2; ++side) {
                ModelParams at = prm;
                at.VQ = side == 0 ? wp.VQ_left : wp.VQ_right;
                const auto st = qubit_edge_state(at, gap);
                const auto d = directionality(st.vector, site_roles(prm.p), Direction::left);
                BlochParams bp;
                bp.rabi_freq = f_rabi;
                bp.T1 = dressed_decay_time(at);
                bp.T2 = 2.0 * bp.T1;
                bp.w_left = d.pop_left / (d.pop_left + d.pop_right);
                bp.w_right = d.pop_right / (d.pop_left + d.pop_right);
                const TimeTrace tr = bloch_rabi_trace(bp, t_grid, t_end);
                for (const char* port : {"L", "R"}) {
                    std::vector<cplx> ch = tr.channel(std::string("port_") + port);
                    if (noise > 0.0)
                        for (auto& v : ch) v += cplx{gauss(rng), gauss(rng)};
                    traces.add(std::string("s_") + (side == 0 ? "l" : "r") + port, std::move(ch));
                }
            }
            out.text("synthetic_traces.csv", io::trace_csv(traces));
            source = {{"synthetic", true}, {"VQ_left", wp.VQ_left}, {"VQ_right", wp.VQ_right}, {"noise", noise}};
        }
        for (std::size_t k = 0; k < 4; ++k) {
            const auto x = best_quadrature(traces.channel(names[k]));
            const auto est = bootstrap_amplitude(traces.t, x, f_rabi, n_boot, cfg.seed + k, cfg.threads, dopt);
            set_amp(k, est.mean, est.std);
        }
        source["rabi_freq"] = f_rabi;
        source["bootstrap_n"] = n_boot;
    }
    json j = io::to_json(chi_estimate(amps), amps);
    j["source"] = source;
    out.json("chi.json", j);
    return out.finish();
}

std::vector<std::string> run_command(const RunConfig& cfg) {
    if (cfg.command == "spectrum") return cmd_spectrum(cfg);
    if (cfg.command == "scatter") return cmd_scatter(cfg);
    if (cfg.command == "emit") return cmd_emit(cfg);
    if (cfg.command == "fit") return cmd_fit(cfg);
    if (cfg.command == "chi") return cmd_chi(cfg);
    fail(ErrorCode::usage, "unknown command '" + cfg.command + "'");
}

}  // namespace rmwg
