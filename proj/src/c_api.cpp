#include "rmwg/rmwg.h"

#include <cmath>
#include <filesystem>
#include <new>
#include <string>

#include "rmwg/dynamics.hpp"
#include "rmwg/edge_states.hpp"
#include "rmwg/recipes.hpp"
#include "rmwg/scattering.hpp"
#include "rmwg/sigproc.hpp"
#include "rmwg/spectral.hpp"
#include "rmwg/version.hpp"

struct rmwg_params {
    rmwg::ModelParams value;
};

struct rmwg_hamiltonian {
    rmwg::LabeledHamiltonian value;
};

struct rmwg_modes {
    rmwg::ModeSet value;
};

struct rmwg_run_config {
    rmwg::RunConfig value;
    mutable std::vector<std::string> outputs;
};

namespace {

thread_local std::string g_last_error;

rmwg_status to_status(rmwg::ErrorCode code) {
    using rmwg::ErrorCode;
    switch (code) {
        case ErrorCode::invalid_parameter: return RMWG_INVALID_PARAMETER;
        case ErrorCode::invalid_input: return RMWG_INVALID_INPUT;
        case ErrorCode::parse: return RMWG_PARSE;
        case ErrorCode::io: return RMWG_IO;
        case ErrorCode::numerical: return RMWG_NUMERICAL;
        case ErrorCode::singular: return RMWG_SINGULAR;
        case ErrorCode::not_found: return RMWG_NOT_FOUND;
        case ErrorCode::insufficient_modes: return RMWG_INSUFFICIENT_MODES;
        case ErrorCode::usage: return RMWG_USAGE;
    }
    return RMWG_INTERNAL;
}

template <class Fn>
rmwg_status guard(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return RMWG_OK;
    } catch (const rmwg::Error& e) {
        g_last_error = e.what();
        return to_status(e.code());
    } catch (const std::filesystem::filesystem_error& e) {
        g_last_error = e.what();
        return RMWG_IO;
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return RMWG_INTERNAL;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return RMWG_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return RMWG_INTERNAL;
    }
}

void need(const void* p, const char* what) {
    if (!p) rmwg::fail(rmwg::ErrorCode::invalid_input, std::string(what) + " is null");
}

void fill_gap(const rmwg::BandGap& g, rmwg_band_gap* out) {
    out->lower = g.lower;
    out->upper = g.upper;
    out->degenerate = g.degenerate ? 1 : 0;
    out->n_in_gap = static_cast<int>(g.in_gap_mode_indices.size());
}

void check_mode(const rmwg_modes* modes, int k) {
    need(modes, "modes");
    if (k < 0 || k >= modes->value.size()) rmwg::fail(rmwg::ErrorCode::invalid_input, "mode index out of range");
}

}  // namespace

extern "C" {

const char* rmwg_version(void) { return rmwg::kVersion; }

const char* rmwg_last_error(void) { return g_last_error.c_str(); }

const char* rmwg_status_name(rmwg_status status) {
    switch (status) {
        case RMWG_OK: return "ok";
        case RMWG_INVALID_PARAMETER: return "invalid_parameter";
        case RMWG_INVALID_INPUT: return "invalid_input";
        case RMWG_PARSE: return "parse";
        case RMWG_IO: return "io";
        case RMWG_NUMERICAL: return "numerical";
        case RMWG_SINGULAR: return "singular";
        case RMWG_NOT_FOUND: return "not_found";
        case RMWG_INSUFFICIENT_MODES: return "insufficient_modes";
        case RMWG_USAGE: return "usage";
        case RMWG_INTERNAL: return "internal";
    }
    return "unknown";
}

int rmwg_exit_code(rmwg_status status) {
    switch (status) {
        case RMWG_OK: return 0;
        case RMWG_USAGE:
        case RMWG_INVALID_PARAMETER: return 2;
        case RMWG_INVALID_INPUT:
        case RMWG_PARSE:
        case RMWG_IO: return 3;
        case RMWG_NUMERICAL:
        case RMWG_SINGULAR:
        case RMWG_NOT_FOUND:
        case RMWG_INSUFFICIENT_MODES:
        case RMWG_INTERNAL: return 4;
    }
    return 4;
}

rmwg_status rmwg_params_create(rmwg_params** out) {
    return guard([&] {
        need(out, "out");
        *out = new rmwg_params{};
    });
}

rmwg_status rmwg_params_preset(const char* name, rmwg_params** out) {
    return guard([&] {
        need(name, "name");
        need(out, "out");
        *out = new rmwg_params{rmwg::presets::by_name(name)};
    });
}

rmwg_status rmwg_params_load(const char* path, rmwg_params** out) {
    return guard([&] {
        need(path, "path");
        need(out, "out");
        *out = new rmwg_params{rmwg::load_params(path)};
    });
}

rmwg_status rmwg_params_save(const rmwg_params* params, const char* path) {
    return guard([&] {
        need(params, "params");
        need(path, "path");
        rmwg::save_params(params->value, path);
    });
}

void rmwg_params_destroy(rmwg_params* params) { delete params; }

rmwg_status rmwg_params_set(rmwg_params* params, const char* key, double value) {
    return guard([&] {
        need(params, "params");
        need(key, "key");
        rmwg::ModelParams next = params->value;
        rmwg::set_param(next, key, value);
        next.validate();
        params->value = next;
    });
}

rmwg_status rmwg_params_get(const rmwg_params* params, const char* key, double* value) {
    return guard([&] {
        need(params, "params");
        need(key, "key");
        need(value, "value");
        *value = rmwg::get_param(params->value, key);
    });
}

rmwg_status rmwg_site_roles_for(int p, rmwg_site_roles* out) {
    return guard([&] {
        need(out, "out");
        const auto r = rmwg::site_roles(p);
        *out = {r.dim, r.portL, r.portR, r.M, r.NL, r.NR, r.Q};
    });
}

rmwg_status rmwg_hamiltonian_build(const rmwg_params* params, int include_ports, rmwg_hamiltonian** out) {
    return guard([&] {
        need(params, "params");
        need(out, "out");
        *out = new rmwg_hamiltonian{rmwg::build_hamiltonian(params->value, include_ports != 0)};
    });
}

void rmwg_hamiltonian_destroy(rmwg_hamiltonian* h) { delete h; }

int rmwg_hamiltonian_dim(const rmwg_hamiltonian* h) { return h ? h->value.dim() : 0; }

int rmwg_hamiltonian_is_hermitian(const rmwg_hamiltonian* h) { return h && h->value.hermitian ? 1 : 0; }

rmwg_status rmwg_hamiltonian_entry(const rmwg_hamiltonian* h, int row_site, int col_site, double* re, double* im) {
    return guard([&] {
        need(h, "hamiltonian");
        need(re, "re");
        need(im, "im");
        const int n = h->value.dim();
        if (row_site < 1 || row_site > n || col_site < 1 || col_site > n)
            rmwg::fail(rmwg::ErrorCode::invalid_input, "site out of range");
        const auto v = h->value.at(row_site, col_site);
        *re = v.real();
        *im = v.imag();
    });
}

rmwg_status rmwg_modes_compute(const rmwg_hamiltonian* h, rmwg_modes** out) {
    return guard([&] {
        need(h, "hamiltonian");
        need(out, "out");
        *out = new rmwg_modes{rmwg::eigenmodes(h->value)};
    });
}

void rmwg_modes_destroy(rmwg_modes* modes) { delete modes; }

int rmwg_modes_count(const rmwg_modes* modes) { return modes ? modes->value.size() : 0; }

rmwg_status rmwg_modes_eigenvalue(const rmwg_modes* modes, int k, double* re, double* im) {
    return guard([&] {
        check_mode(modes, k);
        need(re, "re");
        need(im, "im");
        *re = modes->value.eigenvalues[static_cast<std::size_t>(k)].real();
        *im = modes->value.eigenvalues[static_cast<std::size_t>(k)].imag();
    });
}

rmwg_status rmwg_modes_amplitude(const rmwg_modes* modes, int k, int site, double* re, double* im) {
    return guard([&] {
        check_mode(modes, k);
        need(re, "re");
        need(im, "im");
        if (site < 1 || site > modes->value.eigenvectors.rows())
            rmwg::fail(rmwg::ErrorCode::invalid_input, "site out of range");
        const auto v = modes->value.eigenvectors(site - 1, k);
        *re = v.real();
        *im = v.imag();
    });
}

rmwg_status rmwg_modes_class(const rmwg_modes* modes, int k, rmwg_mode_class* out) {
    return guard([&] {
        check_mode(modes, k);
        need(out, "out");
        const auto& c = modes->value.classes[static_cast<std::size_t>(k)];
        *out = {c.in_gap ? 1 : 0, c.localized ? 1 : 0, c.qubit_weight, c.central_weight, c.participation_ratio};
    });
}

rmwg_status rmwg_compute_band_gap(rmwg_modes* modes, const rmwg_params* params, rmwg_band_gap* out) {
    return guard([&] {
        need(modes, "modes");
        need(params, "params");
        need(out, "out");
        const auto gap = rmwg::band_gap(modes->value, params->value);
        modes->value = rmwg::with_gap(std::move(modes->value), gap);
        fill_gap(gap, out);
    });
}

rmwg_status rmwg_reference_gap(const rmwg_params* params, rmwg_band_gap* out) {
    return guard([&] {
        need(params, "params");
        need(out, "out");
        fill_gap(rmwg::reference_gap(params->value), out);
    });
}

rmwg_status rmwg_directionality_of(const rmwg_modes* modes, int k, rmwg_direction direction,
                                   rmwg_directionality* out) {
    return guard([&] {
        check_mode(modes, k);
        need(out, "out");
        const auto r = rmwg::directionality(modes->value.vector(k), modes->value.roles,
                                            direction == RMWG_RIGHT ? rmwg::Direction::right : rmwg::Direction::left);
        *out = {r.pop_left, r.pop_right, r.pop_M, r.pop_Q, r.chi, r.chi_dB, r.fidelity, r.chi_infinite() ? 1 : 0};
    });
}

rmwg_status rmwg_working_points(const rmwg_params* params, double* VQ_left, double* VQ_right) {
    return guard([&] {
        need(params, "params");
        need(VQ_left, "VQ_left");
        need(VQ_right, "VQ_right");
        const auto wp = rmwg::working_points(params->value);
        *VQ_left = wp.VQ_left;
        *VQ_right = wp.VQ_right;
    });
}

rmwg_status rmwg_s_matrix_at(const rmwg_params* params, double E, rmwg_s_matrix* out) {
    return guard([&] {
        need(params, "params");
        need(out, "out");
        const auto s = rmwg::s_matrix(params->value, E);
        *out = {s.S_LL.real(), s.S_LL.imag(), s.S_LR.real(), s.S_LR.imag(),
                s.S_RL.real(), s.S_RL.imag(), s.S_RR.real(), s.S_RR.imag()};
    });
}

rmwg_status rmwg_ldos(const rmwg_params* params, double E, int site, double* out) {
    return guard([&] {
        need(params, "params");
        need(out, "out");
        *out = rmwg::ldos(params->value, E, site);
    });
}

rmwg_status rmwg_dressed_decay_time(const rmwg_params* params, double* T1_ns) {
    return guard([&] {
        need(params, "params");
        need(T1_ns, "T1_ns");
        const double t = rmwg::dressed_decay_time(params->value);
        *T1_ns = std::isinf(t) ? HUGE_VAL : t;
    });
}

rmwg_status rmwg_infer_port_self_energy(const rmwg_params* params, double target_T1_ns, double* sigma_im) {
    return guard([&] {
        need(params, "params");
        need(sigma_im, "sigma_im");
        *sigma_im = rmwg::infer_port_self_energy(params->value, target_T1_ns).imag();
    });
}

rmwg_status rmwg_ramsey(double detuning_MHz, const double* waits_ns, size_t n, double T2_ns, double* p_excited) {
    return guard([&] {
        need(waits_ns, "waits_ns");
        need(p_excited, "p_excited");
        const auto pe = rmwg::ramsey_trace(detuning_MHz, std::vector<double>(waits_ns, waits_ns + n), T2_ns);
        std::copy(pe.begin(), pe.end(), p_excited);
    });
}

rmwg_status rmwg_chi_estimate(const rmwg_amplitudes* amps, rmwg_chi* out) {
    return guard([&] {
        need(amps, "amps");
        need(out, "out");
        rmwg::SignalAmplitudes a;
        a.s_lL = amps->s_lL;
        a.s_lR = amps->s_lR;
        a.s_rL = amps->s_rL;
        a.s_rR = amps->s_rR;
        a.stds = {amps->std_lL, amps->std_lR, amps->std_rL, amps->std_rR};
        const auto c = rmwg::chi_estimate(a);
        *out = {c.chi_l, c.chi_r, c.chi, c.chi_dB, c.fidelity, c.chi_std, c.infinite ? 1 : 0};
    });
}

rmwg_status rmwg_demodulate(const double* t_ns, const double* x, size_t n, double f_rabi_MHz, double cutoff_MHz,
                            double* amplitude) {
    return guard([&] {
        need(t_ns, "t_ns");
        need(x, "x");
        need(amplitude, "amplitude");
        rmwg::DemodOptions opt;
        opt.cutoff_MHz = cutoff_MHz;
        *amplitude = rmwg::demodulate_amplitude(std::vector<double>(t_ns, t_ns + n), std::vector<double>(x, x + n),
                                                f_rabi_MHz, opt);
    });
}

rmwg_status rmwg_bootstrap_amplitude(const double* t_ns, const double* x, size_t n, double f_rabi_MHz,
                                     int n_resamples, uint64_t seed, int threads, double* mean, double* std_dev) {
    return guard([&] {
        need(t_ns, "t_ns");
        need(x, "x");
        need(mean, "mean");
        need(std_dev, "std_dev");
        const auto est = rmwg::bootstrap_amplitude(std::vector<double>(t_ns, t_ns + n), std::vector<double>(x, x + n),
                                                   f_rabi_MHz, n_resamples, seed, threads);
        *mean = est.mean;
        *std_dev = est.std;
    });
}

rmwg_status rmwg_run_config_create(const char* command, const char* preset, const char* config_path,
                                   const char* out_dir, rmwg_run_config** out) {
    return guard([&] {
        need(command, "command");
        need(out, "out");
        *out = new rmwg_run_config{
            rmwg::make_run_config(command, preset ? preset : "", config_path ? config_path : "", out_dir ? out_dir : "."),
            {}};
    });
}

rmwg_status rmwg_run_config_set_seed(rmwg_run_config* cfg, uint64_t seed) {
    return guard([&] {
        need(cfg, "config");
        cfg->value.seed = seed;
    });
}

rmwg_status rmwg_run_config_set_threads(rmwg_run_config* cfg, int threads) {
    return guard([&] {
        need(cfg, "config");
        if (threads < 1) rmwg::fail(rmwg::ErrorCode::usage, "threads must be >= 1");
        cfg->value.threads = threads;
    });
}

void rmwg_run_config_destroy(rmwg_run_config* cfg) { delete cfg; }

rmwg_status rmwg_run(const rmwg_run_config* cfg, size_t* n_outputs) {
    return guard([&] {
        need(cfg, "config");
        cfg->outputs = rmwg::run_command(cfg->value);
        if (n_outputs) *n_outputs = cfg->outputs.size();
    });
}

const char* rmwg_run_output(const rmwg_run_config* cfg, size_t i) {
    if (!cfg || i >= cfg->outputs.size()) return nullptr;
    return cfg->outputs[i].c_str();
}

}  // extern "C"
