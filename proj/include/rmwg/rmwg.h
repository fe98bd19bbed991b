/* C interface to the rmwg library. All functions return an rmwg_status;
 * on failure rmwg_last_error() holds a message for the calling thread. */
#ifndef RMWG_H
#define RMWG_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define RMWG_API __declspec(dllexport)
#else
#define RMWG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rmwg_status {
    RMWG_OK = 0,
    RMWG_INVALID_PARAMETER = 1,
    RMWG_INVALID_INPUT = 2,
    RMWG_PARSE = 3,
    RMWG_IO = 4,
    RMWG_NUMERICAL = 5,
    RMWG_SINGULAR = 6,
    RMWG_NOT_FOUND = 7,
    RMWG_INSUFFICIENT_MODES = 8,
    RMWG_USAGE = 9,
    RMWG_INTERNAL = 10
} rmwg_status;

RMWG_API const char* rmwg_version(void);
RMWG_API const char* rmwg_last_error(void);
RMWG_API const char* rmwg_status_name(rmwg_status status);
/* Process exit code for a status: 0 ok, 2 usage, 3 data, 4 numerical. */
RMWG_API int rmwg_exit_code(rmwg_status status);

/* ---- parameters ---- */
typedef struct rmwg_params rmwg_params;

RMWG_API rmwg_status rmwg_params_create(rmwg_params** out);
RMWG_API rmwg_status rmwg_params_preset(const char* name, rmwg_params** out);
RMWG_API rmwg_status rmwg_params_load(const char* path, rmwg_params** out);
RMWG_API rmwg_status rmwg_params_save(const rmwg_params* params, const char* path);
RMWG_API void rmwg_params_destroy(rmwg_params* params);
/* Keys: p V t1 t2 tQ VQ VM sigmaL_re sigmaL_im sigmaR_re sigmaR_im f0 */
RMWG_API rmwg_status rmwg_params_set(rmwg_params* params, const char* key, double value);
RMWG_API rmwg_status rmwg_params_get(const rmwg_params* params, const char* key, double* value);

typedef struct rmwg_site_roles {
    int dim, portL, portR, M, NL, NR, Q;
} rmwg_site_roles;

RMWG_API rmwg_status rmwg_site_roles_for(int p, rmwg_site_roles* out);

/* ---- Hamiltonian ---- */
typedef struct rmwg_hamiltonian rmwg_hamiltonian;

RMWG_API rmwg_status rmwg_hamiltonian_build(const rmwg_params* params, int include_ports, rmwg_hamiltonian** out);
RMWG_API void rmwg_hamiltonian_destroy(rmwg_hamiltonian* h);
RMWG_API int rmwg_hamiltonian_dim(const rmwg_hamiltonian* h);
RMWG_API int rmwg_hamiltonian_is_hermitian(const rmwg_hamiltonian* h);
/* Sites are 1-based. */
RMWG_API rmwg_status rmwg_hamiltonian_entry(const rmwg_hamiltonian* h, int row_site, int col_site, double* re,
                                            double* im);

/* ---- modes ---- */
typedef struct rmwg_modes rmwg_modes;

typedef struct rmwg_mode_class {
    int in_gap;
    int localized;
    double qubit_weight;
    double central_weight;
    double participation_ratio;
} rmwg_mode_class;

typedef struct rmwg_band_gap {
    double lower;
    double upper;
    int degenerate;
    int n_in_gap;
} rmwg_band_gap;

RMWG_API rmwg_status rmwg_modes_compute(const rmwg_hamiltonian* h, rmwg_modes** out);
RMWG_API void rmwg_modes_destroy(rmwg_modes* modes);
RMWG_API int rmwg_modes_count(const rmwg_modes* modes);
RMWG_API rmwg_status rmwg_modes_eigenvalue(const rmwg_modes* modes, int k, double* re, double* im);
RMWG_API rmwg_status rmwg_modes_amplitude(const rmwg_modes* modes, int k, int site, double* re, double* im);
RMWG_API rmwg_status rmwg_modes_class(const rmwg_modes* modes, int k, rmwg_mode_class* out);
/* Classifies the modes against the gap it finds (in_gap flags are updated). */
RMWG_API rmwg_status rmwg_compute_band_gap(rmwg_modes* modes, const rmwg_params* params, rmwg_band_gap* out);
RMWG_API rmwg_status rmwg_reference_gap(const rmwg_params* params, rmwg_band_gap* out);

/* ---- edge states ---- */
typedef enum rmwg_direction { RMWG_LEFT = 0, RMWG_RIGHT = 1 } rmwg_direction;

typedef struct rmwg_directionality {
    double pop_left, pop_right, pop_M, pop_Q;
    double chi;     /* HUGE_VAL when chi_infinite */
    double chi_dB;
    double fidelity;
    int chi_infinite;
} rmwg_directionality;

RMWG_API rmwg_status rmwg_directionality_of(const rmwg_modes* modes, int k, rmwg_direction direction,
                                            rmwg_directionality* out);
RMWG_API rmwg_status rmwg_working_points(const rmwg_params* params, double* VQ_left, double* VQ_right);

/* ---- scattering ---- */
typedef struct rmwg_s_matrix {
    double LL_re, LL_im, LR_re, LR_im, RL_re, RL_im, RR_re, RR_im;
} rmwg_s_matrix;

RMWG_API rmwg_status rmwg_s_matrix_at(const rmwg_params* params, double E, rmwg_s_matrix* out);
RMWG_API rmwg_status rmwg_ldos(const rmwg_params* params, double E, int site, double* out);

/* ---- dynamics ---- */
/* T1 in ns; HUGE_VAL for closed ports. */
RMWG_API rmwg_status rmwg_dressed_decay_time(const rmwg_params* params, double* T1_ns);
/* Imaginary part of the (equal, purely imaginary) port self-energy. */
RMWG_API rmwg_status rmwg_infer_port_self_energy(const rmwg_params* params, double target_T1_ns, double* sigma_im);
RMWG_API rmwg_status rmwg_ramsey(double detuning_MHz, const double* waits_ns, size_t n, double T2_ns, double* p_excited);

/* ---- signal processing ---- */
typedef struct rmwg_amplitudes {
    double s_lL, s_lR, s_rL, s_rR;
    double std_lL, std_lR, std_rL, std_rR;
} rmwg_amplitudes;

typedef struct rmwg_chi {
    double chi_l, chi_r, chi, chi_dB, fidelity, chi_std;
    int infinite;
} rmwg_chi;

RMWG_API rmwg_status rmwg_chi_estimate(const rmwg_amplitudes* amps, rmwg_chi* out);
RMWG_API rmwg_status rmwg_demodulate(const double* t_ns, const double* x, size_t n, double f_rabi_MHz,
                                     double cutoff_MHz, double* amplitude);
RMWG_API rmwg_status rmwg_bootstrap_amplitude(const double* t_ns, const double* x, size_t n, double f_rabi_MHz,
                                              int n_resamples, uint64_t seed, int threads, double* mean,
                                              double* std_dev);

/* ---- recipes ---- */
typedef struct rmwg_run_config rmwg_run_config;

/* preset and config_path may be NULL or empty (but not both). */
RMWG_API rmwg_status rmwg_run_config_create(const char* command, const char* preset, const char* config_path,
                                            const char* out_dir, rmwg_run_config** out);
RMWG_API rmwg_status rmwg_run_config_set_seed(rmwg_run_config* cfg, uint64_t seed);
RMWG_API rmwg_status rmwg_run_config_set_threads(rmwg_run_config* cfg, int threads);
RMWG_API void rmwg_run_config_destroy(rmwg_run_config* cfg);
/* Runs the command; n_outputs (optional) receives the number of files written. */
RMWG_API rmwg_status rmwg_run(const rmwg_run_config* cfg, size_t* n_outputs);
RMWG_API const char* rmwg_run_output(const rmwg_run_config* cfg, size_t i);

#ifdef __cplusplus
}
#endif

#endif
