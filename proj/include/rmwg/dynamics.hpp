#pragma once

#include <limits>
#include <string>
#include <vector>

#include "rmwg/edge_states.hpp"

namespace rmwg {

struct TimeTrace {
    std::vector<double> t;  // ns, uniform
    std::vector<std::string> names;
    std::vector<std::vector<cplx>> channels;
    std::string method;  // how the trace was propagated

    std::size_t size() const { return t.size(); }
    const std::vector<cplx>& channel(const std::string& name) const;
    void add(std::string name, std::vector<cplx> samples);
};

std::vector<double> uniform_grid(double t_end, std::size_t n);

// psi(t) = exp(-i 2pi 1e-3 H t) psi0 with H in MHz and t in ns. Channels are
// site_1..site_N plus port_L / port_R output fields sqrt(Gamma_p) psi_port(t).
// Non-diagonalizable (or badly conditioned) H falls back to repeated
// multiplication by the exact one-step propagator; trace.method says which.
TimeTrace evolve_single_excitation(const LabeledHamiltonian& h, const Eigen::VectorXcd& psi0,
                                   const std::vector<double>& t_grid);

inline constexpr double kInfiniteTime = std::numeric_limits<double>::infinity();

// T1 = 1 / (2 * 2pi 1e-3 * |Im E|) of the in-gap dressed mode with the
// largest qubit weight; infinite for a closed system.
double dressed_decay_time(const ModelParams& params);

// Purely imaginary port self-energy (equal on both ports) whose dressed decay
// time matches target_T1. An infinite target gives zero.
cplx infer_port_self_energy(const ModelParams& params, double target_T1);

enum class Excitation {
    bare_qubit,    // all amplitude on the qubit site
    dressed_mode,  // the qubit-dominant in-gap eigenmode of the dressed H
};

struct EmissionSummary {
    double emitted_L = 0.0;  // integral of |o_L|^2 dt
    double emitted_R = 0.0;
    double ratio = 0.0;      // emitted_L / emitted_R
    double ratio_dB = 0.0;
    double final_norm = 0.0;
    TimeTrace trace;
};

EmissionSummary qubit_emission(const ModelParams& params, Excitation excitation, std::size_t samples = 20001);

struct BlochParams {
    double rabi_freq = 0.0;  // MHz
    double T1 = 1.0;         // ns
    double T2 = 2.0;         // ns, may be infinite
    double detuning = 0.0;   // MHz
    double w_left = 1.0;     // directional emission weights
    double w_right = 0.0;

    void validate() const;
};

// Bloch vector with z = +1 the excited state.
struct BlochVector {
    double x = 0.0, y = 0.0, z = -1.0;
};

// Largest fixed RK4 step used for these parameters, ns.
double bloch_time_step(const BlochParams& bp);

// Driven Bloch equations in the rotating frame (drive about x while
// t < drive_on_until, free precession and decay afterwards). Channels:
// sigma_z, sigma_minus = (x - i y)/2, port_L and port_R = sqrt(w_p) sigma_minus.
TimeTrace bloch_rabi_trace(const BlochParams& bp, const std::vector<double>& t_grid, double drive_on_until,
                           BlochVector initial = {});

// P_e after X_pi/2 - wait - X_pi/2 with detuning delta (MHz) and waits in ns.
std::vector<double> ramsey_trace(double detuning, const std::vector<double>& wait_grid, double T2);

struct DecayFit {
    double tau = 0.0;        // ns
    double amplitude = 0.0;
    double r_squared = 0.0;
};

// Log-linear least squares of |y - baseline| = A exp(-t / tau) over samples
// with |y - baseline| > floor.
DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& y, double baseline = 0.0,
                   double floor = 1e-12);

}  // namespace rmwg
