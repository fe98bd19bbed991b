#pragma once

#include <complex>
#include <map>
#include <string>

#include <Eigen/Dense>

#include "rmwg/error.hpp"

namespace rmwg {

using cplx = std::complex<double>;

// Angular conversion: a frequency in MHz times this factor is a rate in rad/ns.
inline constexpr double kRadPerNsPerMHz = 2.0 * 3.14159265358979323846 * 1e-3;

// Hamiltonian and port parameters of the two-chain waveguide with a
// side-coupled qubit. All energies are linear frequencies in MHz.
struct ModelParams {
    int p = 1;           // strongly coupled pairs per half-chain
    double V = 0.0;      // on-site modulation amplitude
    double t1 = 0.0;     // weak tunnel coupling
    double t2 = 0.0;     // strong tunnel coupling
    double tQ = 0.0;     // qubit to central-site coupling
    double VQ = 0.0;     // qubit energy
    double VM = 0.0;     // central-site energy
    cplx sigmaL{};       // port self-energies (wide-band, passive: Im <= 0)
    cplx sigmaR{};
    double f0 = 0.0;     // global offset used only when comparing to lab frequencies

    void validate() const;

    friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

// 1-based site indices of the canonical layout.
struct SiteRoles {
    int dim = 0;
    int portL = 0;
    int portR = 0;
    int M = 0;
    int NL = 0;
    int NR = 0;
    int Q = 0;

    // 0-based row/column of a 1-based site.
    static constexpr int idx(int site) { return site - 1; }

    friend bool operator==(const SiteRoles&, const SiteRoles&) = default;
};

SiteRoles site_roles(int p);

struct LabeledHamiltonian {
    Eigen::MatrixXcd matrix;
    SiteRoles roles;
    bool hermitian = true;
    // Self-energies already folded into the port diagonals (zero when hermitian).
    cplx sigmaL{};
    cplx sigmaR{};

    int dim() const { return static_cast<int>(matrix.rows()); }
    cplx at(int site_row, int site_col) const {
        return matrix(SiteRoles::idx(site_row), SiteRoles::idx(site_col));
    }
};

LabeledHamiltonian build_hamiltonian(const ModelParams& params, bool include_ports);

// Wraps an arbitrary closed Hamiltonian (toy models, surrogates) with the
// given roles and adds the port self-energies on roles.portL / roles.portR.
LabeledHamiltonian make_labeled(Eigen::MatrixXcd closed, const SiteRoles& roles,
                                cplx sigmaL, cplx sigmaR);

// Real symmetric waveguide + qubit matrix without ports; used on hot paths.
Eigen::MatrixXd build_real_hamiltonian(const ModelParams& params);

// The alternating +-V pattern averages to zero across both arms, so the band
// is centred on zero detuning for any p.
inline double band_centre(const ModelParams&) { return 0.0; }

// Copy of params with the qubit parked at centre + 10 max(t1, t2).
ModelParams far_detuned(const ModelParams& params);

// Flat key = value config format. Keys: p V t1 t2 tQ VQ VM sigmaL_re sigmaL_im
// sigmaR_re sigmaR_im f0.
using KeyValues = std::map<std::string, std::string>;

KeyValues read_key_values(const std::string& path);
KeyValues parse_key_values(const std::string& text, const std::string& source = "<string>");
bool is_model_key(const std::string& key);
ModelParams params_from_key_values(const KeyValues& kv, ModelParams base = {});
std::string params_to_config(const ModelParams& params);
ModelParams load_params(const std::string& path);
void save_params(const ModelParams& params, const std::string& path);

double get_param(const ModelParams& params, const std::string& key);
void set_param(ModelParams& params, const std::string& key, double value);

namespace presets {
// p=10 ideal chain with the qubit at the leftward working point.
ModelParams fig1();
// p=4 fitted device with -18j MHz ports and the qubit far-detuned.
ModelParams fig3();
ModelParams by_name(const std::string& name);
}  // namespace presets

}  // namespace rmwg
