#pragma once

#include <string>
#include <vector>

#include "rmwg/model.hpp"

namespace rmwg {

struct SMatrixPoint {
    double E = 0.0;
    cplx S_LL, S_LR, S_RL, S_RR;
};

enum class SpectrumKind { S_LL, S_LR, S_RL, S_RR, LDOS };

const char* to_string(SpectrumKind kind);
SpectrumKind spectrum_kind_from_string(const std::string& name);

// values(iE, iVQ) is stored row-major by energy: values[iE * VQ_grid.size() + iVQ].
struct SpectrumMap {
    std::vector<double> E_grid;   // probe energy in lab frame (model detuning + f0)
    std::vector<double> VQ_grid;
    std::vector<double> values;
    SpectrumKind kind = SpectrumKind::S_RL;

    double at(std::size_t iE, std::size_t iVQ) const { return values[iE * VQ_grid.size() + iVQ]; }
    double& at(std::size_t iE, std::size_t iVQ) { return values[iE * VQ_grid.size() + iVQ]; }
    std::vector<double> column(std::size_t iVQ) const;  // spectrum at one qubit energy
};

// G(E) = (E - H)^-1 of the port-dressed Hamiltonian.
Eigen::MatrixXcd greens_function(const LabeledHamiltonian& h, double E);

// Two-probe amplitudes from the dressed Green's function, with
// Gamma = -2 Im(sigma): S_ab = -delta_ab + i sqrt(Gamma_a Gamma_b) G_ab.
SMatrixPoint s_matrix(const LabeledHamiltonian& h, double E);
SMatrixPoint s_matrix(const ModelParams& params, double E);

// -Im G_ii(E) / pi at a 1-based site.
double ldos(const LabeledHamiltonian& h, double E, int site);
double ldos(const ModelParams& params, double E, int site);

// Element-wise |S| (or LDOS at ldos_site, default portL) over model detunings
// E_grid and qubit energies VQ_grid.
SpectrumMap transmission_map(const ModelParams& params, const std::vector<double>& E_grid,
                             const std::vector<double>& VQ_grid, SpectrumKind kind, int ldos_site = 0,
                             int threads = 1);

// n-point grid on [lo, hi] that is uniform except that the nearest point to
// the real part of every dressed pole inside the range is moved onto the
// pole. Resonances narrower than the spacing are therefore always sampled.
std::vector<double> pole_aware_grid(const ModelParams& params, double lo, double hi, std::size_t n);

// 0.5 MHz spacing within +-(t1 + t2 + 2|V|) of the band centre, 5 MHz spacing
// outside out to the outermost dressed pole (qubit excluded when far-detuned)
// plus 50 MHz, poles snapped in.
std::vector<double> default_energy_grid(const ModelParams& params);

// Real parts of the eigenvalues of the port-dressed Hamiltonian.
std::vector<double> dressed_pole_energies(const ModelParams& params);

}  // namespace rmwg
