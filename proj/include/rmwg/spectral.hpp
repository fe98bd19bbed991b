#pragma once

#include <vector>

#include "rmwg/model.hpp"

namespace rmwg {

struct ModeClass {
    bool in_gap = false;
    double qubit_weight = 0.0;    // |psi_Q|^2
    double central_weight = 0.0;  // |psi_M|^2
    double participation_ratio = 1.0;
    // Participation ratio below half the median over all modes.
    bool localized = false;
};

struct ModeSet {
    std::vector<cplx> eigenvalues;  // sorted by real part
    Eigen::MatrixXcd eigenvectors;  // unit-norm columns
    std::vector<ModeClass> classes;
    SiteRoles roles;
    bool hermitian = true;

    int size() const { return static_cast<int>(eigenvalues.size()); }
    Eigen::VectorXcd vector(int k) const { return eigenvectors.col(k); }
};

ModeSet eigenmodes(const LabeledHamiltonian& h);

// Sorted real eigenvalues of the closed model (no eigenvectors). Hot path for
// fitting and sweeps.
Eigen::VectorXd closed_eigenvalues(const ModelParams& params);

// Band-edge levels shift slightly with the qubit energy even when it is far
// detuned; levels this close (relative to the gap width) to an edge are not
// counted as in-gap.
inline constexpr double kGapEdgeMargin = 0.01;

struct BandGap {
    double lower = 0.0;
    double upper = 0.0;
    std::vector<int> in_gap_mode_indices;
    // Set when the widest interval is not clearly larger than the typical
    // band level spacing (e.g. a uniform chain).
    bool degenerate = false;

    double width() const { return upper - lower; }
    double centre() const { return 0.5 * (lower + upper); }
    bool contains(double e) const {
        const double margin = kGapEdgeMargin * width();
        return e > lower + margin && e < upper - margin;
    }
};

// Band modes exclude qubit- or central-dominant modes (weight > 0.5) and
// localized modes; the gap is the widest interval between consecutive band
// eigenvalues whose midpoint lies within +-(t1 + t2) of the band centre.
BandGap band_gap(const ModeSet& modes, const ModelParams& params);

// Gap of the Hermitian model with the qubit far-detuned. This is the reference
// interval used to call a mode "in-gap" at any qubit energy.
BandGap reference_gap(const ModelParams& params);

// Same modes with the in_gap classification filled from the given interval.
ModeSet with_gap(ModeSet modes, const BandGap& gap);

std::vector<bool> qubit_coupling_flags(const ModeSet& modes, const SiteRoles& roles, double threshold);

struct SweepPoint {
    double VQ = 0.0;
    ModeSet modes;  // in_gap classified against the reference gap
};

// One Hermitian eigensolve per grid point, independent across points.
std::vector<SweepPoint> sweep_qubit_energy(const ModelParams& params, const std::vector<double>& VQ_grid,
                                           int threads = 1);

// Branch assignment across consecutive sweep points: result[i][b] is the mode
// index at point i that continues branch b (branch b starts at mode b of point 0).
// Nearest eigenvalue first, eigenvector overlap breaks near-ties.
std::vector<std::vector<int>> track_branches(const std::vector<SweepPoint>& sweep);

}  // namespace rmwg
