#pragma once

#include <limits>

#include "rmwg/spectral.hpp"

namespace rmwg {

enum class Direction { left, right };

// Populations are measured from the central site outwards: sites 1..NL count
// as left, NR..portR as right; M and Q are reported separately.
struct DirectionalityReport {
    double pop_left = 0.0;
    double pop_right = 0.0;
    double pop_M = 0.0;
    double pop_Q = 0.0;
    double chi = 0.0;     // +infinity when the opposite side is empty
    double chi_dB = 0.0;
    double fidelity = 0.0;

    bool chi_infinite() const { return chi == std::numeric_limits<double>::infinity(); }
};

// Opposite-side populations below this count as exactly zero.
inline constexpr double kEmptySide = 1e-14;

DirectionalityReport directionality(const Eigen::VectorXcd& mode, const SiteRoles& roles, Direction direction);

struct WorkingPoints {
    double VQ_left = 0.0;   // qubit energy of the best leftward in-gap state
    double VQ_right = 0.0;
    double chi_left = 0.0;  // directionality reached there
    double chi_right = 0.0;
};

// Maximizes chi over VQ within the reference band gap, separately for
// leftward and rightward in-gap states.
WorkingPoints working_points(const ModelParams& params);

// The in-gap state with the largest qubit weight at the current VQ, against
// the reference gap. Closed (Hermitian) model.
struct QubitEdgeState {
    int mode_index = -1;
    double energy = 0.0;
    Eigen::VectorXcd vector;
};
QubitEdgeState qubit_edge_state(const ModelParams& params, const BandGap& gap);

// VQ between the two working points where the qubit-dominant in-gap state has
// equal left and right populations.
double bidirectional_point(const ModelParams& params, const WorkingPoints& wp);

}  // namespace rmwg
