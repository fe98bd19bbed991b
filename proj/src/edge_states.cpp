#include "rmwg/edge_states.hpp"

#include <cmath>
#include <tuple>

#include "rmwg/optim.hpp"

namespace rmwg {

DirectionalityReport directionality(const Eigen::VectorXcd& mode, const SiteRoles& roles, Direction direction) {
    require(mode.size() == roles.dim, ErrorCode::invalid_input, "mode length does not match roles.dim");
    const double norm2 = mode.squaredNorm();
    require(norm2 > 0.0 && std::isfinite(norm2), ErrorCode::invalid_input, "directionality of a zero vector");

    DirectionalityReport r;
    for (int s = 1; s <= roles.NL; ++s) r.pop_left += std::norm(mode(SiteRoles::idx(s)));
    for (int s = roles.NR; s <= roles.portR; ++s) r.pop_right += std::norm(mode(SiteRoles::idx(s)));
    r.pop_M = std::norm(mode(SiteRoles::idx(roles.M)));
    r.pop_Q = std::norm(mode(SiteRoles::idx(roles.Q)));
    r.pop_left /= norm2;
    r.pop_right /= norm2;
    r.pop_M /= norm2;
    r.pop_Q /= norm2;

    const double intended = direction == Direction::left ? r.pop_left : r.pop_right;
    const double opposite = direction == Direction::left ? r.pop_right : r.pop_left;
    if (opposite < kEmptySide) {
        r.chi = std::numeric_limits<double>::infinity();
        r.chi_dB = std::numeric_limits<double>::infinity();
        r.fidelity = 1.0;
    } else {
        r.chi = intended / opposite;
        r.chi_dB = 10.0 * std::log10(r.chi);
        r.fidelity = r.chi / (1.0 + r.chi);
    }
    return r;
}

namespace {

// log(opposite / intended) of the most directional in-gap state; lower is
// better. +inf when there is no in-gap state.
double directional_cost(const ModelParams& params, const BandGap& gap, double VQ, Direction d) {
    ModelParams at = params;
    at.VQ = VQ;
    const ModeSet modes = eigenmodes(build_hamiltonian(at, false));
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k < modes.size(); ++k) {
        if (!gap.contains(modes.eigenvalues[k].real())) continue;
        const auto r = directionality(modes.vector(k), modes.roles, d);
        const double intended = d == Direction::left ? r.pop_left : r.pop_right;
        const double opposite = d == Direction::left ? r.pop_right : r.pop_left;
        best = std::min(best, std::log(opposite + 1e-300) - std::log(intended + 1e-300));
    }
    return best;
}

std::pair<double, double> optimize_direction(const ModelParams& params, const BandGap& gap, Direction d) {
    constexpr int kScan = 241;
    const double lo = gap.lower;
    const double hi = gap.upper;
    const double step = (hi - lo) / (kScan + 1);
    std::vector<double> grid(kScan), cost(kScan);
    int best = -1;
    for (int i = 0; i < kScan; ++i) {
        grid[i] = lo + (i + 1) * step;
        cost[i] = directional_cost(params, gap, grid[i], d);
        if (std::isfinite(cost[i]) && (best < 0 || cost[i] < cost[best])) best = i;
    }
    if (best < 0) fail(ErrorCode::not_found, "no in-gap state found while scanning the qubit energy");

    double x = grid[best];
    if (best > 0 && best + 1 < kScan && cost[best] < cost[best - 1] && cost[best] < cost[best + 1]) {
        auto f = [&](double v) {
            const double c = directional_cost(params, gap, v, d);
            return std::isfinite(c) ? c : 1e300;
        };
        x = optim::brent_minimize(f, grid[best - 1], grid[best], grid[best + 1], 1e-9, 200);
    }
    return {x, std::exp(-directional_cost(params, gap, x, d))};
}

}  // namespace

WorkingPoints working_points(const ModelParams& params) {
    params.validate();
    require(params.V != 0.0, ErrorCode::invalid_parameter,
            "working points need V != 0 (no left/right symmetry breaking)");
    const BandGap gap = reference_gap(params);
    WorkingPoints wp;
    std::tie(wp.VQ_left, wp.chi_left) = optimize_direction(params, gap, Direction::left);
    std::tie(wp.VQ_right, wp.chi_right) = optimize_direction(params, gap, Direction::right);
    return wp;
}

QubitEdgeState qubit_edge_state(const ModelParams& params, const BandGap& gap) {
    const ModeSet modes = eigenmodes(build_hamiltonian(params, false));
    QubitEdgeState out;
    double best = -1.0;
    for (int k = 0; k < modes.size(); ++k) {
        if (!gap.contains(modes.eigenvalues[k].real())) continue;
        if (modes.classes[k].qubit_weight > best) {
            best = modes.classes[k].qubit_weight;
            out.mode_index = k;
        }
    }
    if (out.mode_index < 0) fail(ErrorCode::not_found, "no in-gap state at VQ = " + std::to_string(params.VQ));
    out.energy = modes.eigenvalues[out.mode_index].real();
    out.vector = modes.vector(out.mode_index);
    return out;
}

double bidirectional_point(const ModelParams& params, const WorkingPoints& wp) {
    const BandGap gap = reference_gap(params);
    auto balance = [&](double VQ) {
        ModelParams at = params;
        at.VQ = VQ;
        const auto st = qubit_edge_state(at, gap);
        const auto r = directionality(st.vector, site_roles(params.p), Direction::left);
        return std::log(r.pop_left + 1e-300) - std::log(r.pop_right + 1e-300);
    };
    const double a = std::min(wp.VQ_left, wp.VQ_right);
    const double b = std::max(wp.VQ_left, wp.VQ_right);
    const double pad = 1e-6 * std::max(1.0, b - a);
    return optim::brent_root(balance, a + pad, b - pad, 1e-12, 200);
}

}  // namespace rmwg
