#include "rmwg/model.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace rmwg {

const char* to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::invalid_parameter: return "invalid-parameter";
        case ErrorCode::invalid_input: return "invalid-input";
        case ErrorCode::parse: return "parse";
        case ErrorCode::io: return "io";
        case ErrorCode::numerical: return "numerical";
        case ErrorCode::singular: return "singular";
        case ErrorCode::not_found: return "not-found";
        case ErrorCode::insufficient_modes: return "insufficient-modes";
        case ErrorCode::usage: return "usage";
    }
    return "unknown";
}

void ModelParams::validate() const {
    require(p >= 1, ErrorCode::invalid_parameter, "p must be >= 1, got " + std::to_string(p));
    for (auto [name, v] : std::array<std::pair<const char*, double>, 3>{{{"t1", t1}, {"t2", t2}, {"tQ", tQ}}}) {
        require(v >= 0.0 && std::isfinite(v), ErrorCode::invalid_parameter,
                std::string(name) + " must be finite and >= 0");
    }
    for (double v : {V, VQ, VM, f0, sigmaL.real(), sigmaL.imag(), sigmaR.real(), sigmaR.imag()}) {
        require(std::isfinite(v), ErrorCode::invalid_parameter, "model parameters must be finite");
    }
    require(sigmaL.imag() <= 0.0 && sigmaR.imag() <= 0.0, ErrorCode::invalid_parameter,
            "port self-energies must be passive (Im sigma <= 0)");
}

SiteRoles site_roles(int p) {
    require(p >= 1, ErrorCode::invalid_parameter, "p must be >= 1, got " + std::to_string(p));
    SiteRoles r;
    r.dim = 4 * p + 4;
    r.portL = 1;
    r.NL = 2 * p + 1;
    r.M = 2 * p + 2;
    r.NR = 2 * p + 3;
    r.portR = 4 * p + 3;
    r.Q = 4 * p + 4;
    return r;
}

namespace {

template <class Matrix>
void fill_closed(Matrix& h, const ModelParams& prm, const SiteRoles& r) {
    using S = typename Matrix::Scalar;
    h.setZero(r.dim, r.dim);
    auto onsite = [&](int site, double e) { h(site - 1, site - 1) = S(e); };
    auto bond = [&](int a, int b, double t) {
        h(a - 1, b - 1) = S(-t);
        h(b - 1, a - 1) = S(-t);
    };

    // Left arm: odd sites sit at -V, up to and including NL.
    for (int s = 1; s <= r.NL; ++s) onsite(s, (s % 2 == 1) ? -prm.V : prm.V);
    onsite(r.M, prm.VM);
    onsite(r.NR, prm.V);
    // Right arm beyond NR restarts the pattern at -V.
    for (int s = r.NR + 1; s <= r.portR; ++s) onsite(s, ((s - r.NR - 1) % 2 == 0) ? -prm.V : prm.V);
    onsite(r.Q, prm.VQ);

    const int p = prm.p;
    for (int l = 1; l <= p; ++l) bond(2 * l - 1, 2 * l, prm.t2);
    for (int l = 1; l <= p; ++l) bond(2 * l, 2 * l + 1, prm.t1);
    bond(r.NL, r.M, prm.t1);
    bond(r.M, r.NR, prm.t1);
    bond(r.NR, r.NR + 1, prm.t1);
    const int n = r.NR + 1;
    for (int l = 1; l <= p; ++l) bond(n + 2 * l - 2, n + 2 * l - 1, prm.t2);
    // l = p would land on the qubit site; the qubit only couples through tQ.
    for (int l = 1; l < p; ++l) bond(n + 2 * l - 1, n + 2 * l, prm.t1);
    bond(r.M, r.Q, prm.tQ);
}

}  // namespace

LabeledHamiltonian build_hamiltonian(const ModelParams& params, bool include_ports) {
    params.validate();
    LabeledHamiltonian out;
    out.roles = site_roles(params.p);
    fill_closed(out.matrix, params, out.roles);
    if (include_ports) {
        out.matrix(SiteRoles::idx(out.roles.portL), SiteRoles::idx(out.roles.portL)) += params.sigmaL;
        out.matrix(SiteRoles::idx(out.roles.portR), SiteRoles::idx(out.roles.portR)) += params.sigmaR;
        out.sigmaL = params.sigmaL;
        out.sigmaR = params.sigmaR;
        out.hermitian = false;
    }
    return out;
}

LabeledHamiltonian make_labeled(Eigen::MatrixXcd closed, const SiteRoles& roles, cplx sigmaL, cplx sigmaR) {
    require(closed.rows() == closed.cols() && closed.rows() == roles.dim, ErrorCode::invalid_input,
            "matrix shape does not match roles.dim");
    auto in_range = [&](int s) { return s >= 1 && s <= roles.dim; };
    require(in_range(roles.portL) && in_range(roles.portR) && in_range(roles.M) && in_range(roles.NL) &&
                in_range(roles.NR) && in_range(roles.Q),
            ErrorCode::invalid_input, "site roles out of range");
    require(sigmaL.imag() <= 0.0 && sigmaR.imag() <= 0.0, ErrorCode::invalid_parameter,
            "port self-energies must be passive (Im sigma <= 0)");
    LabeledHamiltonian out;
    out.matrix = std::move(closed);
    out.roles = roles;
    const bool ports = sigmaL != cplx{} || sigmaR != cplx{};
    out.matrix(SiteRoles::idx(roles.portL), SiteRoles::idx(roles.portL)) += sigmaL;
    out.matrix(SiteRoles::idx(roles.portR), SiteRoles::idx(roles.portR)) += sigmaR;
    out.sigmaL = sigmaL;
    out.sigmaR = sigmaR;
    out.hermitian = !ports && (out.matrix - out.matrix.adjoint()).cwiseAbs().maxCoeff() == 0.0;
    return out;
}

Eigen::MatrixXd build_real_hamiltonian(const ModelParams& params) {
    Eigen::MatrixXd h;
    fill_closed(h, params, site_roles(params.p));
    return h;
}

ModelParams far_detuned(const ModelParams& params) {
    ModelParams out = params;
    out.VQ = band_centre(params) + std::max(10.0 * std::max(params.t1, params.t2), 1.0);
    return out;
}

// ---------------------------------------------------------------------------
// key = value config

KeyValues parse_key_values(const std::string& text, const std::string& source) {
    KeyValues kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return std::string{};
        const auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            fail(ErrorCode::parse, source + ":" + std::to_string(lineno) + ": expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            fail(ErrorCode::parse, source + ":" + std::to_string(lineno) + ": empty key or value");
        if (kv.count(key))
            fail(ErrorCode::parse, source + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
        kv.emplace(std::move(key), std::move(value));
    }
    return kv;
}

KeyValues read_key_values(const std::string& path) {
    std::ifstream in(path);
    require(static_cast<bool>(in), ErrorCode::io, "cannot open config '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_key_values(buf.str(), path);
}

namespace {

constexpr std::array<const char*, 12> kModelKeys = {"p",         "V",         "t1",        "t2",
                                                    "tQ",        "VQ",        "VM",        "sigmaL_re",
                                                    "sigmaL_im", "sigmaR_re", "sigmaR_im", "f0"};

double parse_number(const std::string& key, const std::string& text) {
    double v = 0.0;
    const char* first = text.data();
    const char* last = first + text.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last)
        fail(ErrorCode::parse, "value for '" + key + "' is not a decimal number: '" + text + "'");
    return v;
}

}  // namespace

bool is_model_key(const std::string& key) {
    return std::find(kModelKeys.begin(), kModelKeys.end(), key) != kModelKeys.end();
}

double get_param(const ModelParams& prm, const std::string& key) {
    if (key == "p") return prm.p;
    if (key == "V") return prm.V;
    if (key == "t1") return prm.t1;
    if (key == "t2") return prm.t2;
    if (key == "tQ") return prm.tQ;
    if (key == "VQ") return prm.VQ;
    if (key == "VM") return prm.VM;
    if (key == "sigmaL_re") return prm.sigmaL.real();
    if (key == "sigmaL_im") return prm.sigmaL.imag();
    if (key == "sigmaR_re") return prm.sigmaR.real();
    if (key == "sigmaR_im") return prm.sigmaR.imag();
    if (key == "f0") return prm.f0;
    fail(ErrorCode::invalid_parameter, "unknown model key '" + key + "'");
}

void set_param(ModelParams& prm, const std::string& key, double v) {
    if (key == "p") {
        require(v == std::floor(v) && v >= 1 && v < 1e6, ErrorCode::invalid_parameter,
                "p must be a positive integer");
        prm.p = static_cast<int>(v);
    } else if (key == "V") prm.V = v;
    else if (key == "t1") prm.t1 = v;
    else if (key == "t2") prm.t2 = v;
    else if (key == "tQ") prm.tQ = v;
    else if (key == "VQ") prm.VQ = v;
    else if (key == "VM") prm.VM = v;
    else if (key == "sigmaL_re") prm.sigmaL.real(v);
    else if (key == "sigmaL_im") prm.sigmaL.imag(v);
    else if (key == "sigmaR_re") prm.sigmaR.real(v);
    else if (key == "sigmaR_im") prm.sigmaR.imag(v);
    else if (key == "f0") prm.f0 = v;
    else fail(ErrorCode::invalid_parameter, "unknown model key '" + key + "'");
}

ModelParams params_from_key_values(const KeyValues& kv, ModelParams base) {
    for (const auto& [key, value] : kv) {
        if (!is_model_key(key)) continue;
        set_param(base, key, parse_number(key, value));
    }
    base.validate();
    return base;
}

std::string params_to_config(const ModelParams& prm) {
    std::string out;
    char buf[64];
    for (const char* key : kModelKeys) {
        const double v = get_param(prm, key);
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out += key;
        out += " = ";
        out += buf;
        out += '\n';
    }
    return out;
}

ModelParams load_params(const std::string& path) { return params_from_key_values(read_key_values(path)); }

void save_params(const ModelParams& prm, const std::string& path) {
    std::ofstream out(path);
    require(static_cast<bool>(out), ErrorCode::io, "cannot write config '" + path + "'");
    out << params_to_config(prm);
}

namespace presets {

ModelParams fig1() {
    ModelParams m;
    m.p = 10;
    m.V = 37.5;
    m.t1 = 120.0;
    m.t2 = 150.0;
    m.tQ = 62.5;
    m.VQ = -37.5;
    m.VM = 0.0;
    return m;
}

ModelParams fig3() {
    ModelParams m;
    m.p = 4;
    m.V = 40.0;
    m.t1 = 230.0;
    m.t2 = 280.0;
    m.tQ = 130.0;
    m.VM = 590.0;
    m.sigmaL = {0.0, -18.0};
    m.sigmaR = {0.0, -18.0};
    m.VQ = far_detuned(m).VQ;
    return m;
}

ModelParams by_name(const std::string& name) {
    if (name == "fig1") return fig1();
    if (name == "fig3" || name == "fig4" || name == "appc") return fig3();
    if (name == "fig5") {
        ModelParams m = fig3();
        m.VQ = -m.V;
        return m;
    }
    fail(ErrorCode::usage, "unknown preset '" + name + "' (expected fig1, fig3, fig4, fig5, appc)");
}

}  // namespace presets

}  // namespace rmwg
