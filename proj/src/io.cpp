#include "rmwg/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace rmwg::io {

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) out.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::string where(const std::string& source, int line) { return source + ":" + std::to_string(line) + ": "; }

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(static_cast<bool>(in), ErrorCode::io, "cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

int CsvTable::column(const std::string& name, const std::string& source) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return static_cast<int>(i);
    fail(ErrorCode::parse, source + ": missing column '" + name + "'");
}

CsvTable parse_csv(const std::string& text, const std::string& source) {
    CsvTable t;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string s = trim(line);
        if (s.empty() || s[0] == '#') continue;
        auto cells = split(s);
        if (t.header.empty()) {
            for (const auto& c : cells)
                if (c.empty()) fail(ErrorCode::parse, where(source, lineno) + "empty column name in header");
            t.header = std::move(cells);
            continue;
        }
        if (cells.size() != t.header.size()) {
            fail(ErrorCode::parse, where(source, lineno) + "expected " + std::to_string(t.header.size()) +
                                       " columns, got " + std::to_string(cells.size()));
        }
        std::vector<double> row(cells.size());
        for (std::size_t i = 0; i < cells.size(); ++i) {
            const auto& c = cells[i];
            const auto res = std::from_chars(c.data(), c.data() + c.size(), row[i]);
            if (c.empty() || res.ec != std::errc{} || res.ptr != c.data() + c.size())
                fail(ErrorCode::parse, where(source, lineno) + "column '" + t.header[i] + "': not a number '" + c + "'");
        }
        t.rows.push_back(std::move(row));
        t.line_numbers.push_back(lineno);
    }
    if (t.header.empty()) fail(ErrorCode::parse, source + ": no header row");
    return t;
}

CsvTable read_csv(const std::string& path) { return parse_csv(read_file(path), path); }

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    require(static_cast<bool>(out), ErrorCode::io, "cannot write '" + path + "'");
    out << text;
    require(static_cast<bool>(out), ErrorCode::io, "write failed for '" + path + "'");
}

void write_json(const std::string& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

std::string sweep_csv(const std::vector<SweepPoint>& sweep) {
    std::string out = "VQ_MHz,mode_index,re_E_MHz,im_E_MHz,qubit_weight,central_weight,in_gap\n";
    for (const auto& pt : sweep) {
        for (int k = 0; k < pt.modes.size(); ++k) {
            const auto& c = pt.modes.classes[k];
            out += format_number(pt.VQ) + ',' + std::to_string(k) + ',' +
                   format_number(pt.modes.eigenvalues[k].real()) + ',' +
                   format_number(pt.modes.eigenvalues[k].imag()) + ',' + format_number(c.qubit_weight) + ',' +
                   format_number(c.central_weight) + ',' + (c.in_gap ? "1" : "0") + '\n';
        }
    }
    return out;
}

std::string map_csv(const SpectrumMap& map) {
    std::string out = "E_MHz,VQ_MHz,value\n";
    for (std::size_t i = 0; i < map.E_grid.size(); ++i)
        for (std::size_t j = 0; j < map.VQ_grid.size(); ++j)
            out += format_number(map.E_grid[i]) + ',' + format_number(map.VQ_grid[j]) + ',' +
                   format_number(map.at(i, j)) + '\n';
    return out;
}

json map_header(const SpectrumMap& map, const std::string& csv_name) {
    json j;
    j["csv"] = csv_name;
    j["kind"] = to_string(map.kind);
    j["columns"] = {"E_MHz", "VQ_MHz", "value"};
    j["n_E"] = map.E_grid.size();
    j["n_VQ"] = map.VQ_grid.size();
    j["order"] = "E major, VQ minor";
    if (!map.E_grid.empty()) j["E_range_MHz"] = {map.E_grid.front(), map.E_grid.back()};
    if (!map.VQ_grid.empty()) j["VQ_range_MHz"] = {map.VQ_grid.front(), map.VQ_grid.back()};
    return j;
}

std::string trace_csv(const TimeTrace& trace, const std::vector<std::string>& channels) {
    const std::vector<std::string>& names = channels.empty() ? trace.names : channels;
    std::vector<const std::vector<cplx>*> cols;
    std::string out = "t_ns";
    for (const auto& n : names) {
        cols.push_back(&trace.channel(n));
        out += ',' + n + "_re," + n + "_im";
    }
    out += '\n';
    for (std::size_t i = 0; i < trace.t.size(); ++i) {
        out += format_number(trace.t[i]);
        for (const auto* c : cols) out += ',' + format_number((*c)[i].real()) + ',' + format_number((*c)[i].imag());
        out += '\n';
    }
    return out;
}

TimeTrace parse_trace_csv(const std::string& text, const std::string& source) {
    const CsvTable t = parse_csv(text, source);
    require(!t.header.empty() && t.header[0] == "t_ns", ErrorCode::parse, source + ": first column must be t_ns");
    require(t.header.size() % 2 == 1, ErrorCode::parse, source + ": channels must come as <name>_re,<name>_im pairs");
    TimeTrace tr;
    tr.method = "file";
    for (const auto& row : t.rows) tr.t.push_back(row[0]);
    for (std::size_t c = 1; c < t.header.size(); c += 2) {
        const std::string& re = t.header[c];
        const std::string& im = t.header[c + 1];
        const bool paired = re.size() > 3 && re.ends_with("_re") && im.ends_with("_im") &&
                            re.substr(0, re.size() - 3) == im.substr(0, im.size() - 3);
        require(paired, ErrorCode::parse, source + ": columns '" + re + "', '" + im + "' are not a _re/_im pair");
        std::vector<cplx> ch;
        ch.reserve(t.rows.size());
        for (const auto& row : t.rows) ch.emplace_back(row[c], row[c + 1]);
        tr.add(re.substr(0, re.size() - 3), std::move(ch));
    }
    for (std::size_t i = 1; i < tr.t.size(); ++i)
        if (!(tr.t[i] > tr.t[i - 1]))
            fail(ErrorCode::parse, where(source, t.line_numbers[i]) + "t_ns must be strictly increasing");
    return tr;
}

TimeTrace read_trace_csv(const std::string& path) { return parse_trace_csv(read_file(path), path); }

PeakSet read_observations_csv(const std::string& path) {
    const CsvTable t = read_csv(path);
    const int x = t.column("flux_or_VQ", path);
    const int f = t.column("frequency_MHz", path);
    const int a = t.column("amplitude", path);
    PeakSet ps;
    ps.source = path;
    for (const auto& row : t.rows) ps.peaks.push_back({row[x], row[f], row[a]});
    return ps;
}

std::string observations_csv(const PeakSet& peaks) {
    std::string out = "flux_or_VQ,frequency_MHz,amplitude\n";
    for (const auto& p : peaks.peaks)
        out += format_number(p.position) + ',' + format_number(p.frequency) + ',' + format_number(p.amplitude) + '\n';
    return out;
}

std::vector<GapObservation> read_gaps_csv(const std::string& path) {
    const CsvTable t = read_csv(path);
    const int v = t.column("VQ_MHz", path);
    const int g = t.column("gap_MHz", path);
    std::vector<GapObservation> out;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        if (!(t.rows[i][g] > 0.0)) fail(ErrorCode::parse, where(path, t.line_numbers[i]) + "gap_MHz must be positive");
        out.push_back({t.rows[i][v], t.rows[i][g]});
    }
    return out;
}

std::string gaps_csv(const std::vector<GapObservation>& gaps) {
    std::string out = "VQ_MHz,gap_MHz\n";
    for (const auto& g : gaps) out += format_number(g.VQ) + ',' + format_number(g.gap) + '\n';
    return out;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json to_json(const ModelParams& prm) {
    return json{{"p", prm.p},
                {"V", prm.V},
                {"t1", prm.t1},
                {"t2", prm.t2},
                {"tQ", prm.tQ},
                {"VQ", prm.VQ},
                {"VM", prm.VM},
                {"sigmaL_re", prm.sigmaL.real()},
                {"sigmaL_im", prm.sigmaL.imag()},
                {"sigmaR_re", prm.sigmaR.real()},
                {"sigmaR_im", prm.sigmaR.imag()},
                {"f0", prm.f0}};
}

json to_json(const DirectionalityReport& r) {
    return json{{"pop_left", r.pop_left}, {"pop_right", r.pop_right}, {"pop_M", r.pop_M},
                {"pop_Q", r.pop_Q},       {"chi", number_or_null(r.chi)}, {"chi_dB", number_or_null(r.chi_dB)},
                {"fidelity", r.fidelity}};
}

json to_json(const BandGap& g) {
    return json{{"lower", g.lower},
                {"upper", g.upper},
                {"width", g.width()},
                {"in_gap_mode_indices", g.in_gap_mode_indices},
                {"degenerate", g.degenerate}};
}

json to_json(const FitResult& fit) {
    json params = json::object();
    for (int p = 0; p < kFitParamCount; ++p) {
        const auto& s = fit.stats[p];
        params[kFitParamNames[p]] = json{{"free", fit.mask[p]},  {"best", s.best},     {"p2_5", s.p2_5},
                                         {"p97_5", s.p97_5},     {"median", s.median}, {"std", s.std}};
    }
    return json{{"parameters", params},
                {"n_bootstrap", fit.n_bootstrap},
                {"n_failed", fit.n_failed},
                {"residual_rms_MHz", fit.residual_rms},
                {"gap_residual_rms_MHz", fit.gap_residual_rms},
                {"objective_initial", fit.objective_initial},
                {"objective_final", fit.objective_final},
                {"converged", fit.converged},
                {"best", to_json(fit.best)}};
}

json to_json(const ChiEstimate& chi, const SignalAmplitudes& amps) {
    const auto v = amps.values();
    return json{{"chi_l", number_or_null(chi.chi_l)},
                {"chi_r", number_or_null(chi.chi_r)},
                {"chi", number_or_null(chi.chi)},
                {"chi_dB", number_or_null(chi.chi_dB)},
                {"chi_std", chi.chi_std},
                {"fidelity", chi.fidelity},
                {"infinite", chi.infinite},
                {"s_values", {{"s_lL", v[0]}, {"s_lR", v[1]}, {"s_rL", v[2]}, {"s_rR", v[3]}}},
                {"s_stds", {{"s_lL", amps.stds[0]}, {"s_lR", amps.stds[1]}, {"s_rL", amps.stds[2]}, {"s_rR", amps.stds[3]}}}};
}

}  // namespace rmwg::io
