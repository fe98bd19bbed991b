#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "rmwg/dynamics.hpp"
#include "rmwg/edge_states.hpp"
#include "rmwg/fitting.hpp"
#include "rmwg/scattering.hpp"
#include "rmwg/sigproc.hpp"
#include "rmwg/spectral.hpp"

namespace rmwg::io {

using nlohmann::json;

// Shortest decimal text that parses back to the same double.
std::string format_number(double v);

// Simple comma-separated table: a header row, then numeric rows. Lines that
// are blank or start with '#' are skipped.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    std::vector<int> line_numbers;  // source line of each row

    int column(const std::string& name, const std::string& source) const;
};

CsvTable parse_csv(const std::string& text, const std::string& source);
CsvTable read_csv(const std::string& path);

void write_text(const std::string& path, const std::string& text);
void write_json(const std::string& path, const json& j);

// VQ_MHz, mode_index, re_E_MHz, im_E_MHz, qubit_weight, central_weight, in_gap
std::string sweep_csv(const std::vector<SweepPoint>& sweep);

// E_MHz, VQ_MHz, value
std::string map_csv(const SpectrumMap& map);
json map_header(const SpectrumMap& map, const std::string& csv_name);

// t_ns, then <channel>_re, <channel>_im for every channel (or the listed subset).
std::string trace_csv(const TimeTrace& trace, const std::vector<std::string>& channels = {});
TimeTrace parse_trace_csv(const std::string& text, const std::string& source);
TimeTrace read_trace_csv(const std::string& path);

// Columns flux_or_VQ, frequency_MHz, amplitude.
PeakSet read_observations_csv(const std::string& path);
std::string observations_csv(const PeakSet& peaks);
// Columns VQ_MHz, gap_MHz.
std::vector<GapObservation> read_gaps_csv(const std::string& path);
std::string gaps_csv(const std::vector<GapObservation>& gaps);

// Infinite values are written as null.
json number_or_null(double v);

json to_json(const ModelParams& params);
json to_json(const DirectionalityReport& report);
json to_json(const BandGap& gap);
json to_json(const FitResult& fit);
json to_json(const ChiEstimate& chi, const SignalAmplitudes& amps);

}  // namespace rmwg::io
