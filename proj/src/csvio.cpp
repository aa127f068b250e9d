#include "hebbsim/csvio.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

namespace hebbsim {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    // Shortest representation that parses back to the same double.
    char buf[40];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) return buf;
    }
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(const std::string& path, const std::string& manifest_comment,
                     const std::vector<std::string>& header)
    : out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error(path + ": cannot open for writing");
    out_ << "# " << manifest_comment << "\n";
    row(header);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i > 0) out_ << ',';
        out_ << cells[i];
    }
    out_ << '\n';
}

void CsvWriter::row(const std::vector<double>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i > 0) out_ << ',';
        out_ << format_double(cells[i]);
    }
    out_ << '\n';
}

std::vector<SpikeEvent> read_spikes_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path + ": cannot open");
    std::vector<SpikeEvent> events;
    std::string line;
    bool header_skipped = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_skipped) {
            header_skipped = true;  // first non-comment line is the header
            continue;
        }
        std::istringstream ss(line);
        std::string time_s, channel_s, kind_s;
        if (!std::getline(ss, time_s, ',') || !std::getline(ss, channel_s, ',') ||
            !std::getline(ss, kind_s, ',')) {
            throw std::runtime_error(path + ": malformed row: " + line);
        }
        if (kind_s != "input") continue;
        events.push_back(SpikeEvent{std::stoi(channel_s), std::stod(time_s)});
    }
    return events;
}

}  // namespace hebbsim
