#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "hebbsim/types.hpp"

namespace hebbsim {

/// Shortest round-trip decimal form of a double ("%.17g" trimmed), so equal
/// runs produce byte-identical files.
std::string format_double(double v);

/// CSV writer with the house conventions: a commented manifest line
/// (config hash + seed) followed by a header row. All numeric cells go
/// through format_double.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::string& manifest_comment,
              const std::vector<std::string>& header);

    void row(const std::vector<std::string>& cells);
    void row(const std::vector<double>& cells);

private:
    std::ofstream out_;
};

/// Minimal reader for replaying `spikes.csv` (comment lines and the header
/// are skipped; only rows with kind == "input" are returned).
std::vector<SpikeEvent> read_spikes_csv(const std::string& path);

}  // namespace hebbsim
