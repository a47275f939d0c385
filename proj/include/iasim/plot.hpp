#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace iasim {

// One parsed result row, mirroring the 13-column CSV schema.
struct CsvRow {
    int n = 0;
    std::string channel_model;
    double lo = 0.0;
    double hi = 0.0;
    std::string constellation;
    std::string receiver;
    std::string user;
    double noise_std = 0.0;
    double measured_snr_db = 0.0;
    std::uint64_t symbols_sent = 0;
    std::uint64_t symbol_errors = 0;
    double ser = 0.0;
    double ci95_half_width = 0.0;
};

// Strict reader: exact header, exactly 13 fields per row, fully
// consumed numerics.  Throws SchemaMismatch naming the offending row
// (the header is row 1) and IoError for unreadable paths.
std::vector<CsvRow> read_csv_rows(const std::string& path);

// Log-SER vs measured-SNR curves from the user="all" rows, one series
// per (receiver, n, model, bounds, constellation) in sorted key order,
// emitted as a self-contained SVG with no external references.  Points
// with ser = 0 are omitted (log axis).  Deterministic for fixed input.
void emit_plot(const std::string& csv_path, const std::string& out_path);

} // namespace iasim
