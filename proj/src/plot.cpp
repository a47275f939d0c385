#include "iasim/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "iasim/errors.hpp"

namespace iasim {

namespace {

constexpr const char* kHeader =
    "n,channel_model,lo,hi,constellation,receiver,user,noise_std,measured_snr_db,"
    "symbols_sent,symbol_errors,ser,ci95_half_width";

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

double parse_double(const std::string& s, int row, const char* col) {
    const char* begin = s.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0') {
        throw SchemaMismatch("row " + std::to_string(row) + ": column " + col +
                             " is not a number: '" + s + "'");
    }
    return v;
}

std::uint64_t parse_u64(const std::string& s, int row, const char* col) {
    const char* begin = s.c_str();
    char* end = nullptr;
    const unsigned long long v = std::strtoull(begin, &end, 10);
    if (end == begin || *end != '\0') {
        throw SchemaMismatch("row " + std::to_string(row) + ": column " + col +
                             " is not an integer: '" + s + "'");
    }
    return v;
}

std::string fmt2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string decade_label(int e) {
    if (e == 0) return "1";
    return "1e" + std::to_string(e);
}

} // namespace

std::vector<CsvRow> read_csv_rows(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open CSV '" + path + "'");

    std::string line;
    int row = 0;
    if (!std::getline(in, line)) throw SchemaMismatch("row 1: missing header");
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kHeader) throw SchemaMismatch("row 1: header does not match schema");

    std::vector<CsvRow> rows;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) throw SchemaMismatch("row " + std::to_string(row) + ": empty row");
        const std::vector<std::string> f = split_fields(line);
        if (f.size() != 13) {
            throw SchemaMismatch("row " + std::to_string(row) + ": expected 13 columns, got " +
                                 std::to_string(f.size()));
        }
        CsvRow r;
        r.n = static_cast<int>(parse_u64(f[0], row, "n"));
        r.channel_model = f[1];
        r.lo = parse_double(f[2], row, "lo");
        r.hi = parse_double(f[3], row, "hi");
        r.constellation = f[4];
        r.receiver = f[5];
        r.user = f[6];
        r.noise_std = parse_double(f[7], row, "noise_std");
        r.measured_snr_db = parse_double(f[8], row, "measured_snr_db");
        r.symbols_sent = parse_u64(f[9], row, "symbols_sent");
        r.symbol_errors = parse_u64(f[10], row, "symbol_errors");
        r.ser = parse_double(f[11], row, "ser");
        r.ci95_half_width = parse_double(f[12], row, "ci95_half_width");
        if (r.ser < 0.0 || r.ser > 1.0) {
            throw SchemaMismatch("row " + std::to_string(row) + ": ser outside [0,1]");
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

void emit_plot(const std::string& csv_path, const std::string& out_path) {
    const std::vector<CsvRow> rows = read_csv_rows(csv_path);
    if (rows.empty()) throw SchemaMismatch("no data rows in '" + csv_path + "'");

    // Series keyed for deterministic ordering; value is (snr, ser).
    std::map<std::string, std::vector<std::pair<double, double>>> series;
    for (const CsvRow& r : rows) {
        if (r.user != "all") continue;
        std::string key = r.receiver + " n=" + std::to_string(r.n) + " " + r.channel_model;
        if (r.channel_model == "trunc") {
            std::ostringstream b;
            b << "[" << r.lo << "," << r.hi << "]";
            key += b.str();
        }
        key += " " + r.constellation;
        series[key].push_back({r.measured_snr_db, r.ser});
    }
    if (series.empty()) throw SchemaMismatch("no user=all rows to plot");

    double xmin = 1e300, xmax = -1e300, ser_min = 1.0;
    bool any_positive = false;
    for (auto& kv : series) {
        std::sort(kv.second.begin(), kv.second.end());
        for (const auto& pt : kv.second) {
            xmin = std::min(xmin, pt.first);
            xmax = std::max(xmax, pt.first);
            if (pt.second > 0.0) {
                any_positive = true;
                ser_min = std::min(ser_min, pt.second);
            }
        }
    }
    if (!any_positive) throw SchemaMismatch("every SER is zero; nothing to draw on a log axis");
    if (xmax - xmin < 1e-9) {
        xmin -= 1.0;
        xmax += 1.0;
    }

    const int ymax_exp = 0; // SER <= 1
    const int ymin_exp = std::min(-1, static_cast<int>(std::floor(std::log10(ser_min))));

    const double width = 880, height = 560;
    const double ml = 80, mr = 24, mt = 40, mb = 60;
    const double pw = width - ml - mr, ph = height - mt - mb;

    auto xpix = [&](double snr) { return ml + (snr - xmin) / (xmax - xmin) * pw; };
    auto ypix = [&](double ser) {
        const double e = std::log10(ser);
        return mt + (static_cast<double>(ymax_exp) - e) /
                        static_cast<double>(ymax_exp - ymin_exp) * ph;
    };

    // x tick step targeting <= 10 labeled ticks.
    double xstep = 1.0;
    for (double s : {1.0, 2.0, 5.0, 10.0, 20.0, 50.0}) {
        xstep = s;
        if ((xmax - xmin) / s <= 10.0) break;
    }
    const double xtick0 = std::ceil(xmin / xstep) * xstep;

    static const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                     "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};
    constexpr int kPaletteSize = 8;

    std::ofstream out(out_path);
    if (!out) throw IoError("cannot open plot output '" + out_path + "'");

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    out << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << fmt2(ml + pw / 2)
        << "\" y=\"22\" font-family=\"sans-serif\" font-size=\"15\" text-anchor=\"middle\">"
           "symbol error rate vs measured SNR</text>\n";

    // Decade gridlines and y labels.
    for (int e = ymax_exp; e >= ymin_exp; --e) {
        const double y = ypix(std::pow(10.0, e));
        out << "<line x1=\"" << fmt2(ml) << "\" y1=\"" << fmt2(y) << "\" x2=\"" << fmt2(ml + pw)
            << "\" y2=\"" << fmt2(y) << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        out << "<text x=\"" << fmt2(ml - 8) << "\" y=\"" << fmt2(y + 4)
            << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"end\">"
            << decade_label(e) << "</text>\n";
    }
    // x ticks.
    for (double x = xtick0; x <= xmax + 1e-9; x += xstep) {
        const double px = xpix(x);
        out << "<line x1=\"" << fmt2(px) << "\" y1=\"" << fmt2(mt) << "\" x2=\"" << fmt2(px)
            << "\" y2=\"" << fmt2(mt + ph) << "\" stroke=\"#eeeeee\" stroke-width=\"1\"/>\n";
        out << "<text x=\"" << fmt2(px) << "\" y=\"" << fmt2(mt + ph + 18)
            << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">" << x
            << "</text>\n";
    }
    // Axes frame.
    out << "<rect x=\"" << fmt2(ml) << "\" y=\"" << fmt2(mt) << "\" width=\"" << fmt2(pw)
        << "\" height=\"" << fmt2(ph)
        << "\" fill=\"none\" stroke=\"#444444\" stroke-width=\"1\"/>\n";
    out << "<text x=\"" << fmt2(ml + pw / 2) << "\" y=\"" << fmt2(height - 14)
        << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">"
           "measured SNR (dB)</text>\n";
    out << "<text x=\"20\" y=\"" << fmt2(mt + ph / 2)
        << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" "
           "transform=\"rotate(-90 20 "
        << fmt2(mt + ph / 2) << ")\">symbol error rate</text>\n";

    int si = 0;
    for (const auto& kv : series) {
        const char* color = kPalette[si % kPaletteSize];
        std::string poly;
        for (const auto& pt : kv.second) {
            if (pt.second <= 0.0) continue; // log axis
            poly += fmt2(xpix(pt.first)) + "," + fmt2(ypix(pt.second)) + " ";
        }
        if (!poly.empty()) {
            out << "<polyline points=\"" << poly
                << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
            for (const auto& pt : kv.second) {
                if (pt.second <= 0.0) continue;
                out << "<circle cx=\"" << fmt2(xpix(pt.first)) << "\" cy=\""
                    << fmt2(ypix(pt.second)) << "\" r=\"3.5\" fill=\"" << color << "\"/>\n";
            }
        }
        // Legend entry.
        const double ly = mt + 14 + 18 * si;
        out << "<line x1=\"" << fmt2(ml + 12) << "\" y1=\"" << fmt2(ly) << "\" x2=\""
            << fmt2(ml + 40) << "\" y2=\"" << fmt2(ly) << "\" stroke=\"" << color
            << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << fmt2(ml + 46) << "\" y=\"" << fmt2(ly + 4)
            << "\" font-family=\"sans-serif\" font-size=\"12\">" << kv.first << "</text>\n";
        ++si;
    }
    out << "</svg>\n";
    if (!out) throw IoError("write failure on '" + out_path + "'");
}

} // namespace iasim
