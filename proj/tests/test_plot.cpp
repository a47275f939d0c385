#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>

#include "iasim/errors.hpp"
#include "iasim/plot.hpp"

using namespace iasim;

namespace {

const char* kGoodHeader =
    "n,channel_model,lo,hi,constellation,receiver,user,noise_std,measured_snr_db,"
    "symbols_sent,symbol_errors,ser,ci95_half_width\n";

std::string write_file(const char* name, const std::string& body) {
    const std::string path = std::string("plot_test_") + name + ".csv";
    std::ofstream out(path);
    REQUIRE(out.good());
    out << body;
    return path;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::size_t count_occurrences(const std::string& text, const std::string& needle) {
    std::size_t count = 0;
    for (std::size_t pos = text.find(needle); pos != std::string::npos;
         pos = text.find(needle, pos + needle.size())) {
        ++count;
    }
    return count;
}

// Two receivers, two grid points, all user rows present.
std::string two_receiver_body() {
    std::string body = kGoodHeader;
    const char* users[] = {"1", "2", "3", "all"};
    for (const char* snr : {"15", "21"}) {
        for (const char* recv : {"ld", "lzf_linear"}) {
            for (const char* user : users) {
                const bool high = snr[0] == '2';
                body += std::string("1,unit,1,1,qam4,") + recv + "," + user + ",0.5," + snr +
                        ",1000," + (high ? "5" : "50") + "," + (high ? "0.005" : "0.05") +
                        ",0.001\n";
            }
        }
    }
    return body;
}

} // namespace

TEST_SUITE_BEGIN("plot");

TEST_CASE("missing files raise IoError") {
    CHECK_THROWS_AS(read_csv_rows("plot_test_does_not_exist.csv"), IoError);
}

TEST_CASE("header must match the schema byte for byte") {
    const std::string path =
        write_file("badheader", "n,model,lo\n1,unit,1,1,qam4,ld,all,0.5,15,10,1,0.1,0.01\n");
    try {
        read_csv_rows(path);
        FAIL("expected SchemaMismatch");
    } catch (const SchemaMismatch& e) {
        CHECK(std::string(e.what()).find("row 1") != std::string::npos);
    }
    std::remove(path.c_str());
}

TEST_CASE("malformed data rows name the offending row") {
    const std::string empty_row = write_file(
        "emptyrow", std::string(kGoodHeader) + "1,unit,1,1,qam4,ld,all,0.5,15,10,1,0.1,0.01\n" +
                        "\n" + "1,unit,1,1,qam4,ld,all,0.4,18,10,1,0.1,0.01\n");
    try {
        read_csv_rows(empty_row);
        FAIL("expected SchemaMismatch");
    } catch (const SchemaMismatch& e) {
        CHECK(std::string(e.what()).find("row 3") != std::string::npos);
        CHECK(std::string(e.what()).find("empty") != std::string::npos);
    }
    std::remove(empty_row.c_str());

    const std::string short_row = write_file(
        "shortrow", std::string(kGoodHeader) + "1,unit,1,1,qam4,ld,all,0.5,15,10,1,0.1\n");
    CHECK_THROWS_AS(read_csv_rows(short_row), SchemaMismatch);
    std::remove(short_row.c_str());

    const std::string bad_number = write_file(
        "badnum", std::string(kGoodHeader) + "1,unit,1,1,qam4,ld,all,0.5,15,10,1,abc,0.01\n");
    CHECK_THROWS_AS(read_csv_rows(bad_number), SchemaMismatch);
    std::remove(bad_number.c_str());

    const std::string partial_number = write_file(
        "partialnum",
        std::string(kGoodHeader) + "1,unit,1,1,qam4,ld,all,0.5,15,10,1,0.1x,0.01\n");
    CHECK_THROWS_AS(read_csv_rows(partial_number), SchemaMismatch);
    std::remove(partial_number.c_str());

    const std::string bad_ser = write_file(
        "badser", std::string(kGoodHeader) + "1,unit,1,1,qam4,ld,all,0.5,15,10,1,1.5,0.01\n");
    CHECK_THROWS_AS(read_csv_rows(bad_ser), SchemaMismatch);
    std::remove(bad_ser.c_str());
}

TEST_CASE("valid rows parse exactly") {
    const std::string path = write_file(
        "good", std::string(kGoodHeader) +
                    "5,trunc,0.8,1.4,qam16,lzf_glrt,2,0.25,33.5,20000,37,0.00185,0.0006\n");
    const std::vector<CsvRow> rows = read_csv_rows(path);
    REQUIRE(rows.size() == 1);
    const CsvRow& r = rows[0];
    CHECK(r.n == 5);
    CHECK(r.channel_model == "trunc");
    CHECK(r.lo == 0.8);
    CHECK(r.hi == 1.4);
    CHECK(r.constellation == "qam16");
    CHECK(r.receiver == "lzf_glrt");
    CHECK(r.user == "2");
    CHECK(r.noise_std == 0.25);
    CHECK(r.measured_snr_db == 33.5);
    CHECK(r.symbols_sent == 20000);
    CHECK(r.symbol_errors == 37);
    CHECK(r.ser == 0.00185);
    CHECK(r.ci95_half_width == 0.0006);
    std::remove(path.c_str());
}

TEST_CASE("plots are deterministic with one series per receiver") {
    const std::string csv = write_file("plotin", two_receiver_body());
    const std::string svg1 = "plot_test_out1.svg";
    const std::string svg2 = "plot_test_out2.svg";
    emit_plot(csv, svg1);
    emit_plot(csv, svg2);
    const std::string body1 = slurp(svg1);
    CHECK(body1 == slurp(svg2));
    CHECK(body1.find("<svg") != std::string::npos);
    CHECK(count_occurrences(body1, "<polyline") == 2);
    CHECK(body1.find("ld n=1 unit qam4") != std::string::npos);
    CHECK(body1.find("lzf_linear n=1 unit qam4") != std::string::npos);
    CHECK(body1.find("measured SNR (dB)") != std::string::npos);
    // no external references sneak in
    CHECK(body1.find("http://") == body1.find("http://www.w3.org/2000/svg"));
    CHECK(body1.find("https://") == std::string::npos);
    std::remove(csv.c_str());
    std::remove(svg1.c_str());
    std::remove(svg2.c_str());
}

TEST_CASE("truncated-model series carry their bounds in the key") {
    std::string body = kGoodHeader;
    body += "5,trunc,0.8,1.4,qam4,ld,all,0.5,35,1000,10,0.01,0.001\n";
    body += "5,trunc,0.8,1.4,qam4,ld,all,0.4,38,1000,5,0.005,0.001\n";
    const std::string csv = write_file("trunckey", body);
    const std::string svg = "plot_test_trunc.svg";
    emit_plot(csv, svg);
    CHECK(slurp(svg).find("ld n=5 trunc[0.8,1.4] qam4") != std::string::npos);
    std::remove(csv.c_str());
    std::remove(svg.c_str());
}

TEST_CASE("undrawable inputs are refused") {
    const std::string empty = write_file("nodata", kGoodHeader);
    CHECK_THROWS_AS(emit_plot(empty, "plot_test_never.svg"), SchemaMismatch);
    std::remove(empty.c_str());

    const std::string no_all = write_file(
        "noall", std::string(kGoodHeader) + "1,unit,1,1,qam4,ld,1,0.5,15,10,1,0.1,0.01\n");
    CHECK_THROWS_AS(emit_plot(no_all, "plot_test_never.svg"), SchemaMismatch);
    std::remove(no_all.c_str());

    const std::string all_zero = write_file(
        "allzero", std::string(kGoodHeader) + "1,unit,1,1,qam4,ld,all,0.5,15,10,0,0,0.01\n");
    CHECK_THROWS_AS(emit_plot(all_zero, "plot_test_never.svg"), SchemaMismatch);
    std::remove(all_zero.c_str());
}

TEST_SUITE_END();
