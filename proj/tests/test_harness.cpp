#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>

#include "iasim/errors.hpp"
#include "iasim/harness.hpp"
#include "iasim/plot.hpp"
#include "iasim/rng.hpp"

using namespace iasim;

namespace {

SweepConfig small_config() {
    SweepConfig cfg;
    cfg.n = 1;
    cfg.model = ChannelModel::UnitModulus;
    cfg.receivers = {ReceiverKind::lzf_linear, ReceiverKind::lzf_glrt, ReceiverKind::ld};
    cfg.noise_grid = {0.7, 0.35};
    cfg.trials_per_point = 60;
    cfg.base_seed = 12345;
    return cfg;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string temp_path(const char* name) {
    return std::string("harness_test_") + name + ".csv";
}

// Textbook Wilson score interval, written independently of the library.
void reference_wilson(std::uint64_t k, std::uint64_t n, double& lo, double& hi) {
    const double z = 1.959963984540054;
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(k) / nn;
    const double z2 = z * z;
    const double center = (p + z2 / (2 * nn)) / (1 + z2 / nn);
    const double hw = z * std::sqrt(p * (1 - p) / nn + z2 / (4 * nn * nn)) / (1 + z2 / nn);
    lo = center - hw;
    hi = center + hw;
}

} // namespace

TEST_SUITE_BEGIN("harness");

TEST_CASE("receiver names round-trip") {
    for (ReceiverKind r : {ReceiverKind::lzf_linear, ReceiverKind::lzf_glrt, ReceiverKind::ld}) {
        CHECK(receiver_from_name(receiver_name(r)) == r);
    }
    CHECK(std::string(receiver_name(ReceiverKind::lzf_linear)) == "lzf_linear");
    CHECK(std::string(receiver_name(ReceiverKind::lzf_glrt)) == "lzf_glrt");
    CHECK(std::string(receiver_name(ReceiverKind::ld)) == "ld");
    CHECK_THROWS_AS(receiver_from_name("mmse"), SimError);
}

TEST_CASE("config invariants are enforced") {
    CHECK_NOTHROW(validate_config(small_config()));

    SweepConfig bad = small_config();
    bad.n = 0;
    CHECK_THROWS_AS(validate_config(bad), SimError);

    bad = small_config();
    bad.trials_per_point = 0;
    CHECK_THROWS_AS(validate_config(bad), SimError);

    bad = small_config();
    bad.noise_grid.clear();
    CHECK_THROWS_AS(validate_config(bad), SimError);

    bad = small_config();
    bad.noise_grid = {0.5, 0.5};
    CHECK_THROWS_AS(validate_config(bad), SimError);

    bad = small_config();
    bad.noise_grid = {0.3, 0.5};
    CHECK_THROWS_AS(validate_config(bad), SimError);

    bad = small_config();
    bad.noise_grid = {0.5, -0.1};
    CHECK_THROWS_AS(validate_config(bad), SimError);

    bad = small_config();
    bad.gap_tol = 0.0;
    CHECK_THROWS_AS(validate_config(bad), SimError);

    bad = small_config();
    bad.model = ChannelModel::TruncatedGaussian;
    bad.lo = 1.4;
    bad.hi = 0.8;
    CHECK_THROWS_AS(validate_config(bad), SimError);
}

TEST_CASE("wilson interval matches the reference formula and clamps") {
    const std::uint64_t cases[][2] = {{0, 100}, {1, 100}, {5, 50}, {50, 50}, {999, 1000}};
    for (const auto& kc : cases) {
        const WilsonInterval w = wilson_interval(kc[0], kc[1]);
        double lo = 0.0;
        double hi = 0.0;
        reference_wilson(kc[0], kc[1], lo, hi);
        CHECK(w.lo == doctest::Approx(std::max(0.0, lo)).epsilon(1e-14));
        CHECK(w.hi == doctest::Approx(std::min(1.0, hi)).epsilon(1e-14));
        CHECK(w.half_width == doctest::Approx((hi - lo) / 2).epsilon(1e-14));
        CHECK(w.lo >= 0.0);
        CHECK(w.hi <= 1.0);
        CHECK(w.lo <= w.hi);
    }
    // zero-count edge: degenerate full interval
    const WilsonInterval empty = wilson_interval(0, 0);
    CHECK(empty.lo == 0.0);
    CHECK(empty.hi == 1.0);
    // more data shrinks the interval
    CHECK(wilson_interval(10, 1000).half_width < wilson_interval(1, 100).half_width);
}

TEST_CASE("measured snr fixed points") {
    CHECK(measured_snr_db(4.0, 2.0) == 0.0);
    CHECK(measured_snr_db(100.0, 1.0) == doctest::Approx(20.0).epsilon(1e-13));
}

TEST_CASE("run_trial is a pure function of its inputs") {
    const SweepConfig cfg = small_config();
    const TrialResult a = run_trial(cfg, 0.5, 777);
    const TrialResult b = run_trial(cfg, 0.5, 777);
    CHECK(a.errors == b.errors);
    CHECK(a.symbols == b.symbols);
    CHECK(a.powers == b.powers);
    CHECK(a.resamples == b.resamples);
    // per-user symbol counts are n+1, n, n per receiver
    for (const auto& per_user : a.symbols) {
        CHECK(per_user[0] == 2);
        CHECK(per_user[1] == 1);
        CHECK(per_user[2] == 1);
    }
}

TEST_CASE("degenerate-channel storms abort trials with full counters") {
    SweepConfig cfg = small_config();
    cfg.gap_tol = 10.0; // unit-modulus T gaps never reach this
    cfg.max_resamples_per_trial = 2;
    cfg.trials_per_point = 4;
    cfg.noise_grid = {0.5};

    try {
        run_trial(cfg, 0.5, 1);
        FAIL("expected ResampleBudgetExceeded");
    } catch (const ResampleBudgetExceeded& e) {
        CHECK(e.degenerate_events == 3); // attempts 0..max all degenerate
        CHECK(e.singular_events == 0);
    }

    const SweepResult res = run_sweep(cfg);
    REQUIRE(res.points.size() == 1);
    const PointResult& pt = res.points[0];
    CHECK(pt.aborted_trials == 4);
    CHECK(pt.degenerate_count == 12);
    CHECK(pt.power_terms == 0);
    CHECK(pt.measured_snr_db == 0.0);
    for (const auto& per_user : pt.counts) {
        for (const CellCounts& cell : per_user) {
            CHECK(cell.symbols_sent == 0);
        }
    }
}

TEST_CASE("sweep aggregates equal a hand reduction of run_trial") {
    SweepConfig cfg = small_config();
    cfg.trials_per_point = 25;
    const SweepResult res = run_sweep(cfg);
    REQUIRE(res.points.size() == 2);

    for (std::size_t p = 0; p < res.points.size(); ++p) {
        std::vector<std::array<CellCounts, 3>> want(cfg.receivers.size());
        double power_sum = 0.0;
        for (int t = 0; t < cfg.trials_per_point; ++t) {
            const TrialResult tr =
                run_trial(cfg, cfg.noise_grid[p],
                          derive_seed(cfg.base_seed, p + 1, static_cast<std::uint64_t>(t)));
            for (std::size_t r = 0; r < cfg.receivers.size(); ++r) {
                for (int u = 0; u < 3; ++u) {
                    want[r][static_cast<std::size_t>(u)].symbol_errors +=
                        tr.errors[r][static_cast<std::size_t>(u)];
                    want[r][static_cast<std::size_t>(u)].symbols_sent +=
                        tr.symbols[r][static_cast<std::size_t>(u)];
                }
            }
            for (int u = 0; u < 3; ++u) power_sum += tr.powers[static_cast<std::size_t>(u)];
        }
        const PointResult& pt = res.points[p];
        for (std::size_t r = 0; r < cfg.receivers.size(); ++r) {
            for (int u = 0; u < 3; ++u) {
                CHECK(pt.counts[r][static_cast<std::size_t>(u)].symbol_errors ==
                      want[r][static_cast<std::size_t>(u)].symbol_errors);
                CHECK(pt.counts[r][static_cast<std::size_t>(u)].symbols_sent ==
                      want[r][static_cast<std::size_t>(u)].symbols_sent);
            }
        }
        CHECK(pt.power_sum == power_sum); // same serial summation order
        CHECK(pt.measured_snr_db ==
              measured_snr_db(pt.power_sum / static_cast<double>(pt.power_terms),
                              cfg.noise_grid[p]));
    }
}

TEST_CASE("thread count never changes the CSV bytes") {
    SweepConfig cfg = small_config();
    cfg.trials_per_point = 40;

    cfg.threads = 1;
    const SweepResult serial = run_sweep(cfg);
    const std::string serial_path = temp_path("serial");
    write_csv(serial, serial_path);

    cfg.threads = 4;
    const SweepResult parallel = run_sweep(cfg);
    const std::string parallel_path = temp_path("parallel");
    write_csv(parallel, parallel_path);

    CHECK(slurp(serial_path) == slurp(parallel_path));
    std::remove(serial_path.c_str());
    std::remove(parallel_path.c_str());
}

TEST_CASE("csv layout, round-trip, and seed sensitivity") {
    SweepConfig cfg = small_config();
    cfg.trials_per_point = 30;
    const SweepResult res = run_sweep(cfg);
    const std::string path = temp_path("layout");
    write_csv(res, path);

    const std::vector<CsvRow> rows = read_csv_rows(path);
    REQUIRE(rows.size() == 2 * 3 * 4); // points x receivers x (3 users + all)
    std::size_t i = 0;
    for (std::size_t p = 0; p < 2; ++p) {
        for (const char* recv : {"lzf_linear", "lzf_glrt", "ld"}) {
            for (const char* user : {"1", "2", "3", "all"}) {
                const CsvRow& row = rows[i++];
                CHECK(row.receiver == recv);
                CHECK(row.user == user);
                CHECK(row.n == 1);
                CHECK(row.channel_model == "unit");
                CHECK(row.constellation == "qam4");
                // %.17g output parses back to the exact doubles
                CHECK(row.noise_std == res.points[p].noise_std);
                CHECK(row.measured_snr_db == res.points[p].measured_snr_db);
            }
        }
    }
    // the user=all row pools the three user rows
    CHECK(rows[3].symbols_sent == rows[0].symbols_sent + rows[1].symbols_sent +
                                      rows[2].symbols_sent);
    CHECK(rows[3].symbol_errors == rows[0].symbol_errors + rows[1].symbol_errors +
                                       rows[2].symbol_errors);
    const double want_ser = static_cast<double>(rows[3].symbol_errors) /
                            static_cast<double>(rows[3].symbols_sent);
    CHECK(rows[3].ser == want_ser);
    std::remove(path.c_str());

    // a different base seed moves the counts
    SweepConfig other = cfg;
    other.base_seed = 54321;
    const SweepResult res2 = run_sweep(other);
    bool any_diff = false;
    for (std::size_t p = 0; p < res.points.size(); ++p) {
        for (std::size_t r = 0; r < cfg.receivers.size(); ++r) {
            for (int u = 0; u < 3; ++u) {
                if (res.points[p].counts[r][static_cast<std::size_t>(u)].symbol_errors !=
                    res2.points[p].counts[r][static_cast<std::size_t>(u)].symbol_errors) {
                    any_diff = true;
                }
            }
        }
    }
    CHECK(any_diff);
}

TEST_CASE("empty receiver list yields a header-only CSV") {
    SweepConfig cfg = small_config();
    cfg.receivers.clear();
    cfg.trials_per_point = 5;
    const SweepResult res = run_sweep(cfg);
    const std::string path = temp_path("empty");
    write_csv(res, path);
    const std::string text = slurp(path);
    CHECK(text ==
          "n,channel_model,lo,hi,constellation,receiver,user,noise_std,measured_snr_db,"
          "symbols_sent,symbol_errors,ser,ci95_half_width\n");
    std::remove(path.c_str());
}

TEST_CASE("metadata records the config and event counters") {
    SweepConfig cfg = small_config();
    cfg.trials_per_point = 10;
    const SweepResult res = run_sweep(cfg);
    const std::string path = temp_path("meta");
    write_metadata(res, path);
    const std::string text = slurp(path);
    CHECK(text.find("version = 0.1.0") != std::string::npos);
    CHECK(text.find("n = 1") != std::string::npos);
    CHECK(text.find("receivers = lzf_linear,lzf_glrt,ld") != std::string::npos);
    CHECK(text.find("trials_per_point = 10") != std::string::npos);
    CHECK(text.find("aborted_trials = 0") != std::string::npos);
    CHECK(text.find("measured_snr_db[1] = ") != std::string::npos);
    std::remove(path.c_str());
}

TEST_CASE("budget hits are counted per search") {
    SweepConfig cfg = small_config();
    cfg.receivers = {ReceiverKind::lzf_glrt, ReceiverKind::ld};
    cfg.node_budget = 1;
    cfg.noise_grid = {0.5};
    cfg.trials_per_point = 8;
    const SweepResult res = run_sweep(cfg);
    // two budgeted receivers x three users per trial
    CHECK(res.points[0].budget_exceeded_count == 6u * 8u);
}

TEST_CASE("calibration lands near the requested snr") {
    SweepConfig cfg = small_config();
    cfg.n = 2;
    cfg.trials_per_point = 200;
    const std::vector<double> grid = calibrate_noise_grid(cfg, {12.0, 18.0}, 300);
    REQUIRE(grid.size() == 2);
    CHECK(grid[0] > grid[1]);
    cfg.noise_grid = grid;
    const SweepResult res = run_sweep(cfg);
    CHECK(std::abs(res.points[0].measured_snr_db - 12.0) < 0.5);
    CHECK(std::abs(res.points[1].measured_snr_db - 18.0) < 0.5);

    CHECK_THROWS_AS(calibrate_noise_grid(cfg, {}, 10), SimError);
    CHECK_THROWS_AS(calibrate_noise_grid(cfg, {18.0, 12.0}, 10), SimError);
    CHECK_THROWS_AS(calibrate_noise_grid(cfg, {12.0}, 0), SimError);
}

TEST_CASE("parallel_for covers the range and propagates exceptions") {
    std::atomic<long> sum{0};
    parallel_for(100, 4, [&](int i) { sum += i; });
    CHECK(sum.load() == 4950);
    parallel_for(0, 4, [&](int) { FAIL("must not be called"); });
    CHECK_THROWS_AS(
        parallel_for(50, 4,
                     [&](int i) {
                         if (i == 17) throw SimError("boom");
                     }),
        SimError);
}

TEST_SUITE_END();
