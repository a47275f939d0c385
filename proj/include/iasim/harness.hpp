#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "iasim/channel.hpp"
#include "iasim/constellation.hpp"
#include "iasim/receivers.hpp"

namespace iasim {

inline constexpr const char* kVersion = "0.1.0";

enum class ReceiverKind { lzf_linear, lzf_glrt, ld };

const char* receiver_name(ReceiverKind r);
ReceiverKind receiver_from_name(const std::string& name); // throws SimError on unknown names

struct SweepConfig {
    int n = 5;
    ChannelModel model = ChannelModel::UnitModulus;
    double lo = 1.0;
    double hi = 1.0;
    int constellation_order = 4;
    std::vector<ReceiverKind> receivers;
    std::vector<double> noise_grid; // strictly decreasing
    int trials_per_point = 1000;
    std::uint64_t base_seed = 1;
    double gap_tol = 1e-9;
    std::uint64_t node_budget = 10000000;
    int max_resamples_per_trial = 32;
    LdMode ld_mode = LdMode::constrained;
    int threads = 1; // 0 = hardware concurrency
};

// Throws SimError when an invariant fails (empty grid, non-decreasing
// grid, trials < 1, non-positive tolerances).
void validate_config(const SweepConfig& cfg);

// One trial's contribution.  errors/symbols are indexed
// [receiver position in cfg.receivers][user-1].
struct TrialResult {
    std::vector<std::array<std::uint32_t, 3>> errors;
    std::vector<std::array<std::uint32_t, 3>> symbols;
    std::array<double, 3> powers{}; // realized per-subcarrier power per user
    std::uint32_t resamples = 0;    // extra sampling attempts beyond the first
    std::uint32_t degenerate = 0;
    std::uint32_t singular = 0;
    std::uint32_t budget_hits = 0;  // sphere searches that hit the node budget
};

// Runs one complete trial: sample channel (resampling degenerate or
// singular realizations), build precoders and equivalent channels, draw
// symbols, transmit, decode with every configured receiver at all three
// users.  Pure function of (cfg, noise_std, trial_seed).  Throws
// ResampleBudgetExceeded after max_resamples_per_trial failed attempts.
TrialResult run_trial(const SweepConfig& cfg, double noise_std, std::uint64_t trial_seed);

struct CellCounts {
    std::uint64_t symbols_sent = 0;
    std::uint64_t symbol_errors = 0;
};

struct PointResult {
    double noise_std = 0.0;
    double measured_snr_db = 0.0;
    std::vector<std::array<CellCounts, 3>> counts; // [receiver][user-1]
    std::uint64_t resample_count = 0;
    std::uint64_t degenerate_count = 0;
    std::uint64_t singular_count = 0;
    std::uint64_t budget_exceeded_count = 0;
    std::uint64_t aborted_trials = 0;
    double power_sum = 0.0;        // realized per-subcarrier power, all (trial, user) terms
    std::uint64_t power_terms = 0;
};

struct SweepResult {
    SweepConfig cfg;
    std::vector<PointResult> points;
};

// Executes the full grid.  Trials are independent and keyed by
// derive_seed(base_seed, point_index + 1, trial_index); results land in
// per-trial slots and are reduced serially in trial order, so the
// aggregate is bit-identical for every thread count.
SweepResult run_sweep(const SweepConfig& cfg);

struct WilsonInterval {
    double lo = 0.0;
    double hi = 1.0;
    double half_width = 0.5;
};

// 95% Wilson score interval for errors/total successes.
WilsonInterval wilson_interval(std::uint64_t errors, std::uint64_t total);

// 10 log10(mean_power / noise_std^2).
double measured_snr_db(double mean_power, double noise_std);

// Pilot pass: estimates the mean realized per-subcarrier power of the
// configured ensemble (pilot trials use tag 0 seeds, disjoint from the
// main pass), then maps target SNRs in dB to noise_std values.  Targets
// must be strictly increasing; the result is strictly decreasing.
std::vector<double> calibrate_noise_grid(const SweepConfig& cfg,
                                         const std::vector<double>& target_snr_db,
                                         int pilot_trials);

// CSV schema, one row per (grid point, receiver, user) plus a user=all
// aggregate row; 13 columns:
// n, channel_model, lo, hi, constellation, receiver, user, noise_std,
// measured_snr_db, symbols_sent, symbol_errors, ser, ci95_half_width
void write_csv(const SweepResult& res, const std::string& path);

// Key-value sidecar: full config, version, aggregate event counters.
void write_metadata(const SweepResult& res, const std::string& path);

// Runs fn(0..count-1) on `threads` workers (<=1 means the calling
// thread).  Worker exceptions are rethrown in the caller after join.
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

} // namespace iasim
