#include "iasim/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <thread>

#include "iasim/errors.hpp"
#include "iasim/mimo.hpp"
#include "iasim/precoding.hpp"
#include "iasim/rng.hpp"

namespace iasim {

namespace {

// Seed-splitting tags.  Pilot trials use point tag 0; main-pass point
// p uses tag p+1.  Channel sampling attempts split one level deeper.
constexpr std::uint64_t kChannelAttemptTag = 1;

constexpr double kZ95 = 1.959963984540054;

std::string fmt_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

const char* model_name(ChannelModel m) {
    return m == ChannelModel::UnitModulus ? "unit" : "trunc";
}

ChannelRealization sample_channel(const SweepConfig& cfg, std::uint64_t seed) {
    if (cfg.model == ChannelModel::UnitModulus) {
        return sample_unit_modulus(cfg.n, seed);
    }
    return sample_truncated_gaussian(cfg.n, cfg.lo, cfg.hi, seed);
}

} // namespace

const char* receiver_name(ReceiverKind r) {
    switch (r) {
        case ReceiverKind::lzf_linear: return "lzf_linear";
        case ReceiverKind::lzf_glrt: return "lzf_glrt";
        case ReceiverKind::ld: return "ld";
    }
    return "?";
}

ReceiverKind receiver_from_name(const std::string& name) {
    if (name == "lzf_linear") return ReceiverKind::lzf_linear;
    if (name == "lzf_glrt") return ReceiverKind::lzf_glrt;
    if (name == "ld") return ReceiverKind::ld;
    throw SimError("unknown receiver '" + name + "' (expected lzf_linear, lzf_glrt, or ld)");
}

void validate_config(const SweepConfig& cfg) {
    if (cfg.n < 1) throw SimError("n must be >= 1");
    if (cfg.trials_per_point < 1) throw SimError("trials_per_point must be >= 1");
    if (cfg.noise_grid.empty()) throw SimError("noise grid is empty");
    for (std::size_t i = 0; i < cfg.noise_grid.size(); ++i) {
        if (!(cfg.noise_grid[i] > 0.0)) throw SimError("noise_std values must be positive");
        if (i > 0 && !(cfg.noise_grid[i] < cfg.noise_grid[i - 1])) {
            throw SimError("noise grid must be strictly decreasing");
        }
    }
    if (!(cfg.gap_tol > 0.0)) throw SimError("gap_tol must be positive");
    if (cfg.max_resamples_per_trial < 0) throw SimError("max_resamples_per_trial must be >= 0");
    if (cfg.model == ChannelModel::TruncatedGaussian && !(0.0 <= cfg.lo && cfg.lo < cfg.hi)) {
        throw SimError("truncation bounds need 0 <= lo < hi");
    }
}

TrialResult run_trial(const SweepConfig& cfg, double noise_std, std::uint64_t trial_seed) {
    const Constellation c = make_qam(cfg.constellation_order);
    const SumConstellation c_sum = make_sum_set(c);
    const std::size_t nrecv = cfg.receivers.size();

    TrialResult tr;
    tr.errors.assign(nrecv, {0, 0, 0});
    tr.symbols.assign(nrecv, {0, 0, 0});

    const bool needs_pack =
        std::any_of(cfg.receivers.begin(), cfg.receivers.end(),
                    [](ReceiverKind r) { return r != ReceiverKind::ld; });

    // Symbols and noise depend only on trial_seed, so a channel
    // resample replays the same block against the fresh realization.
    const TransmitBlock blk = draw_block(c, cfg.n, trial_seed);

    for (std::uint32_t attempt = 0;; ++attempt) {
        if (attempt > static_cast<std::uint32_t>(cfg.max_resamples_per_trial)) {
            throw ResampleBudgetExceeded(
                "trial exceeded " + std::to_string(cfg.max_resamples_per_trial) +
                    " channel resamples",
                tr.degenerate, tr.singular);
        }
        tr.resamples = attempt;
        const std::uint64_t ch_seed = derive_seed(trial_seed, kChannelAttemptTag, attempt);
        try {
            const ChannelRealization ch = sample_channel(cfg, ch_seed);
            const PrecoderSet p = build_precoders(ch, cfg.gap_tol);

            std::array<EquivalentChannel, 3> eqs = {build_equivalent(ch, p, 1),
                                                    build_equivalent(ch, p, 2),
                                                    build_equivalent(ch, p, 3)};
            std::array<ProjectorPack, 3> packs;
            if (needs_pack) {
                for (int k = 0; k < 3; ++k) packs[k] = build_projector(eqs[k]);
            }

            const auto received = transmit(ch, p, blk, noise_std, trial_seed);
            tr.powers = realized_power(p, blk);

            for (std::size_t r = 0; r < nrecv; ++r) {
                for (int k = 0; k < 3; ++k) {
                    const std::vector<int>& truth = blk.symbol_indices[static_cast<std::size_t>(k)];
                    std::vector<int> decided;
                    switch (cfg.receivers[r]) {
                        case ReceiverKind::lzf_linear:
                            decided = decode_lzf_linear(received[static_cast<std::size_t>(k)],
                                                        packs[static_cast<std::size_t>(k)], c);
                            break;
                        case ReceiverKind::lzf_glrt: {
                            GlrtDecision d = decode_lzf_glrt(
                                received[static_cast<std::size_t>(k)],
                                eqs[static_cast<std::size_t>(k)],
                                packs[static_cast<std::size_t>(k)], c, cfg.node_budget);
                            if (d.budget_exhausted) ++tr.budget_hits;
                            decided = std::move(d.desired_indices);
                            break;
                        }
                        case ReceiverKind::ld: {
                            LdDecision d = decode_ld(received[static_cast<std::size_t>(k)],
                                                     eqs[static_cast<std::size_t>(k)], c, c_sum,
                                                     cfg.node_budget, cfg.ld_mode);
                            if (d.budget_exhausted) ++tr.budget_hits;
                            decided = std::move(d.desired_indices);
                            break;
                        }
                    }
                    std::uint32_t errs = 0;
                    for (std::size_t i = 0; i < truth.size(); ++i) {
                        if (decided[i] != truth[i]) ++errs;
                    }
                    tr.errors[r][static_cast<std::size_t>(k)] += errs;
                    tr.symbols[r][static_cast<std::size_t>(k)] +=
                        static_cast<std::uint32_t>(truth.size());
                }
            }
            return tr;
        } catch (const DegenerateChannel&) {
            ++tr.degenerate;
        } catch (const RankDeficient&) {
            ++tr.degenerate;
        } catch (const SingularEquivalentChannel&) {
            ++tr.singular;
        } catch (const IllConditionedInterference&) {
            ++tr.singular;
        } catch (const IllConditionedProjectedChannel&) {
            ++tr.singular;
        }
        // Decoding never ran for this attempt; clear any partial counts.
        tr.errors.assign(nrecv, {0, 0, 0});
        tr.symbols.assign(nrecv, {0, 0, 0});
        tr.budget_hits = 0;
    }
}

void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
    if (count <= 0) return;
    if (threads <= 0) {
        threads = static_cast<int>(std::thread::hardware_concurrency());
        if (threads <= 0) threads = 1;
    }
    threads = std::min(threads, count);
    if (threads == 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }

    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex error_mu;
    std::atomic<bool> failed{false};

    auto worker = [&]() {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= count || failed.load()) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mu);
                if (!first_error) first_error = std::current_exception();
                failed.store(true);
                return;
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

SweepResult run_sweep(const SweepConfig& cfg) {
    validate_config(cfg);

    SweepResult result;
    result.cfg = cfg;
    result.points.resize(cfg.noise_grid.size());

    const std::size_t nrecv = cfg.receivers.size();
    const int trials = cfg.trials_per_point;

    for (std::size_t p = 0; p < cfg.noise_grid.size(); ++p) {
        const double noise_std = cfg.noise_grid[p];

        std::vector<TrialResult> slots(static_cast<std::size_t>(trials));
        std::vector<char> aborted(static_cast<std::size_t>(trials), 0);

        parallel_for(trials, cfg.threads, [&](int t) {
            const std::uint64_t trial_seed =
                derive_seed(cfg.base_seed, p + 1, static_cast<std::uint64_t>(t));
            try {
                slots[static_cast<std::size_t>(t)] = run_trial(cfg, noise_std, trial_seed);
            } catch (const ResampleBudgetExceeded& e) {
                TrialResult& tr = slots[static_cast<std::size_t>(t)];
                tr.errors.assign(nrecv, {0, 0, 0});
                tr.symbols.assign(nrecv, {0, 0, 0});
                tr.resamples = static_cast<std::uint32_t>(cfg.max_resamples_per_trial);
                tr.degenerate = e.degenerate_events;
                tr.singular = e.singular_events;
                aborted[static_cast<std::size_t>(t)] = 1;
            }
        });

        // Serial reduce in trial order keeps the floating-point power
        // sum identical for every thread count.
        PointResult& pt = result.points[p];
        pt.noise_std = noise_std;
        pt.counts.assign(nrecv, {});
        for (int t = 0; t < trials; ++t) {
            const TrialResult& tr = slots[static_cast<std::size_t>(t)];
            pt.resample_count += tr.resamples;
            pt.degenerate_count += tr.degenerate;
            pt.singular_count += tr.singular;
            if (aborted[static_cast<std::size_t>(t)]) {
                ++pt.aborted_trials;
                continue;
            }
            pt.budget_exceeded_count += tr.budget_hits;
            for (std::size_t r = 0; r < nrecv; ++r) {
                for (int u = 0; u < 3; ++u) {
                    pt.counts[r][static_cast<std::size_t>(u)].symbol_errors +=
                        tr.errors[r][static_cast<std::size_t>(u)];
                    pt.counts[r][static_cast<std::size_t>(u)].symbols_sent +=
                        tr.symbols[r][static_cast<std::size_t>(u)];
                }
            }
            for (int u = 0; u < 3; ++u) pt.power_sum += tr.powers[static_cast<std::size_t>(u)];
            pt.power_terms += 3;
        }
        pt.measured_snr_db =
            pt.power_terms == 0
                ? 0.0
                : measured_snr_db(pt.power_sum / static_cast<double>(pt.power_terms), noise_std);
    }
    return result;
}

WilsonInterval wilson_interval(std::uint64_t errors, std::uint64_t total) {
    WilsonInterval w;
    if (total == 0) return w;
    const double nn = static_cast<double>(total);
    const double phat = static_cast<double>(errors) / nn;
    const double z2 = kZ95 * kZ95;
    const double denom = 1.0 + z2 / nn;
    const double center = (phat + z2 / (2.0 * nn)) / denom;
    const double hw =
        kZ95 * std::sqrt(phat * (1.0 - phat) / nn + z2 / (4.0 * nn * nn)) / denom;
    w.lo = std::max(0.0, center - hw);
    w.hi = std::min(1.0, center + hw);
    w.half_width = hw;
    return w;
}

double measured_snr_db(double mean_power, double noise_std) {
    return 10.0 * std::log10(mean_power / (noise_std * noise_std));
}

std::vector<double> calibrate_noise_grid(const SweepConfig& cfg,
                                         const std::vector<double>& target_snr_db,
                                         int pilot_trials) {
    if (target_snr_db.empty()) throw SimError("empty SNR target list");
    for (std::size_t i = 1; i < target_snr_db.size(); ++i) {
        if (!(target_snr_db[i] > target_snr_db[i - 1])) {
            throw SimError("SNR targets must be strictly increasing");
        }
    }
    if (pilot_trials < 1) throw SimError("pilot_trials must be >= 1");

    SweepConfig pilot = cfg;
    pilot.receivers.clear();

    std::vector<TrialResult> slots(static_cast<std::size_t>(pilot_trials));
    std::vector<char> ok(static_cast<std::size_t>(pilot_trials), 1);
    parallel_for(pilot_trials, cfg.threads, [&](int t) {
        const std::uint64_t trial_seed =
            derive_seed(cfg.base_seed, 0, static_cast<std::uint64_t>(t));
        try {
            slots[static_cast<std::size_t>(t)] = run_trial(pilot, 1.0, trial_seed);
        } catch (const ResampleBudgetExceeded&) {
            ok[static_cast<std::size_t>(t)] = 0;
        }
    });

    double power_sum = 0.0;
    std::uint64_t terms = 0;
    for (int t = 0; t < pilot_trials; ++t) {
        if (!ok[static_cast<std::size_t>(t)]) continue;
        for (int u = 0; u < 3; ++u) {
            power_sum += slots[static_cast<std::size_t>(t)].powers[static_cast<std::size_t>(u)];
        }
        terms += 3;
    }
    if (terms == 0) throw SimError("calibration failed: every pilot trial aborted");
    const double mean_power = power_sum / static_cast<double>(terms);

    std::vector<double> grid;
    grid.reserve(target_snr_db.size());
    for (double db : target_snr_db) {
        grid.push_back(std::sqrt(mean_power / std::pow(10.0, db / 10.0)));
    }
    return grid;
}

void write_csv(const SweepResult& res, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open CSV output '" + path + "'");

    out << "n,channel_model,lo,hi,constellation,receiver,user,noise_std,measured_snr_db,"
           "symbols_sent,symbol_errors,ser,ci95_half_width\n";

    const SweepConfig& cfg = res.cfg;
    const std::string prefix = std::to_string(cfg.n) + "," + model_name(cfg.model) + "," +
                               fmt_g17(cfg.lo) + "," + fmt_g17(cfg.hi) + ",qam" +
                               std::to_string(cfg.constellation_order) + ",";

    auto emit = [&](const std::string& receiver, const std::string& user, const PointResult& pt,
                    const CellCounts& cell) {
        const double ser = cell.symbols_sent == 0
                               ? 0.0
                               : static_cast<double>(cell.symbol_errors) /
                                     static_cast<double>(cell.symbols_sent);
        const WilsonInterval w = wilson_interval(cell.symbol_errors, cell.symbols_sent);
        out << prefix << receiver << ',' << user << ',' << fmt_g17(pt.noise_std) << ','
            << fmt_g17(pt.measured_snr_db) << ',' << cell.symbols_sent << ','
            << cell.symbol_errors << ',' << fmt_g17(ser) << ',' << fmt_g17(w.half_width)
            << '\n';
    };

    for (const PointResult& pt : res.points) {
        for (std::size_t r = 0; r < cfg.receivers.size(); ++r) {
            const std::string rname = receiver_name(cfg.receivers[r]);
            CellCounts all;
            for (int u = 0; u < 3; ++u) {
                const CellCounts& cell = pt.counts[r][static_cast<std::size_t>(u)];
                emit(rname, std::to_string(u + 1), pt, cell);
                all.symbols_sent += cell.symbols_sent;
                all.symbol_errors += cell.symbol_errors;
            }
            emit(rname, "all", pt, all);
        }
    }
    if (!out) throw IoError("write failure on '" + path + "'");
}

void write_metadata(const SweepResult& res, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open metadata output '" + path + "'");

    const SweepConfig& cfg = res.cfg;
    out << "version = " << kVersion << "\n";
    out << "n = " << cfg.n << "\n";
    out << "model = " << model_name(cfg.model) << "\n";
    out << "lo = " << fmt_g17(cfg.lo) << "\n";
    out << "hi = " << fmt_g17(cfg.hi) << "\n";
    out << "constellation = qam" << cfg.constellation_order << "\n";
    out << "receivers = ";
    for (std::size_t r = 0; r < cfg.receivers.size(); ++r) {
        if (r) out << ',';
        out << receiver_name(cfg.receivers[r]);
    }
    out << "\n";
    out << "noise_grid = ";
    for (std::size_t i = 0; i < cfg.noise_grid.size(); ++i) {
        if (i) out << ',';
        out << fmt_g17(cfg.noise_grid[i]);
    }
    out << "\n";
    out << "trials_per_point = " << cfg.trials_per_point << "\n";
    out << "base_seed = " << cfg.base_seed << "\n";
    out << "gap_tol = " << fmt_g17(cfg.gap_tol) << "\n";
    out << "node_budget = " << cfg.node_budget << "\n";
    out << "max_resamples_per_trial = " << cfg.max_resamples_per_trial << "\n";
    out << "ld_mode = " << (cfg.ld_mode == LdMode::constrained ? "constrained" : "unbounded")
        << "\n";
    out << "threads = " << cfg.threads << "\n";

    std::uint64_t resamples = 0, degenerate = 0, singular = 0, budget = 0, abortedn = 0;
    for (const PointResult& pt : res.points) {
        resamples += pt.resample_count;
        degenerate += pt.degenerate_count;
        singular += pt.singular_count;
        budget += pt.budget_exceeded_count;
        abortedn += pt.aborted_trials;
    }
    out << "resample_count = " << resamples << "\n";
    out << "degenerate_count = " << degenerate << "\n";
    out << "singular_count = " << singular << "\n";
    out << "budget_exceeded_count = " << budget << "\n";
    out << "aborted_trials = " << abortedn << "\n";
    for (std::size_t p = 0; p < res.points.size(); ++p) {
        out << "measured_snr_db[" << p << "] = " << fmt_g17(res.points[p].measured_snr_db)
            << "\n";
    }
    if (!out) throw IoError("write failure on '" + path + "'");
}

} // namespace iasim
