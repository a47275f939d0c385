// Command-line front end: sweep / verify / plot.

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "iasim/channel.hpp"
#include "iasim/constellation.hpp"
#include "iasim/errors.hpp"
#include "iasim/harness.hpp"
#include "iasim/lattice.hpp"
#include "iasim/mimo.hpp"
#include "iasim/plot.hpp"
#include "iasim/precoding.hpp"
#include "iasim/receivers.hpp"
#include "iasim/rng.hpp"

namespace {

using namespace iasim;

struct SweepArgs {
    int n = 5;
    std::string model = "unit";
    double lo = 0.0;
    double hi = 0.0;
    std::string constellation = "qam4";
    std::string receivers = "lzf_linear,lzf_glrt,ld";
    std::string snr_db = "0:5:40";
    int trials = 1000;
    std::uint64_t seed = 1;
    std::uint64_t node_budget = 10000000;
    std::string out_dir = "results";
    std::string threads = "1";
    int pilot_trials = 400;
    std::string ld_mode = "constrained";
    double gap_tol = 1e-9;
    int max_resamples = 32;
};

struct VerifyArgs {
    int n = 1;
    int trials = 1000;
    std::uint64_t seed = 7;
    std::string model = "unit";
    double lo = 0.8;
    double hi = 1.4;
};

struct PlotArgs {
    std::string csv;
    std::string out;
};

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

int parse_threads(const std::string& s) {
    if (s == "auto") return 0;
    try {
        const int t = std::stoi(s);
        if (t >= 1) return t;
    } catch (...) {
    }
    throw SimError("--threads expects a positive integer or 'auto', got '" + s + "'");
}

std::vector<double> parse_snr_targets(const std::string& s) {
    const auto parts = split(s, ':');
    if (parts.size() != 3) throw SimError("--snr-db expects start:step:stop, got '" + s + "'");
    double start, step, stop;
    try {
        start = std::stod(parts[0]);
        step = std::stod(parts[1]);
        stop = std::stod(parts[2]);
    } catch (...) {
        throw SimError("--snr-db expects numeric start:step:stop, got '" + s + "'");
    }
    if (!(step > 0.0)) throw SimError("--snr-db step must be positive");
    if (stop < start) throw SimError("--snr-db stop must be >= start");
    std::vector<double> targets;
    for (double v = start; v <= stop + 1e-9; v += step) targets.push_back(v);
    return targets;
}

std::vector<ReceiverKind> parse_receivers(const std::string& s) {
    std::vector<ReceiverKind> out;
    for (const std::string& name : split(s, ',')) {
        if (name.empty()) continue;
        const ReceiverKind r = receiver_from_name(name);
        bool dup = false;
        for (ReceiverKind have : out) dup = dup || have == r;
        if (!dup) out.push_back(r);
    }
    if (out.empty()) throw SimError("--receivers selected no receiver");
    return out;
}

SweepConfig make_config(const SweepArgs& a, bool lo_set, bool hi_set) {
    SweepConfig cfg;
    cfg.n = a.n;
    if (a.model == "unit") {
        cfg.model = ChannelModel::UnitModulus;
        cfg.lo = 1.0;
        cfg.hi = 1.0;
    } else if (a.model == "trunc") {
        if (!lo_set || !hi_set) {
            throw SimError("--model trunc requires --lo and --hi");
        }
        cfg.model = ChannelModel::TruncatedGaussian;
        cfg.lo = a.lo;
        cfg.hi = a.hi;
    } else {
        throw SimError("--model expects unit or trunc, got '" + a.model + "'");
    }
    if (a.constellation == "qam4") {
        cfg.constellation_order = 4;
    } else if (a.constellation == "qam16") {
        cfg.constellation_order = 16;
    } else {
        throw SimError("--constellation expects qam4 or qam16, got '" + a.constellation + "'");
    }
    cfg.receivers = parse_receivers(a.receivers);
    cfg.trials_per_point = a.trials;
    cfg.base_seed = a.seed;
    cfg.node_budget = a.node_budget;
    cfg.gap_tol = a.gap_tol;
    cfg.max_resamples_per_trial = a.max_resamples;
    cfg.threads = parse_threads(a.threads);
    if (a.ld_mode == "constrained") {
        cfg.ld_mode = LdMode::constrained;
    } else if (a.ld_mode == "unbounded") {
        cfg.ld_mode = LdMode::unbounded;
    } else {
        throw SimError("--ld-mode expects constrained or unbounded");
    }
    return cfg;
}

int run_sweep_cmd(const SweepArgs& a, bool lo_set, bool hi_set) {
    SweepConfig cfg = make_config(a, lo_set, hi_set);
    const std::vector<double> targets = parse_snr_targets(a.snr_db);

    std::cout << "calibrating noise grid (" << a.pilot_trials << " pilot trials)...\n";
    cfg.noise_grid = calibrate_noise_grid(cfg, targets, a.pilot_trials);

    std::cout << "running " << cfg.noise_grid.size() << " grid points x "
              << cfg.trials_per_point << " trials...\n";
    const SweepResult res = run_sweep(cfg);

    std::filesystem::create_directories(a.out_dir);
    std::string base = "sweep_" + a.model + "_n" + std::to_string(a.n) + "_" + a.constellation;
    const std::string csv_path = (std::filesystem::path(a.out_dir) / (base + ".csv")).string();
    const std::string meta_path =
        (std::filesystem::path(a.out_dir) / (base + ".meta.txt")).string();
    write_csv(res, csv_path);
    write_metadata(res, meta_path);

    std::printf("%10s %12s", "snr_db", "noise_std");
    for (ReceiverKind r : cfg.receivers) std::printf(" %12s", receiver_name(r));
    std::printf("\n");
    for (const PointResult& pt : res.points) {
        std::printf("%10.2f %12.4g", pt.measured_snr_db, pt.noise_std);
        for (std::size_t r = 0; r < cfg.receivers.size(); ++r) {
            std::uint64_t errs = 0, sent = 0;
            for (int u = 0; u < 3; ++u) {
                errs += pt.counts[r][static_cast<std::size_t>(u)].symbol_errors;
                sent += pt.counts[r][static_cast<std::size_t>(u)].symbols_sent;
            }
            std::printf(" %12.3e", sent ? static_cast<double>(errs) / static_cast<double>(sent)
                                        : 0.0);
        }
        std::printf("\n");
    }
    std::cout << "wrote " << csv_path << "\n";
    std::cout << "wrote " << meta_path << "\n";
    return 0;
}

ChannelRealization verify_sample(const VerifyArgs& a, std::uint64_t seed) {
    if (a.model == "trunc") return sample_truncated_gaussian(a.n, a.lo, a.hi, seed);
    return sample_unit_modulus(a.n, seed);
}

int run_verify_cmd(const VerifyArgs& a) {
    bool all_pass = true;
    const Constellation c = make_qam(4);
    const SumConstellation c_sum = make_sum_set(c);

    auto report = [&](const char* name, bool pass) {
        std::printf("%s %s\n", pass ? "PASS" : "FAIL", name);
        all_pass = all_pass && pass;
    };

    // Alignment identity residuals.
    {
        double worst = 0.0;
        for (int i = 0; i < a.trials; ++i) {
            const ChannelRealization ch = verify_sample(a, derive_seed(a.seed, 11, i));
            const PrecoderSet p = build_precoders(ch, 1e-9);
            for (double r : check_alignment(ch, p)) worst = std::max(worst, r);
        }
        std::printf("  alignment residual max = %.3e\n", worst);
        report("alignment identities hold to 1e-10", worst <= 1e-10);
    }

    // Noiseless raw-sum vs aligned-form agreement.
    {
        double worst = 0.0;
        for (int i = 0; i < a.trials; ++i) {
            const std::uint64_t s = derive_seed(a.seed, 12, i);
            const ChannelRealization ch = verify_sample(a, s);
            const PrecoderSet p = build_precoders(ch, 1e-9);
            const TransmitBlock blk = draw_block(c, a.n, s);
            const auto received = transmit(ch, p, blk, 0.0, s);
            for (int k = 1; k <= 3; ++k) {
                const EquivalentChannel eq = build_equivalent(ch, p, k);
                const Eigen::VectorXcd model = eq.g_full * stacked_symbol_vector(blk, k, a.n);
                const double rel = (received[static_cast<std::size_t>(k - 1)] - model).norm() /
                                   model.norm();
                worst = std::max(worst, rel);
            }
        }
        std::printf("  aligned-form residual max = %.3e\n", worst);
        report("noiseless received = equivalent-channel form to 1e-10", worst <= 1e-10);
    }

    // Sphere decoder vs exhaustive search on receiver 1.
    {
        bool pass = true;
        bool ran = true;
        for (int i = 0; i < a.trials && pass; ++i) {
            const std::uint64_t s = derive_seed(a.seed, 13, i);
            const ChannelRealization ch = verify_sample(a, s);
            const PrecoderSet p = build_precoders(ch, 1e-9);
            const EquivalentChannel eq = build_equivalent(ch, p, 1);
            const TransmitBlock blk = draw_block(c, a.n, s);
            const auto received = transmit(ch, p, blk, 0.5, s);
            const RealSystem sys =
                embed(eq.g_full, received[0], c.axis(), c_sum.axis(), eq.desired_cols);
            try {
                const SearchResult bf = brute_force_ml(sys);
                const SearchResult sp = sphere_decode(sys);
                pass = pass && !sp.budget_exhausted && sp.sq_distance == bf.sq_distance;
            } catch (const SearchSpaceTooLarge&) {
                std::printf("  (skipped: exhaustive space too large at n=%d)\n", a.n);
                ran = false;
                break;
            }
        }
        if (ran) report("sphere search metric = exhaustive metric", pass);
    }

    // GLRT projected metric vs explicit two-stage least squares.
    {
        double worst = 0.0;
        Rng pick(a.seed, 99);
        for (int i = 0; i < a.trials; ++i) {
            const std::uint64_t s = derive_seed(a.seed, 14, i);
            const ChannelRealization ch = verify_sample(a, s);
            const PrecoderSet p = build_precoders(ch, 1e-9);
            const EquivalentChannel eq = build_equivalent(ch, p, 1);
            const ProjectorPack pack = build_projector(eq);
            const TransmitBlock blk = draw_block(c, a.n, s);
            const auto received = transmit(ch, p, blk, 0.5, s);

            Eigen::VectorXcd x1(eq.desired_cols);
            for (int j = 0; j < eq.desired_cols; ++j) {
                x1[j] = c.point(static_cast<int>(pick.next_u32() % c.size()));
            }
            const Eigen::VectorXcd resid = received[0] - eq.g_desired() * x1;
            const double projected = (pack.p_perp * resid).squaredNorm();
            const Eigen::MatrixXcd gi = eq.g_interf();
            const Eigen::VectorXcd s_hat = gi.colPivHouseholderQr().solve(resid);
            const double two_stage = (resid - gi * s_hat).squaredNorm();
            worst = std::max(worst,
                             std::abs(projected - two_stage) / std::max(projected, two_stage));
        }
        std::printf("  GLRT identity relative gap max = %.3e\n", worst);
        report("projected metric = two-stage least squares to 1e-8", worst <= 1e-8);
    }

    return all_pass ? 0 : 3;
}

int run_plot_cmd(const PlotArgs& a) {
    std::string out = a.out;
    if (out.empty()) {
        std::filesystem::path p(a.csv);
        p.replace_extension(".svg");
        out = p.string();
    }
    emit_plot(a.csv, out);
    std::cout << "wrote " << out << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"3-user interference alignment simulator: LZF vs lattice decoding"};
    app.require_subcommand(1);
    app.set_version_flag("--version", iasim::kVersion);

    SweepArgs sa;
    CLI::App* sweep = app.add_subcommand("sweep", "run a Monte Carlo SER sweep");
    sweep->set_config("--config", "", "key=value config file; flags win");
    sweep->add_option("--n", sa.n, "precoder order (block length 2n+1)")
        ->check(CLI::PositiveNumber);
    sweep->add_option("--model", sa.model, "channel model: unit | trunc");
    auto* lo_opt = sweep->add_option("--lo", sa.lo, "truncation lower bound (trunc model)");
    auto* hi_opt = sweep->add_option("--hi", sa.hi, "truncation upper bound (trunc model)");
    sweep->add_option("--constellation", sa.constellation, "qam4 | qam16");
    sweep->add_option("--receivers", sa.receivers, "comma list of lzf_linear,lzf_glrt,ld");
    sweep->add_option("--snr-db", sa.snr_db, "target SNR grid start:step:stop in dB");
    sweep->add_option("--trials", sa.trials, "trials per grid point")
        ->check(CLI::PositiveNumber);
    sweep->add_option("--seed", sa.seed, "base seed");
    sweep->add_option("--node-budget", sa.node_budget, "sphere search node budget");
    sweep->add_option("--out", sa.out_dir, "output directory")->envname("IASIM_OUT_DIR");
    sweep->add_option("--threads", sa.threads, "worker threads, or 'auto'");
    sweep->add_option("--pilot-trials", sa.pilot_trials, "calibration pilot trials")
        ->check(CLI::PositiveNumber);
    sweep->add_option("--ld-mode", sa.ld_mode, "lattice decoder mode: constrained | unbounded");
    sweep->add_option("--gap-tol", sa.gap_tol, "degeneracy gap tolerance");
    sweep->add_option("--max-resamples", sa.max_resamples, "channel resamples per trial");

    VerifyArgs va;
    CLI::App* verify = app.add_subcommand("verify", "run the oracle-equivalence checks");
    verify->add_option("--n", va.n, "precoder order")->check(CLI::PositiveNumber);
    verify->add_option("--trials", va.trials, "instances per property")
        ->check(CLI::PositiveNumber);
    verify->add_option("--seed", va.seed, "base seed");
    verify->add_option("--model", va.model, "channel model: unit | trunc");
    verify->add_option("--lo", va.lo, "truncation lower bound");
    verify->add_option("--hi", va.hi, "truncation upper bound");

    PlotArgs pa;
    CLI::App* plot = app.add_subcommand("plot", "render an SER curve SVG from a sweep CSV");
    plot->add_option("--csv", pa.csv, "input CSV path")->required();
    plot->add_option("--out", pa.out, "output SVG path (default: CSV path with .svg)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (sweep->parsed()) {
            try {
                return run_sweep_cmd(sa, lo_opt->count() > 0, hi_opt->count() > 0);
            } catch (const iasim::SimError& e) {
                // Flag-combination problems are usage errors, not runtime ones.
                const std::string msg = e.what();
                if (msg.rfind("--", 0) == 0) {
                    std::cerr << "usage error: " << msg << "\n";
                    return 1;
                }
                throw;
            }
        }
        if (verify->parsed()) return run_verify_cmd(va);
        if (plot->parsed()) return run_plot_cmd(pa);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
