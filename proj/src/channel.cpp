#include "iasim/channel.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "iasim/errors.hpp"
#include "iasim/precoding.hpp"
#include "iasim/rng.hpp"

namespace iasim {

namespace {

// Stream ids within a channel seed; one stream per link keeps the
// realization independent of sampling order.
constexpr std::uint64_t link_stream(int i, int j) {
    return static_cast<std::uint64_t>((i - 1) * 3 + (j - 1));
}

} // namespace

ChannelRealization sample_unit_modulus(int n, std::uint64_t seed) {
    ChannelRealization ch;
    ch.n = n;
    ch.model = ChannelModel::UnitModulus;
    ch.lo = 1.0;
    ch.hi = 1.0;
    const int len = ch.block_len();
    for (int i = 1; i <= 3; ++i) {
        for (int j = 1; j <= 3; ++j) {
            Rng rng(seed, link_stream(i, j));
            Eigen::VectorXcd& v = ch.link(i, j);
            v.resize(len);
            for (int t = 0; t < len; ++t) {
                const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
                v[t] = std::polar(1.0, phi);
            }
        }
    }
    return ch;
}

ChannelRealization sample_truncated_gaussian(int n, double lo, double hi, std::uint64_t seed,
                                             std::uint64_t redraw_cap) {
    // Acceptance mass of [lo, hi] under the Rayleigh magnitude law of a
    // unit-total-variance complex normal.
    const double accept = std::exp(-lo * lo) - std::exp(-hi * hi);
    if (!(accept > 0.0) || 1.0 / accept > static_cast<double>(redraw_cap)) {
        throw RejectionBudgetExceeded(
            "truncation interval [" + std::to_string(lo) + ", " + std::to_string(hi) +
            "] implies more than " + std::to_string(redraw_cap) + " expected redraws per entry");
    }

    ChannelRealization ch;
    ch.n = n;
    ch.model = ChannelModel::TruncatedGaussian;
    ch.lo = lo;
    ch.hi = hi;
    const int len = ch.block_len();
    for (int i = 1; i <= 3; ++i) {
        for (int j = 1; j <= 3; ++j) {
            Rng rng(seed, link_stream(i, j));
            Eigen::VectorXcd& v = ch.link(i, j);
            v.resize(len);
            for (int t = 0; t < len; ++t) {
                std::uint64_t draws = 0;
                for (;;) {
                    if (++draws > redraw_cap) {
                        throw RejectionBudgetExceeded("entry exceeded the per-entry redraw cap");
                    }
                    const std::complex<double> g = rng.complex_normal(1.0);
                    const double mag = std::abs(g);
                    if (mag >= lo && mag <= hi) {
                        v[t] = g;
                        break;
                    }
                }
            }
        }
    }
    return ch;
}

ChannelDiagnostics validate_channel(const ChannelRealization& ch, double gap_tol) {
    const Eigen::VectorXcd t = build_t(ch);
    ChannelDiagnostics diag;

    double min_gap = std::numeric_limits<double>::infinity();
    for (int a = 0; a < t.size(); ++a) {
        for (int b = a + 1; b < t.size(); ++b) {
            min_gap = std::min(min_gap, std::abs(t[a] - t[b]));
        }
    }
    diag.min_t_gap = min_gap;

    const Eigen::VectorXd mags = t.cwiseAbs();
    diag.t_magnitude_range = {mags.minCoeff(), mags.maxCoeff()};

    if (min_gap < gap_tol) {
        throw DegenerateChannel("min pairwise T gap " + std::to_string(min_gap) +
                                " below tolerance " + std::to_string(gap_tol));
    }
    return diag;
}

} // namespace iasim
