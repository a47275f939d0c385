#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <doctest.h>

#include "iasim/channel.hpp"
#include "iasim/constellation.hpp"
#include "iasim/errors.hpp"

using namespace iasim;

namespace {

// Two-sided Kolmogorov-Smirnov statistic of `samples` against the CDF
// values already evaluated at each sample.
double ks_statistic(std::vector<double> cdf_at_samples) {
    std::sort(cdf_at_samples.begin(), cdf_at_samples.end());
    const double m = static_cast<double>(cdf_at_samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < cdf_at_samples.size(); ++i) {
        const double f = cdf_at_samples[i];
        d = std::max(d, f - static_cast<double>(i) / m);
        d = std::max(d, static_cast<double>(i + 1) / m - f);
    }
    return d;
}

} // namespace

TEST_SUITE_BEGIN("channel");

TEST_CASE("unit-modulus entries sit on the unit circle") {
    const ChannelRealization ch = sample_unit_modulus(5, 99);
    CHECK(ch.block_len() == 11);
    for (int i = 1; i <= 3; ++i) {
        for (int j = 1; j <= 3; ++j) {
            const Eigen::VectorXcd& v = ch.link(i, j);
            REQUIRE(v.size() == 11);
            for (int t = 0; t < v.size(); ++t) {
                CHECK(std::abs(std::abs(v[t]) - 1.0) < 1e-14);
            }
        }
    }
}

TEST_CASE("unit-modulus phases look uniform") {
    const int n = 500; // 9 * 1001 phase samples
    const ChannelRealization ch = sample_unit_modulus(n, 1234);
    std::vector<double> cdf;
    for (int i = 1; i <= 3; ++i) {
        for (int j = 1; j <= 3; ++j) {
            const Eigen::VectorXcd& v = ch.link(i, j);
            for (int t = 0; t < v.size(); ++t) {
                double phi = std::arg(v[t]);
                if (phi < 0) phi += 2.0 * std::numbers::pi;
                cdf.push_back(phi / (2.0 * std::numbers::pi));
            }
        }
    }
    // KS critical value at alpha = 0.01 for m samples is 1.6276/sqrt(m)
    const double crit = 1.6276 / std::sqrt(static_cast<double>(cdf.size()));
    CHECK(ks_statistic(std::move(cdf)) < crit);
}

TEST_CASE("truncated magnitudes respect the bounds exactly") {
    const double lo = 0.8;
    const double hi = 1.4;
    const ChannelRealization ch = sample_truncated_gaussian(20, lo, hi, 7);
    for (int i = 1; i <= 3; ++i) {
        for (int j = 1; j <= 3; ++j) {
            const Eigen::VectorXcd& v = ch.link(i, j);
            for (int t = 0; t < v.size(); ++t) {
                const double mag = std::abs(v[t]);
                CHECK(mag >= lo);
                CHECK(mag <= hi);
            }
        }
    }
}

TEST_CASE("truncated magnitude law matches the conditioned Rayleigh CDF") {
    const double lo = 0.8;
    const double hi = 1.4;
    const int n = 200; // 9 * 401 magnitude samples
    const ChannelRealization ch = sample_truncated_gaussian(n, lo, hi, 31);
    const double mass = std::exp(-lo * lo) - std::exp(-hi * hi);
    std::vector<double> cdf;
    for (int i = 1; i <= 3; ++i) {
        for (int j = 1; j <= 3; ++j) {
            const Eigen::VectorXcd& v = ch.link(i, j);
            for (int t = 0; t < v.size(); ++t) {
                const double r = std::abs(v[t]);
                cdf.push_back((std::exp(-lo * lo) - std::exp(-r * r)) / mass);
            }
        }
    }
    const double crit = 1.6276 / std::sqrt(static_cast<double>(cdf.size()));
    CHECK(ks_statistic(std::move(cdf)) < crit);
}

TEST_CASE("hopeless truncation intervals are refused up front") {
    // acceptance mass ~ 7e-8: far beyond the default expected-redraw cap
    CHECK_THROWS_AS(sample_truncated_gaussian(1, 1.0, 1.0000001, 3), RejectionBudgetExceeded);
    // inverted bounds have no acceptance mass at all
    CHECK_THROWS_AS(sample_truncated_gaussian(1, 1.4, 0.8, 3), RejectionBudgetExceeded);
}

TEST_CASE("sampling is a pure function of (n, seed)") {
    const ChannelRealization a = sample_unit_modulus(4, 555);
    const ChannelRealization b = sample_unit_modulus(4, 555);
    const ChannelRealization c = sample_unit_modulus(4, 556);
    bool any_diff = false;
    for (int i = 1; i <= 3; ++i) {
        for (int j = 1; j <= 3; ++j) {
            CHECK(a.link(i, j) == b.link(i, j));
            if (a.link(i, j) != c.link(i, j)) any_diff = true;
        }
    }
    CHECK(any_diff);
    const ChannelRealization ta = sample_truncated_gaussian(4, 0.8, 1.4, 555);
    const ChannelRealization tb = sample_truncated_gaussian(4, 0.8, 1.4, 555);
    for (int i = 1; i <= 3; ++i) {
        for (int j = 1; j <= 3; ++j) {
            CHECK(ta.link(i, j) == tb.link(i, j));
        }
    }
}

TEST_CASE("link indexing and diagonal lift") {
    ChannelRealization ch = sample_unit_modulus(1, 12);
    ch.link(2, 3)[0] = cplx(5, 0);
    CHECK(ch.links[5][0] == cplx(5, 0)); // (2-1)*3 + (3-1)
    const Eigen::MatrixXcd m = ch.link_matrix(2, 3);
    CHECK(m(0, 0) == cplx(5, 0));
    CHECK(m(0, 1) == cplx(0, 0));
    CHECK(m(1, 1) == ch.link(2, 3)[1]);
}

TEST_CASE("validate_channel reports gaps and flags degeneracy") {
    const ChannelRealization ch = sample_unit_modulus(3, 77);
    const ChannelDiagnostics diag = validate_channel(ch, 1e-9);
    CHECK(diag.min_t_gap > 1e-9);
    // unit-modulus links make |T_t| = 1 exactly
    CHECK(diag.t_magnitude_range.first == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(diag.t_magnitude_range.second == doctest::Approx(1.0).epsilon(1e-12));

    ChannelRealization flat;
    flat.n = 2;
    flat.model = ChannelModel::UnitModulus;
    for (auto& link : flat.links) link = Eigen::VectorXcd::Ones(flat.block_len());
    CHECK_THROWS_AS(validate_channel(flat, 1e-9), DegenerateChannel);
}

TEST_CASE("truncated model bounds the magnitude of T") {
    const double lo = 0.8;
    const double hi = 1.4;
    const ChannelRealization ch = sample_truncated_gaussian(10, lo, hi, 404);
    const ChannelDiagnostics diag = validate_channel(ch, 1e-12);
    const double tmin = (lo * lo * lo) / (hi * hi * hi);
    const double tmax = (hi * hi * hi) / (lo * lo * lo);
    CHECK(diag.t_magnitude_range.first >= tmin - 1e-12);
    CHECK(diag.t_magnitude_range.second <= tmax + 1e-12);
}

TEST_SUITE_END();
