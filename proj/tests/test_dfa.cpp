#include "mdd/dfa.hpp"
#include "mdd/errors.hpp"
#include "mdd/signal.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace mdd;

namespace {

MultichannelSignal random_signal(int n, int m, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> gauss;
    MultichannelSignal sig;
    sig.samples.resize(n, m);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j)
            sig.samples(i, j) = gauss(rng);
    return sig;
}

MultichannelSignal brownian_signal(int n, int m, unsigned seed) {
    MultichannelSignal noise = random_signal(n, m, seed);
    MultichannelSignal out = noise;
    for (int i = 1; i < n; ++i)
        out.samples.row(i) += out.samples.row(i - 1);
    return out;
}

// ---------------------------------------------------------------------------
// Brute-force oracles, loop-based and independent of the library path.
// ---------------------------------------------------------------------------

Eigen::MatrixXd profile_oracle(const Eigen::MatrixXd& x) {
    const int n = static_cast<int>(x.rows());
    Eigen::MatrixXd y(n, x.cols());
    for (int c = 0; c < x.cols(); ++c) {
        double mean = 0.0;
        for (int i = 0; i < n; ++i)
            mean += x(i, c);
        mean /= n;
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
            acc += x(i, c) - mean;
            y(i, c) = acc / n;
        }
    }
    return y;
}

// quadratic fit residuals on one window via explicit normal equations
Eigen::VectorXd quad_residual_oracle(const Eigen::VectorXd& y) {
    const int s = static_cast<int>(y.size());
    Eigen::Matrix3d ata = Eigen::Matrix3d::Zero();
    Eigen::Vector3d atb = Eigen::Vector3d::Zero();
    for (int i = 1; i <= s; ++i) {
        Eigen::Vector3d row(1.0, i, static_cast<double>(i) * i);
        ata += row * row.transpose();
        atb += row * y(i - 1);
    }
    Eigen::Vector3d coef = ata.inverse() * atb;
    Eigen::VectorXd resid(s);
    for (int i = 1; i <= s; ++i)
        resid(i - 1) = y(i - 1) - (coef(0) + coef(1) * i + coef(2) * i * i);
    return resid;
}

// Euclidean fluctuation by direct summation over both-ends segments,
// treating `series` as the profile.
double fluctuation_oracle(const Eigen::MatrixXd& series, int s) {
    const int n = static_cast<int>(series.rows());
    const int ns = n / s;
    double total = 0.0;
    auto add_segment = [&](int begin) {
        for (int c = 0; c < series.cols(); ++c) {
            Eigen::VectorXd window = series.block(begin, c, s, 1);
            total += quad_residual_oracle(window).squaredNorm();
        }
    };
    for (int v = 0; v < ns; ++v)
        add_segment(v * s);
    for (int v = 0; v < ns; ++v)
        add_segment(n - (v + 1) * s);
    return std::sqrt(total / (2.0 * ns * s));
}

// Mahalanobis fluctuation with an explicitly inverted covariance
double mahalanobis_fluctuation_oracle(const Eigen::MatrixXd& series, int s,
                                      const Eigen::MatrixXd& sigma) {
    const int n = static_cast<int>(series.rows());
    const int m = static_cast<int>(series.cols());
    const int ns = n / s;
    Eigen::MatrixXd inv = sigma.inverse();
    double total = 0.0;
    auto add_segment = [&](int begin) {
        Eigen::MatrixXd resid(s, m);
        for (int c = 0; c < m; ++c)
            resid.col(c) = quad_residual_oracle(series.block(begin, c, s, 1));
        for (int i = 0; i < s; ++i)
            total += resid.row(i) * inv * resid.row(i).transpose();
    };
    for (int v = 0; v < ns; ++v)
        add_segment(v * s);
    for (int v = 0; v < ns; ++v)
        add_segment(n - (v + 1) * s);
    return std::sqrt(total / (2.0 * ns * s));
}

} // namespace

TEST_CASE("profile of a constant channel is zero") {
    MultichannelSignal sig;
    sig.samples = Eigen::MatrixXd::Constant(16, 2, 3.7);
    CHECK(profile(sig).values.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("profile of the alternating series") {
    MultichannelSignal sig;
    sig.samples.resize(4, 1);
    sig.samples << 1, -1, 1, -1;
    Profile prof = profile(sig);
    Eigen::VectorXd expected(4);
    expected << 0.25, 0.0, 0.25, 0.0;
    CHECK((prof.values.col(0) - expected).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("profile matches the loop oracle") {
    MultichannelSignal sig = random_signal(301, 3, 9);
    Profile prof = profile(sig);
    CHECK((prof.values - profile_oracle(sig.samples)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("segment tiles from both ends") {
    SegmentLayout l1 = segment(16, 4);
    REQUIRE(l1.segments.size() == 8);
    CHECK(l1.segments[0].begin == 0);
    CHECK(l1.segments[3].begin == 12);
    // end half covers the same sets in reverse order when s divides n
    for (int v = 0; v < 4; ++v)
        CHECK(l1.segments[4 + v].begin == l1.segments[3 - v].begin);

    SegmentLayout l2 = segment(18, 4);
    REQUIRE(l2.segments.size() == 8);
    CHECK(l2.segments[3].begin + l2.segments[3].length == 16);  // start tiling ends at 16
    int min_begin = 18;
    for (int v = 4; v < 8; ++v)
        min_begin = std::min(min_begin, l2.segments[v].begin);
    CHECK(min_begin == 2);  // end tiling starts at 1-based index 3

    SegmentLayout l3 = segment(16, 5);  // overlap in the middle? hm
    CHECK(l3.segments.size() == 6);
    for (const SegmentRange& r : l3.segments) {
        CHECK(r.begin >= 0);
        CHECK(r.begin + r.length <= 16);
        CHECK(r.length == 5);
    }

    CHECK_THROWS_AS(segment(16, 3), DataError);
    CHECK_THROWS_AS(segment(16, 17), DataError);
    CHECK(segment(100, 26).segments.size() == 6);
}

TEST_CASE("detrend removes exact quadratics") {
    Profile prof;
    prof.values.resize(32, 2);
    for (int i = 1; i <= 32; ++i) {
        prof.values(i - 1, 0) = 0.5 * i * i - 3.0 * i + 2.0;
        prof.values(i - 1, 1) = -1.25 * i * i + 0.75 * i;
    }
    for (const Eigen::MatrixXd& resid : detrend(prof, segment(32, 8), 2))
        CHECK(resid.cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("detrend matches the per-window oracle and is channel independent") {
    MultichannelSignal sig = random_signal(64, 3, 15);
    Profile prof{sig.samples};
    SegmentLayout layout = segment(64, 8);
    std::vector<Eigen::MatrixXd> resid = detrend(prof, layout, 2);
    REQUIRE(resid.size() == layout.segments.size());
    for (std::size_t v = 0; v < resid.size(); ++v)
        for (int c = 0; c < 3; ++c) {
            Eigen::VectorXd window =
                prof.values.block(layout.segments[v].begin, c, 8, 1);
            CHECK((resid[v].col(c) - quad_residual_oracle(window)).cwiseAbs()
                      .maxCoeff() < 1e-10);
        }

    // shuffling channels shuffles residuals identically
    Profile shuffled;
    shuffled.values.resize(64, 3);
    shuffled.values.col(0) = prof.values.col(2);
    shuffled.values.col(1) = prof.values.col(0);
    shuffled.values.col(2) = prof.values.col(1);
    std::vector<Eigen::MatrixXd> resid2 = detrend(shuffled, layout, 2);
    for (std::size_t v = 0; v < resid.size(); ++v) {
        CHECK((resid2[v].col(0) - resid[v].col(2)).cwiseAbs().maxCoeff() == 0.0);
        CHECK((resid2[v].col(1) - resid[v].col(0)).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("fluctuation of a pure quadratic series is zero") {
    MultichannelSignal sig;
    sig.samples.resize(64, 1);
    for (int i = 1; i <= 64; ++i)
        sig.samples(i - 1, 0) = 0.1 * i * i + i - 4.0;
    CHECK(fluctuation_univariate(sig, 8, 2) < 1e-10);
    CHECK(fluctuation_univariate(sig, 8) > 1e-6);  // the linear default leaves curvature

    MultichannelSignal multi;
    multi.samples.resize(64, 3);
    for (int i = 1; i <= 64; ++i)
        for (int c = 0; c < 3; ++c)
            multi.samples(i - 1, c) = (c + 1) * i * i - c * i;
    CHECK(fluctuation_euclidean(multi, 8, 2) < 1e-9);
    CHECK(fluctuation_mahalanobis(multi, 8, 2).f == 0.0);
}

TEST_CASE("fluctuation_univariate matches the direct-summation oracle") {
    MultichannelSignal sig = random_signal(200, 1, 19);
    for (int s : {4, 7, 16})
        CHECK(fluctuation_univariate(sig, s, 2) ==
              doctest::Approx(fluctuation_oracle(sig.samples, s)).epsilon(1e-10));
    MultichannelSignal multi = random_signal(64, 2, 20);
    CHECK_THROWS_AS(fluctuation_univariate(multi, 8), DataError);
}

TEST_CASE("fluctuation_euclidean collapses to univariate and scales with duplication") {
    MultichannelSignal sig = random_signal(128, 1, 21);
    CHECK(fluctuation_euclidean(sig, 8) == fluctuation_univariate(sig, 8));
    CHECK(fluctuation_euclidean(sig, 8, 2) == fluctuation_univariate(sig, 8, 2));

    // duplicating the channel k times multiplies F^2 by k
    double f1 = fluctuation_euclidean(sig, 8);
    for (int copies : {2, 3}) {
        MultichannelSignal dup;
        dup.samples.resize(128, copies);
        for (int c = 0; c < copies; ++c)
            dup.samples.col(c) = sig.samples.col(0);
        double fk = fluctuation_euclidean(dup, 8);
        CHECK(fk * fk == doctest::Approx(copies * f1 * f1).epsilon(1e-10));
    }

    MultichannelSignal biv = random_signal(150, 2, 22);
    for (int s : {4, 9, 16})
        CHECK(fluctuation_euclidean(biv, s, 2) ==
              doctest::Approx(fluctuation_oracle(biv.samples, s)).epsilon(1e-10));
}

TEST_CASE("mahalanobis fluctuation: identity and diagonal reductions") {
    MultichannelSignal sig = random_signal(160, 3, 23);
    CovarianceMatrix identity;
    identity.entries = Eigen::MatrixXd::Identity(3, 3);
    identity.condition_estimate = 1.0;
    for (int s : {4, 8, 16}) {
        double euclid = fluctuation_euclidean(sig, s, 2);
        double mahal = fluctuation_mahalanobis(sig, s, 2, identity).f;
        CHECK(std::abs(mahal - euclid) < 1e-12 * std::max(1.0, euclid));
    }

    // diagonal override equals Euclidean fluctuation of sigma-normalized series
    Eigen::VectorXd variances(3);
    variances << 0.5, 2.0, 4.5;
    CovarianceMatrix diag;
    diag.entries = variances.asDiagonal();
    diag.condition_estimate = 9.0;
    MultichannelSignal normalized = sig;
    for (int c = 0; c < 3; ++c)
        normalized.samples.col(c) /= std::sqrt(variances(c));
    for (int s : {5, 10}) {
        double lhs = fluctuation_mahalanobis(sig, s, 2, diag).f;
        CHECK(lhs == doctest::Approx(fluctuation_euclidean(normalized, s, 2))
                         .epsilon(1e-10));
    }
}

TEST_CASE("mahalanobis fluctuation default sigma matches the explicit-inverse oracle") {
    MultichannelSignal sig = random_signal(240, 2, 25);
    // correlate the channels
    sig.samples.col(1) = 0.7 * sig.samples.col(0) + 0.5 * sig.samples.col(1);
    for (int s : {4, 8, 12}) {
        MahalanobisFluctuation got = fluctuation_mahalanobis(sig, s, 2);
        double expected =
            mahalanobis_fluctuation_oracle(sig.samples, s, got.sigma_used.entries);
        CHECK(got.f == doctest::Approx(expected).epsilon(1e-8));
    }
}

TEST_CASE("scaling_exponent on exact power laws") {
    std::vector<std::pair<int, double>> unit;
    std::vector<std::pair<int, double>> scaled;
    for (int s = 4; s <= 16; ++s) {
        unit.emplace_back(s, static_cast<double>(s));
        scaled.emplace_back(s, 3.0 * std::sqrt(static_cast<double>(s)));
    }
    ScalingFit one = scaling_exponent(unit);
    CHECK(one.alpha == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(one.residual < 1e-12);
    ScalingFit half = scaling_exponent(scaled);
    CHECK(half.alpha == doctest::Approx(0.5).epsilon(1e-12));

    std::vector<std::pair<int, double>> zeros{{4, 0.0}, {8, 0.0}};
    ScalingFit degenerate = scaling_exponent(zeros);
    CHECK(degenerate.alpha == 0.0);
    CHECK(degenerate.degenerate);

    std::vector<std::pair<int, double>> lonely{{4, 1.0}, {8, 0.0}};
    CHECK_THROWS_AS(scaling_exponent(lonely), DataError);
    CHECK_THROWS_AS(scaling_exponent({}), DataError);
}

TEST_CASE("white noise scales near 0.5, brownian near 1.5") {
    const std::vector<int> scales = default_scales();
    double uni_sum = 0.0, mdfa_sum = 0.0, brown_sum = 0.0, corr_sum = 0.0;
    const int seeds = 20;
    for (int seed = 0; seed < seeds; ++seed) {
        uni_sum += dfa_univariate(random_signal(2048, 1, 100 + seed), scales).alpha;
        mdfa_sum += mdfa(random_signal(2048, 3, 200 + seed), scales).alpha;
        brown_sum += mdfa(brownian_signal(2048, 3, 300 + seed), scales).alpha;

        // strong cross-channel correlation, no temporal correlation
        MultichannelSignal base = random_signal(2048, 3, 400 + seed);
        MultichannelSignal corr = base;
        Eigen::MatrixXd mix(3, 3);
        mix << 1.0, 0.9, 0.9, 0.9, 1.0, 0.9, 0.9, 0.9, 1.0;
        Eigen::LLT<Eigen::MatrixXd> llt(mix);
        corr.samples = base.samples * Eigen::MatrixXd(llt.matrixL()).transpose();
        corr_sum += mdfa(corr, scales).alpha;
    }
    CHECK(uni_sum / seeds > 0.4);
    CHECK(uni_sum / seeds < 0.6);
    CHECK(mdfa_sum / seeds > 0.4);
    CHECK(mdfa_sum / seeds < 0.6);
    CHECK(brown_sum / seeds > 1.3);
    CHECK(brown_sum / seeds < 1.7);
    CHECK(corr_sum / seeds > 0.4);
    CHECK(corr_sum / seeds < 0.6);
}

TEST_CASE("single-channel mdfa equals univariate dfa") {
    MultichannelSignal sig = brownian_signal(1024, 1, 31);
    double a1 = mdfa(sig, default_scales()).alpha;
    double a2 = dfa_univariate(sig, default_scales()).alpha;
    CHECK(a1 == doctest::Approx(a2).epsilon(1e-9));
}

TEST_CASE("alpha is invariant under positive rescaling of the input") {
    MultichannelSignal sig = brownian_signal(1024, 2, 33);
    double base = mdfa(sig, default_scales()).alpha;
    MultichannelSignal scaled = sig;
    scaled.samples *= 1234.5;
    CHECK(mdfa(scaled, default_scales()).alpha == doctest::Approx(base).epsilon(1e-9));
    double base_e = mdfa_euclidean(sig, default_scales()).alpha;
    CHECK(mdfa_euclidean(scaled, default_scales()).alpha ==
          doctest::Approx(base_e).epsilon(1e-9));
}

TEST_CASE("fluctuation grows with scale for brownian surrogates on average") {
    const std::vector<int> scales = default_scales();
    Eigen::VectorXd mean_f = Eigen::VectorXd::Zero(static_cast<int>(scales.size()));
    const int seeds = 20;
    for (int seed = 0; seed < seeds; ++seed) {
        FluctuationCurve curve = mdfa(brownian_signal(1024, 2, 500 + seed), scales);
        for (std::size_t i = 0; i < curve.f_values.size(); ++i)
            mean_f(static_cast<int>(i)) += curve.f_values[i] / seeds;
    }
    for (int i = 0; i + 1 < mean_f.size(); ++i)
        CHECK(mean_f(i + 1) >= mean_f(i));
}

TEST_CASE("mdfa rejects invalid scale lists") {
    MultichannelSignal sig = random_signal(128, 2, 41);
    CHECK_THROWS_AS(mdfa(sig, {}), DataError);
    CHECK_THROWS_AS(mdfa(sig, {4, 4}), DataError);
    CHECK_THROWS_AS(mdfa(sig, {4, 64}), DataError);
    CHECK_THROWS_AS(mdfa(sig, {3, 8}), DataError);
}

TEST_CASE("mdfa of an all-zero signal is degenerate, never NaN") {
    MultichannelSignal zero;
    zero.samples = Eigen::MatrixXd::Zero(128, 2);
    FluctuationCurve curve = mdfa(zero, default_scales());
    CHECK(curve.degenerate_fit);
    CHECK(curve.alpha == 0.0);
    for (double f : curve.f_values)
        CHECK(f == 0.0);
}
