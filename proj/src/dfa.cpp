#include "mdd/dfa.hpp"
#include "mdd/errors.hpp"

#include <cmath>

namespace mdd {

Profile profile(const MultichannelSignal& signal) {
    validate_signal(signal, "profile");
    const Eigen::Index n = signal.length();
    if (n < 2)
        throw DataError("profile: need at least 2 samples");
    Eigen::RowVectorXd mean = signal.samples.colwise().mean();
    Profile prof;
    prof.values.resize(n, signal.channels());
    Eigen::RowVectorXd running = Eigen::RowVectorXd::Zero(signal.channels());
    for (Eigen::Index i = 0; i < n; ++i) {
        running += signal.samples.row(i) - mean;
        prof.values.row(i) = running / static_cast<double>(n);
    }
    return prof;
}

SegmentLayout segment(int n, int s) {
    if (s < 4 || s > n)
        throw DataError("segment: scale " + std::to_string(s) + " outside [4, " +
                        std::to_string(n) + "] for n = " + std::to_string(n));
    const int ns = n / s;
    SegmentLayout layout;
    layout.scale = s;
    layout.segments.reserve(2 * static_cast<std::size_t>(ns));
    for (int v = 0; v < ns; ++v)
        layout.segments.push_back({v * s, s});
    for (int v = 0; v < ns; ++v)
        layout.segments.push_back({n - (v + 1) * s, s});
    return layout;
}

std::vector<Eigen::MatrixXd> detrend(const Profile& prof, const SegmentLayout& layout,
                                     int order) {
    const int n = static_cast<int>(prof.values.rows());
    const int s = layout.scale;
    // One hat matrix serves every segment of this scale.
    Eigen::MatrixXd resid_op =
        Eigen::MatrixXd::Identity(s, s) - polyfit_hat_matrix(s, order);
    std::vector<Eigen::MatrixXd> residuals;
    residuals.reserve(layout.segments.size());
    for (const SegmentRange& range : layout.segments) {
        if (range.begin < 0 || range.begin + range.length > n)
            throw DataError("detrend: layout inconsistent with profile length");
        residuals.push_back(resid_op * prof.values.middleRows(range.begin, range.length));
    }
    return residuals;
}

namespace {

// Residuals of the given series (treated as the profile) at one scale.
std::vector<Eigen::MatrixXd> residuals_at_scale(const Eigen::MatrixXd& values, int s,
                                                int order) {
    Profile prof{values};
    SegmentLayout layout = segment(static_cast<int>(values.rows()), s);
    return detrend(prof, layout, order);
}

double euclidean_root(const std::vector<Eigen::MatrixXd>& residuals, int s) {
    double total = 0.0;
    for (const Eigen::MatrixXd& seg : residuals)
        total += seg.squaredNorm();
    double count = static_cast<double>(residuals.size()) * static_cast<double>(s);
    return std::sqrt(total / count);
}

double whitened_root(const std::vector<Eigen::MatrixXd>& residuals, int s,
                     const Eigen::MatrixXd& cholesky_lower) {
    double total = 0.0;
    for (const Eigen::MatrixXd& seg : residuals) {
        Eigen::MatrixXd w = cholesky_lower.triangularView<Eigen::Lower>().solve(
            seg.transpose().eval());
        total += w.squaredNorm();
    }
    double count = static_cast<double>(residuals.size()) * static_cast<double>(s);
    return std::sqrt(total / count);
}

double pooled_mean_square_trace(const std::vector<std::vector<Eigen::MatrixXd>>& groups) {
    double sum = 0.0;
    double rows = 0.0;
    for (const auto& group : groups)
        for (const auto& seg : group) {
            sum += seg.squaredNorm();
            rows += static_cast<double>(seg.rows());
        }
    return rows > 0.0 ? sum / rows : 0.0;
}

CovarianceMatrix pooled_covariance(const std::vector<std::vector<Eigen::MatrixXd>>& groups,
                                   Eigen::Index m) {
    Eigen::Index total_rows = 0;
    for (const auto& group : groups)
        for (const auto& seg : group)
            total_rows += seg.rows();
    Eigen::MatrixXd pooled(total_rows, m);
    Eigen::Index at = 0;
    for (const auto& group : groups)
        for (const auto& seg : group) {
            pooled.middleRows(at, seg.rows()) = seg;
            at += seg.rows();
        }
    return covariance(pooled);
}

} // namespace

double fluctuation_univariate(const MultichannelSignal& signal, int s, int order) {
    if (signal.channels() != 1)
        throw DataError("fluctuation_univariate: expected single-channel input, got " +
                        std::to_string(signal.channels()) + " channels");
    return fluctuation_euclidean(signal, s, order);
}

double fluctuation_euclidean(const MultichannelSignal& signal, int s, int order) {
    validate_signal(signal, "fluctuation_euclidean");
    return euclidean_root(residuals_at_scale(signal.samples, s, order), s);
}

MahalanobisFluctuation fluctuation_mahalanobis(
    const MultichannelSignal& signal, int s, int order,
    const std::optional<CovarianceMatrix>& sigma_override) {
    validate_signal(signal, "fluctuation_mahalanobis");
    const Eigen::Index m = signal.channels();
    if (signal.length() < m + 2)
        throw DataError("fluctuation_mahalanobis: need N >= m + 2");
    std::vector<Eigen::MatrixXd> residuals = residuals_at_scale(signal.samples, s, order);

    MahalanobisFluctuation result;
    if (sigma_override) {
        result.sigma_used = *sigma_override;
    } else {
        std::vector<std::vector<Eigen::MatrixXd>> groups{residuals};
        if (pooled_mean_square_trace(groups) < 1e-14 * static_cast<double>(m)) {
            result.f = 0.0;
            result.sigma_used.entries = Eigen::MatrixXd::Identity(m, m);
            result.sigma_used.condition_estimate = 1.0;
            return result;
        }
        result.sigma_used = pooled_covariance(groups, m);
    }

    Eigen::LLT<Eigen::MatrixXd> llt(result.sigma_used.entries);
    if (llt.info() != Eigen::Success)
        throw NumericalError("fluctuation_mahalanobis: covariance not positive definite");
    result.f = whitened_root(residuals, s, llt.matrixL());
    return result;
}

ScalingFit scaling_exponent(const std::vector<std::pair<int, double>>& curve_points) {
    std::vector<std::pair<double, double>> logs;  // (ln s, ln F)
    bool any_points = false;
    for (const auto& [s, f] : curve_points) {
        any_points = true;
        if (f > 0.0)
            logs.emplace_back(std::log(static_cast<double>(s)), std::log(f));
    }
    ScalingFit fit;
    if (logs.empty()) {
        if (!any_points)
            throw DataError("scaling_exponent: no points");
        fit.alpha = 0.0;
        fit.degenerate = true;
        return fit;
    }
    if (logs.size() < 2)
        throw DataError("scaling_exponent: fewer than 2 usable points");

    double mx = 0.0, my = 0.0;
    for (const auto& [x, y] : logs) { mx += x; my += y; }
    mx /= static_cast<double>(logs.size());
    my /= static_cast<double>(logs.size());
    double sxx = 0.0, sxy = 0.0;
    for (const auto& [x, y] : logs) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if (sxx <= 0.0)
        throw DataError("scaling_exponent: degenerate scale set");
    fit.alpha = sxy / sxx;
    double intercept = my - fit.alpha * mx;
    double rss = 0.0;
    for (const auto& [x, y] : logs) {
        double e = y - (fit.alpha * x + intercept);
        rss += e * e;
    }
    fit.residual = std::sqrt(rss / static_cast<double>(logs.size()));
    return fit;
}

std::vector<int> default_scales() {
    std::vector<int> scales;
    for (int s = 4; s <= 16; ++s)
        scales.push_back(s);
    return scales;
}

namespace {

void check_scales(const MultichannelSignal& signal, const std::vector<int>& scales) {
    const int n = static_cast<int>(signal.length());
    if (scales.empty())
        throw DataError("dfa: empty scale list");
    for (std::size_t i = 0; i < scales.size(); ++i) {
        if (scales[i] < 4 || scales[i] > n / 4)
            throw DataError("dfa: scale " + std::to_string(scales[i]) +
                            " outside [4, " + std::to_string(n / 4) + "]");
        if (i > 0 && scales[i] <= scales[i - 1])
            throw DataError("dfa: scales must be strictly increasing");
    }
}

FluctuationCurve finish_curve(std::vector<int> scales, std::vector<double> f_values) {
    std::vector<std::pair<int, double>> points;
    points.reserve(scales.size());
    for (std::size_t i = 0; i < scales.size(); ++i)
        points.emplace_back(scales[i], f_values[i]);
    ScalingFit fit = scaling_exponent(points);
    FluctuationCurve curve;
    curve.scales = std::move(scales);
    curve.f_values = std::move(f_values);
    curve.alpha = fit.alpha;
    curve.fit_residual = fit.residual;
    curve.degenerate_fit = fit.degenerate;
    return curve;
}

} // namespace

FluctuationCurve mdfa(const MultichannelSignal& signal, const std::vector<int>& scales,
                      int order) {
    check_scales(signal, scales);
    const Eigen::Index m = signal.channels();
    if (signal.length() < m + 2)
        throw DataError("mdfa: need N >= m + 2");
    Profile prof = profile(signal);

    std::vector<std::vector<Eigen::MatrixXd>> per_scale;
    per_scale.reserve(scales.size());
    for (int s : scales)
        per_scale.push_back(residuals_at_scale(prof.values, s, order));

    std::vector<double> f_values(scales.size(), 0.0);
    // Sigma pooled across the scale set: a per-scale estimate would normalize
    // the very fluctuation magnitude the exponent fit needs.
    if (pooled_mean_square_trace(per_scale) >= 1e-14 * static_cast<double>(m)) {
        CovarianceMatrix sigma = pooled_covariance(per_scale, m);
        Eigen::LLT<Eigen::MatrixXd> llt(sigma.entries);
        if (llt.info() != Eigen::Success)
            throw NumericalError("mdfa: pooled residual covariance not positive definite");
        Eigen::MatrixXd lmat = llt.matrixL();
        for (std::size_t i = 0; i < scales.size(); ++i)
            f_values[i] = whitened_root(per_scale[i], scales[i], lmat);
    }
    return finish_curve(scales, std::move(f_values));
}

FluctuationCurve mdfa_euclidean(const MultichannelSignal& signal,
                                const std::vector<int>& scales, int order) {
    check_scales(signal, scales);
    Profile prof = profile(signal);
    std::vector<double> f_values;
    f_values.reserve(scales.size());
    for (int s : scales)
        f_values.push_back(euclidean_root(residuals_at_scale(prof.values, s, order), s));
    return finish_curve(scales, std::move(f_values));
}

FluctuationCurve dfa_univariate(const MultichannelSignal& signal,
                                const std::vector<int>& scales, int order) {
    if (signal.channels() != 1)
        throw DataError("dfa_univariate: expected single-channel input");
    return mdfa_euclidean(signal, scales, order);
}

} // namespace mdd
