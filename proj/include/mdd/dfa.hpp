#pragma once

#include "mdd/matrix_stats.hpp"
#include "mdd/signal.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace mdd {

/// Scaled cumulative sum of the mean-removed series, per channel.
struct Profile {
    Eigen::MatrixXd values;  // same N x m shape as the source signal
};

struct SegmentRange {
    int begin = 0;   // 0-based start index
    int length = 0;
};

/// 2*N_s windows of length s: N_s tiling from the start, N_s from the end.
struct SegmentLayout {
    int scale = 0;
    std::vector<SegmentRange> segments;
};

Profile profile(const MultichannelSignal& signal);

SegmentLayout segment(int n, int s);

// Per-segment detrending residuals y - y_tilde, one s x m matrix per segment.
std::vector<Eigen::MatrixXd> detrend(const Profile& prof, const SegmentLayout& layout,
                                     int order = 1);

// The fluctuation operations segment and detrend their input directly; the
// dfa/mdfa entry points below compute the profile first and feed it in.
// The detrending order defaults to 1 (local linear fit): at the default
// scale grid 4..16 a quadratic fit inflates the small-scale slope of white
// noise well past 0.5, biasing the fitted exponent.

double fluctuation_univariate(const MultichannelSignal& signal, int s, int order = 1);

double fluctuation_euclidean(const MultichannelSignal& signal, int s, int order = 1);

struct MahalanobisFluctuation {
    double f = 0.0;
    CovarianceMatrix sigma_used;
};

// Mahalanobis fluctuation at one scale. By default Sigma is estimated from
// the detrended residual vectors pooled over the 2*N_s segments at this
// scale; sigma_override substitutes a caller-supplied covariance (used both
// for the Euclidean/diagonal reductions and for cross-scale analysis, where
// a per-scale Sigma would normalize the fluctuation magnitude away).
MahalanobisFluctuation fluctuation_mahalanobis(
    const MultichannelSignal& signal, int s, int order = 1,
    const std::optional<CovarianceMatrix>& sigma_override = std::nullopt);

struct ScalingFit {
    double alpha = 0.0;
    double residual = 0.0;  // RMS of log-log fit errors
    bool degenerate = false;
};

// Least-squares slope of ln F against ln s. Points with F = 0 are excluded;
// an all-zero curve yields alpha = 0 with the degenerate flag set.
ScalingFit scaling_exponent(const std::vector<std::pair<int, double>>& curve_points);

struct FluctuationCurve {
    std::vector<int> scales;
    std::vector<double> f_values;
    double alpha = 0.0;
    double fit_residual = 0.0;
    bool degenerate_fit = false;
};

// Default scale grid s = 4..16 inclusive.
std::vector<int> default_scales();

// Full Mahalanobis MDFA: profile -> per-scale fluctuation -> exponent fit.
// Sigma is the covariance of detrended residuals pooled across the whole
// scale set, held fixed across scales so the fluctuation magnitude is not
// self-normalized out of the curve.
FluctuationCurve mdfa(const MultichannelSignal& signal, const std::vector<int>& scales,
                      int order = 1);

// Euclidean-norm multichannel DFA (the ablation baseline).
FluctuationCurve mdfa_euclidean(const MultichannelSignal& signal,
                                const std::vector<int>& scales, int order = 1);

// Classic univariate DFA; requires m = 1.
FluctuationCurve dfa_univariate(const MultichannelSignal& signal,
                                const std::vector<int>& scales, int order = 1);

} // namespace mdd
