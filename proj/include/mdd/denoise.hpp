#pragma once

#include "mdd/dfa.hpp"
#include "mdd/mvmd.hpp"
#include "mdd/signal.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace mdd {

enum class DfaVariant { Mahalanobis, Euclidean };

DfaVariant parse_dfa_variant(const std::string& name);
std::string to_string(DfaVariant variant);

/// Per-mode scaling exponents, consecutive-exponent slopes, and the cut
/// index separating signal-dominant from noise-dominant modes.
struct ModeScores {
    std::vector<double> alphas;  // K entries
    std::vector<double> betas;   // K-1 entries, |alpha[k+1] - alpha[k]|
    int k1 = 1;                  // 1-based, smallest index attaining max(betas)
};

struct DenoiseReport {
    ModeScores mode_scores;
    std::vector<int> retained_components;  // PCA components kept per retained mode
    std::optional<SnrReport> input_snr;    // present iff a clean reference was given
    std::optional<SnrReport> output_snr;
    nlohmann::json config_echo;
    std::vector<FluctuationCurve> curves;  // per-mode fluctuation curves (for plots)
};

// Slopes and first-maximum cut index from a given exponent sequence.
ModeScores scores_from_alphas(std::vector<double> alphas);

// Scaling exponents per mode via MDFA (or the Euclidean ablation), slopes
// per consecutive pair, and the first-maximum cut index.
ModeScores score_modes(const BlimfSet& blimfs, const std::vector<int>& scales,
                       DfaVariant variant,
                       std::vector<FluctuationCurve>* curves_out = nullptr);

struct DenoiseResult {
    MultichannelSignal estimate;
    DenoiseReport report;
};

// Full pipeline: MVMD decompose, score modes, discard modes past the cut,
// PCA-clean the retained modes, and sum.
DenoiseResult denoise(const MultichannelSignal& noisy, const MvmdConfig& mvmd_config,
                      const std::vector<int>& scales, DfaVariant variant,
                      const MultichannelSignal* clean = nullptr);

struct BenchmarkRow {
    double target_snr_db = 0.0;
    double mean_input_db = 0.0;
    double mean_output_db = 0.0;
    std::vector<DenoiseReport> reports;  // one per seed
};

// Noise-inject / denoise / score sweep over an SNR grid and seed list.
// Unbalanced runs spread the per-channel targets in 1 dB steps around the
// grid average.
std::vector<BenchmarkRow> benchmark(const MultichannelSignal& clean,
                                    const std::vector<double>& snr_grid, bool balanced,
                                    const std::vector<std::uint64_t>& seeds,
                                    DfaVariant variant, const MvmdConfig& mvmd_config,
                                    const std::vector<int>& scales);

// Stable JSON schema: alphas, betas, k1, retained_components, input_snr_db,
// output_snr_db, config. Infinite SNR values serialize as the string "inf".
nlohmann::json report_to_json(const DenoiseReport& report);

} // namespace mdd
