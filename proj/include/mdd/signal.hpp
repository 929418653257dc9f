#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mdd {

/// N samples x m channels of real values. The universal payload of the
/// toolkit. Immutable by convention: operations return new signals.
struct MultichannelSignal {
    Eigen::MatrixXd samples;   // N rows (time), m columns (channels)
    double sample_rate = 1.0;  // Hz, informational only

    Eigen::Index length() const { return samples.rows(); }
    Eigen::Index channels() const { return samples.cols(); }
};

// Throws DataError if the signal is empty or contains NaN/Inf.
void validate_signal(const MultichannelSignal& signal, const std::string& context);

// ---------------------------------------------------------------------------
// CSV I/O. One time index per row, one channel per column, optional single
// header row. Values are written with 17 significant digits so a round trip
// is lossless to well below 1e-12 relative error.
// ---------------------------------------------------------------------------

MultichannelSignal load_csv(const std::string& path, bool has_header = false);

// Atomic: writes to a temporary file and renames on success.
void save_csv(const MultichannelSignal& signal, const std::string& path);

// ---------------------------------------------------------------------------
// Synthetic test signals (Donoho-Johnstone waveforms), sampled at t = i/n for
// i = 1..n and normalized to unit sample standard deviation.
// ---------------------------------------------------------------------------

enum class TestKind { Blocks, Bumps, Doppler, Heavisine };

TestKind parse_test_kind(const std::string& name);

MultichannelSignal generate_test_signal(TestKind kind, int n);

// Quadrivariate benchmark signal: channels are blocks, bumps, doppler,
// heavisine in that order.
MultichannelSignal make_quadrivariate(int n);

// ---------------------------------------------------------------------------
// Noise injection and SNR metrics.
// ---------------------------------------------------------------------------

struct NoiseSpec {
    std::vector<double> per_channel_snr_db;  // exactly m entries
    std::uint64_t seed = 0;
    // Optional m x m noise correlation matrix (symmetric, unit diagonal,
    // positive semi-definite). Absent means independent channels.
    std::optional<Eigen::MatrixXd> cross_channel_correlation;
};

// clean + seeded Gaussian noise, each channel rescaled so the realized
// per-channel SNR equals the target exactly. When a correlation matrix is
// supplied, noise rows are drawn with that cross-channel correlation via a
// triangular factorization before the per-channel rescaling.
MultichannelSignal add_noise(const MultichannelSignal& clean, const NoiseSpec& spec);

struct SnrReport {
    std::vector<double> per_channel_db;  // +infinity marks an exact match
    double average_db = 0.0;
};

// Per-channel 10*log10(sum s^2 / sum (s - s_hat)^2) and the mean across
// channels. An exact match yields +infinity.
SnrReport snr(const MultichannelSignal& clean, const MultichannelSignal& estimate);

// Per-channel targets spaced in 1 dB steps centered on average_db, the
// unbalanced-noise pattern: for m=3 and average 10 this is {9, 10, 11}.
std::vector<double> unbalanced_targets(int m, double average_db);

} // namespace mdd
