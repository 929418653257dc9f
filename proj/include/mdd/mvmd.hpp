#pragma once

#include "mdd/signal.hpp"

#include <cstdint>
#include <vector>

namespace mdd {

enum class MvmdInit { Uniform, Random, Zero };

MvmdInit parse_mvmd_init(const std::string& name);

struct MvmdConfig {
    int k = 10;                       // mode count
    double bandwidth_penalty = 2000;  // quadratic penalty weight on mode bandwidth
    int max_iterations = 500;
    double tolerance = 1e-7;          // summed relative spectral update norm
    MvmdInit init = MvmdInit::Uniform;
    double dual_ascent_step = 0.0;    // 0 disables exact-reconstruction enforcement
    std::uint64_t init_seed = 0;      // used by random init only
};

/// K multichannel band-limited modes plus their shared center frequencies
/// (cycles/sample, ascending on output).
struct BlimfSet {
    std::vector<Eigen::MatrixXd> modes;      // K entries, each N x m
    std::vector<double> center_frequencies;  // K entries in [0, 0.5]
    int iterations_used = 0;
    bool converged = false;
};

// Frequency-domain alternating minimization: per mode and channel a
// Wiener-style spectral update over the positive half-spectrum, center
// frequencies moved to the power-weighted mean frequency pooled across
// channels. The signal is mirror-extended to 2N before the transform and
// center-cropped after.
BlimfSet mvmd_decompose(const MultichannelSignal& signal, const MvmdConfig& config);

// Pointwise sum of modes 1..upto.
MultichannelSignal reconstruct_from_modes(const BlimfSet& blimfs, int upto);

} // namespace mdd
