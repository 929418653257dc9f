#include "mdd/signal.hpp"
#include "mdd/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

namespace mdd {

void validate_signal(const MultichannelSignal& signal, const std::string& context) {
    if (signal.samples.rows() < 1 || signal.samples.cols() < 1)
        throw DataError(context + ": signal must have at least 1 sample and 1 channel");
    if (!signal.samples.allFinite())
        throw DataError(context + ": signal contains non-finite values");
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

MultichannelSignal load_csv(const std::string& path, bool has_header) {
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open file: " + path);

    std::vector<std::vector<double>> rows;
    std::string line;
    long line_no = 0;
    long data_row = 0;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (has_header && line_no == 1)
            continue;
        // tolerate a trailing \r from CRLF files and skip blank lines
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        ++data_row;
        std::vector<double> row;
        std::size_t start = 0;
        std::size_t col = 0;
        while (true) {
            ++col;
            std::size_t comma = line.find(',', start);
            std::string cell = line.substr(start, comma == std::string::npos
                                                      ? std::string::npos
                                                      : comma - start);
            const char* begin = cell.c_str();
            char* end = nullptr;
            double value = std::strtod(begin, &end);
            // allow surrounding whitespace only
            while (end && *end == ' ') ++end;
            if (end == begin || (end && *end != '\0'))
                throw DataError("non-numeric cell at row " + std::to_string(data_row) +
                                ", column " + std::to_string(col) + ": '" + cell + "'");
            row.push_back(value);
            if (comma == std::string::npos)
                break;
            start = comma + 1;
        }
        if (width == 0)
            width = row.size();
        else if (row.size() != width)
            throw DataError("ragged row at row " + std::to_string(data_row) + ": expected " +
                            std::to_string(width) + " columns, got " +
                            std::to_string(row.size()));
        rows.push_back(std::move(row));
    }
    if (rows.empty())
        throw DataError("no data rows in file: " + path);

    MultichannelSignal signal;
    signal.samples.resize(static_cast<Eigen::Index>(rows.size()),
                          static_cast<Eigen::Index>(width));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < width; ++j)
            signal.samples(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                rows[i][j];
    validate_signal(signal, "load_csv(" + path + ")");
    return signal;
}

void save_csv(const MultichannelSignal& signal, const std::string& path) {
    validate_signal(signal, "save_csv");
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out)
            throw DataError("cannot open file for writing: " + tmp);
        char buf[64];
        for (Eigen::Index i = 0; i < signal.samples.rows(); ++i) {
            for (Eigen::Index j = 0; j < signal.samples.cols(); ++j) {
                std::snprintf(buf, sizeof buf, "%.17g", signal.samples(i, j));
                if (j) out << ',';
                out << buf;
            }
            out << '\n';
        }
        if (!out)
            throw DataError("write failure: " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec)
        throw DataError("cannot rename " + tmp + " to " + path + ": " + ec.message());
}

// ---------------------------------------------------------------------------
// Donoho-Johnstone generators
// ---------------------------------------------------------------------------

namespace {

constexpr double kJumpTimes[11] = {0.10, 0.13, 0.15, 0.23, 0.25, 0.40,
                                   0.44, 0.65, 0.76, 0.78, 0.81};
constexpr double kBlocksHeights[11] = {4.0, -5.0, 3.0, -4.0, 5.0, -4.2,
                                       2.1, 4.3, -3.1, 2.1, -4.2};
constexpr double kBumpsHeights[11] = {4.0, 5.0, 3.0, 4.0, 5.0, 4.2,
                                      2.1, 4.3, 3.1, 5.1, 4.2};
constexpr double kBumpsWidths[11] = {0.005, 0.005, 0.006, 0.01,  0.01, 0.03,
                                     0.01,  0.01,  0.005, 0.008, 0.005};

double sign(double x) { return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0); }

double blocks_at(double t) {
    double v = 0.0;
    for (int j = 0; j < 11; ++j)
        v += kBlocksHeights[j] * (1.0 + sign(t - kJumpTimes[j])) / 2.0;
    return v;
}

double bumps_at(double t) {
    double v = 0.0;
    for (int j = 0; j < 11; ++j) {
        double u = (t - kJumpTimes[j]) / kBumpsWidths[j];
        v += kBumpsHeights[j] * std::pow(1.0 + std::abs(u), -4.0);
    }
    return v;
}

double doppler_at(double t) {
    return std::sqrt(t * (1.0 - t)) * std::sin(2.0 * M_PI * 1.05 / (t + 0.05));
}

double heavisine_at(double t) {
    return 4.0 * std::sin(4.0 * M_PI * t) - sign(t - 0.3) - sign(0.72 - t);
}

} // namespace

TestKind parse_test_kind(const std::string& name) {
    if (name == "blocks") return TestKind::Blocks;
    if (name == "bumps") return TestKind::Bumps;
    if (name == "doppler") return TestKind::Doppler;
    if (name == "heavisine") return TestKind::Heavisine;
    throw DataError("unknown test-signal kind: " + name);
}

MultichannelSignal generate_test_signal(TestKind kind, int n) {
    if (n < 16)
        throw DataError("test-signal length must be >= 16, got " + std::to_string(n));
    Eigen::VectorXd v(n);
    for (int i = 1; i <= n; ++i) {
        double t = static_cast<double>(i) / n;
        double y = 0.0;
        switch (kind) {
            case TestKind::Blocks: y = blocks_at(t); break;
            case TestKind::Bumps: y = bumps_at(t); break;
            case TestKind::Doppler: y = doppler_at(t); break;
            case TestKind::Heavisine: y = heavisine_at(t); break;
        }
        v(i - 1) = y;
    }
    double mean = v.mean();
    double sd = std::sqrt((v.array() - mean).square().sum() / (n - 1));
    if (sd <= 0.0)
        throw NumericalError("degenerate test signal: zero standard deviation");
    MultichannelSignal out;
    out.samples = v / sd;
    return out;
}

MultichannelSignal make_quadrivariate(int n) {
    MultichannelSignal out;
    out.samples.resize(n, 4);
    out.samples.col(0) = generate_test_signal(TestKind::Blocks, n).samples.col(0);
    out.samples.col(1) = generate_test_signal(TestKind::Bumps, n).samples.col(0);
    out.samples.col(2) = generate_test_signal(TestKind::Doppler, n).samples.col(0);
    out.samples.col(3) = generate_test_signal(TestKind::Heavisine, n).samples.col(0);
    return out;
}

// ---------------------------------------------------------------------------
// Noise injection and SNR
// ---------------------------------------------------------------------------

std::vector<double> unbalanced_targets(int m, double average_db) {
    std::vector<double> targets(static_cast<std::size_t>(m));
    for (int c = 0; c < m; ++c)
        targets[static_cast<std::size_t>(c)] =
            average_db + (c - (m - 1) / 2.0);
    return targets;
}

MultichannelSignal add_noise(const MultichannelSignal& clean, const NoiseSpec& spec) {
    validate_signal(clean, "add_noise");
    const Eigen::Index n = clean.length();
    const Eigen::Index m = clean.channels();
    if (static_cast<Eigen::Index>(spec.per_channel_snr_db.size()) != m)
        throw DataError("add_noise: spec has " + std::to_string(spec.per_channel_snr_db.size()) +
                        " SNR targets for " + std::to_string(m) + " channels");

    Eigen::MatrixXd mix;  // correlation factor, noise row = mix * z
    if (spec.cross_channel_correlation) {
        const Eigen::MatrixXd& corr = *spec.cross_channel_correlation;
        if (corr.rows() != m || corr.cols() != m)
            throw DataError("add_noise: correlation matrix shape mismatch");
        if (!corr.isApprox(corr.transpose(), 1e-10))
            throw DataError("add_noise: correlation matrix not symmetric");
        for (Eigen::Index c = 0; c < m; ++c)
            if (std::abs(corr(c, c) - 1.0) > 1e-10)
                throw DataError("add_noise: correlation matrix diagonal must be 1");
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(corr);
        if (es.eigenvalues().minCoeff() < -1e-10)
            throw DataError("add_noise: correlation matrix not positive semi-definite");
        Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0);
        mix = es.eigenvectors() * lam.cwiseSqrt().asDiagonal();
    }

    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd noise(n, m);
    Eigen::VectorXd z(m);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index c = 0; c < m; ++c)
            z(c) = gauss(rng);
        if (mix.size())
            noise.row(i) = (mix * z).transpose();
        else
            noise.row(i) = z.transpose();
    }

    // Exact per-channel scaling: realized SNR equals the target exactly.
    MultichannelSignal out = clean;
    for (Eigen::Index c = 0; c < m; ++c) {
        double signal_energy = clean.samples.col(c).squaredNorm();
        if (signal_energy <= 0.0)
            throw DataError("add_noise: channel " + std::to_string(c + 1) +
                            " has zero energy, SNR undefined");
        double noise_energy = noise.col(c).squaredNorm();
        if (noise_energy <= 0.0)
            throw NumericalError("add_noise: degenerate zero noise realization");
        double target = spec.per_channel_snr_db[static_cast<std::size_t>(c)];
        double scale = std::sqrt(signal_energy / noise_energy *
                                 std::pow(10.0, -target / 10.0));
        out.samples.col(c) += scale * noise.col(c);
    }
    return out;
}

SnrReport snr(const MultichannelSignal& clean, const MultichannelSignal& estimate) {
    validate_signal(clean, "snr(clean)");
    validate_signal(estimate, "snr(estimate)");
    if (clean.samples.rows() != estimate.samples.rows() ||
        clean.samples.cols() != estimate.samples.cols())
        throw DataError("snr: shape mismatch");

    SnrReport report;
    const Eigen::Index m = clean.channels();
    report.per_channel_db.resize(static_cast<std::size_t>(m));
    double sum = 0.0;
    for (Eigen::Index c = 0; c < m; ++c) {
        double signal_energy = clean.samples.col(c).squaredNorm();
        if (signal_energy <= 0.0)
            throw DataError("snr: channel " + std::to_string(c + 1) + " has zero energy");
        double error_energy = (clean.samples.col(c) - estimate.samples.col(c)).squaredNorm();
        double db = error_energy == 0.0
                        ? std::numeric_limits<double>::infinity()
                        : 10.0 * std::log10(signal_energy / error_energy);
        report.per_channel_db[static_cast<std::size_t>(c)] = db;
        sum += db;
    }
    report.average_db = sum / static_cast<double>(m);
    return report;
}

} // namespace mdd
