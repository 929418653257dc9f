#include "mdd/mvmd.hpp"
#include "mdd/errors.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <random>

namespace mdd {

MvmdInit parse_mvmd_init(const std::string& name) {
    if (name == "uniform") return MvmdInit::Uniform;
    if (name == "random") return MvmdInit::Random;
    if (name == "zero") return MvmdInit::Zero;
    throw DataError("unknown MVMD init strategy: " + name);
}

namespace {

using Spectrum = Eigen::ArrayXcd;  // positive half-spectrum, bins 0..T/2

// Mirror extension to length 2N: first half reflected in front, second half
// reflected behind, as in the reference VMD boundary treatment.
Eigen::MatrixXd mirror_extend(const Eigen::MatrixXd& x) {
    const Eigen::Index n = x.rows();
    const Eigen::Index h1 = n / 2;
    const Eigen::Index h2 = n - h1;
    Eigen::MatrixXd ext(2 * n, x.cols());
    for (Eigen::Index i = 0; i < h1; ++i)
        ext.row(i) = x.row(h1 - 1 - i);
    ext.middleRows(h1, n) = x;
    for (Eigen::Index i = 0; i < h2; ++i)
        ext.row(h1 + n + i) = x.row(n - 1 - i);
    return ext;
}

std::vector<Spectrum> forward_half_spectra(const Eigen::MatrixXd& ext) {
    const int t = static_cast<int>(ext.rows());
    const int bins = t / 2 + 1;
    std::vector<Spectrum> spectra(static_cast<std::size_t>(ext.cols()));
    std::vector<double> in(static_cast<std::size_t>(t));
    std::vector<fftw_complex> out(static_cast<std::size_t>(bins));
    fftw_plan plan = fftw_plan_dft_r2c_1d(t, in.data(), out.data(), FFTW_ESTIMATE);
    for (Eigen::Index c = 0; c < ext.cols(); ++c) {
        for (int i = 0; i < t; ++i)
            in[static_cast<std::size_t>(i)] = ext(i, c);
        fftw_execute(plan);
        Spectrum spec(bins);
        for (int f = 0; f < bins; ++f)
            spec(f) = std::complex<double>(out[static_cast<std::size_t>(f)][0],
                                           out[static_cast<std::size_t>(f)][1]);
        spectra[static_cast<std::size_t>(c)] = std::move(spec);
    }
    fftw_destroy_plan(plan);
    return spectra;
}

Eigen::VectorXd inverse_real(const Spectrum& half, int t) {
    const int bins = t / 2 + 1;
    std::vector<fftw_complex> in(static_cast<std::size_t>(bins));
    std::vector<double> out(static_cast<std::size_t>(t));
    for (int f = 0; f < bins; ++f) {
        std::complex<double> v = half(f);
        if (f == 0 || f == t / 2)
            v = std::complex<double>(v.real(), 0.0);  // hermitian endpoints
        in[static_cast<std::size_t>(f)][0] = v.real();
        in[static_cast<std::size_t>(f)][1] = v.imag();
    }
    fftw_plan plan = fftw_plan_dft_c2r_1d(t, in.data(), out.data(), FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
    Eigen::VectorXd y(t);
    for (int i = 0; i < t; ++i)
        y(i) = out[static_cast<std::size_t>(i)] / static_cast<double>(t);
    return y;
}

} // namespace

BlimfSet mvmd_decompose(const MultichannelSignal& signal, const MvmdConfig& config) {
    validate_signal(signal, "mvmd_decompose");
    if (config.k < 1)
        throw DataError("mvmd_decompose: mode count must be >= 1");
    if (config.bandwidth_penalty <= 0.0 || config.tolerance <= 0.0)
        throw DataError("mvmd_decompose: bandwidth penalty and tolerance must be positive");
    const int n = static_cast<int>(signal.length());
    const int m = static_cast<int>(signal.channels());
    const int k = config.k;
    if (n < 8 * k)
        throw DataError("mvmd_decompose: need N >= 8*K (N = " + std::to_string(n) +
                        ", K = " + std::to_string(k) + ")");

    const Eigen::Index h1 = n / 2;
    const int t = 2 * n;
    const int bins = t / 2 + 1;

    Eigen::MatrixXd ext = mirror_extend(signal.samples);
    std::vector<Spectrum> x_hat = forward_half_spectra(ext);

    Eigen::ArrayXd freq(bins);
    for (int f = 0; f < bins; ++f)
        freq(f) = static_cast<double>(f) / static_cast<double>(t);

    // mode spectra u_hat[k][c], running sum over modes per channel
    std::vector<std::vector<Spectrum>> u_hat(
        static_cast<std::size_t>(k),
        std::vector<Spectrum>(static_cast<std::size_t>(m), Spectrum::Zero(bins)));
    std::vector<Spectrum> mode_sum(static_cast<std::size_t>(m), Spectrum::Zero(bins));
    std::vector<Spectrum> lambda_hat(static_cast<std::size_t>(m), Spectrum::Zero(bins));

    std::vector<double> omega(static_cast<std::size_t>(k), 0.0);
    switch (config.init) {
        case MvmdInit::Uniform:
            for (int j = 0; j < k; ++j)
                omega[static_cast<std::size_t>(j)] =
                    0.5 * static_cast<double>(j) / static_cast<double>(k);
            break;
        case MvmdInit::Random: {
            std::mt19937_64 rng(config.init_seed);
            std::uniform_real_distribution<double> uni(0.0, 0.5);
            for (int j = 0; j < k; ++j)
                omega[static_cast<std::size_t>(j)] = uni(rng);
            std::sort(omega.begin(), omega.end());
            break;
        }
        case MvmdInit::Zero:
            break;
    }

    const double alpha2 = 2.0 * config.bandwidth_penalty;
    BlimfSet result;
    result.converged = false;
    int iter = 0;
    for (; iter < config.max_iterations; ++iter) {
        double change = 0.0;
        for (int j = 0; j < k; ++j) {
            auto& mode = u_hat[static_cast<std::size_t>(j)];
            Eigen::ArrayXd gain =
                1.0 / (1.0 + alpha2 * (freq - omega[static_cast<std::size_t>(j)]).square());
            double power = 0.0;
            double weighted = 0.0;
            for (int c = 0; c < m; ++c) {
                Spectrum& uc = mode[static_cast<std::size_t>(c)];
                Spectrum updated =
                    (x_hat[static_cast<std::size_t>(c)] -
                     (mode_sum[static_cast<std::size_t>(c)] - uc) +
                     lambda_hat[static_cast<std::size_t>(c)] / 2.0) *
                    gain;
                double prev_norm = uc.abs2().sum();
                change += (updated - uc).abs2().sum() / (prev_norm + 1e-30);
                mode_sum[static_cast<std::size_t>(c)] += updated - uc;
                uc = std::move(updated);
                Eigen::ArrayXd p = uc.abs2();
                power += p.sum();
                weighted += (freq * p).sum();
            }
            if (power > 0.0)
                omega[static_cast<std::size_t>(j)] = weighted / power;
        }
        if (config.dual_ascent_step > 0.0) {
            for (int c = 0; c < m; ++c)
                lambda_hat[static_cast<std::size_t>(c)] +=
                    config.dual_ascent_step *
                    (x_hat[static_cast<std::size_t>(c)] -
                     mode_sum[static_cast<std::size_t>(c)]);
        }
        if (change < config.tolerance) {
            result.converged = true;
            ++iter;
            break;
        }
    }
    result.iterations_used = iter;

    // canonical order: ascending center frequency
    std::vector<int> order(static_cast<std::size_t>(k));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return omega[static_cast<std::size_t>(a)] < omega[static_cast<std::size_t>(b)];
    });

    result.modes.reserve(static_cast<std::size_t>(k));
    result.center_frequencies.reserve(static_cast<std::size_t>(k));
    for (int j : order) {
        Eigen::MatrixXd mode(n, m);
        for (int c = 0; c < m; ++c) {
            Eigen::VectorXd full =
                inverse_real(u_hat[static_cast<std::size_t>(j)][static_cast<std::size_t>(c)], t);
            mode.col(c) = full.segment(h1, n);
        }
        result.modes.push_back(std::move(mode));
        result.center_frequencies.push_back(omega[static_cast<std::size_t>(j)]);
    }
    return result;
}

MultichannelSignal reconstruct_from_modes(const BlimfSet& blimfs, int upto) {
    const int k = static_cast<int>(blimfs.modes.size());
    if (upto < 1 || upto > k)
        throw DataError("reconstruct_from_modes: upto = " + std::to_string(upto) +
                        " outside [1, " + std::to_string(k) + "]");
    MultichannelSignal out;
    out.samples = blimfs.modes[0];
    for (int j = 1; j < upto; ++j)
        out.samples += blimfs.modes[static_cast<std::size_t>(j)];
    return out;
}

} // namespace mdd
