// Command-line front end for the multivariate denoising toolkit.
//
// Subcommands: synth, decompose, dfa, denoise, benchmark.
// Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical failure.

#include "mdd/denoise.hpp"
#include "mdd/dfa.hpp"
#include "mdd/errors.hpp"
#include "mdd/mvmd.hpp"
#include "mdd/plot.hpp"
#include "mdd/signal.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <string>
#include <vector>

namespace {

using nlohmann::json;

std::vector<int> parse_scale_range(const std::string& spec) {
    std::size_t colon = spec.find(':');
    if (colon == std::string::npos)
        throw mdd::DataError("scale range must be 'a:b', got '" + spec + "'");
    int lo = std::stoi(spec.substr(0, colon));
    int hi = std::stoi(spec.substr(colon + 1));
    if (lo < 4 || hi < lo)
        throw mdd::DataError("invalid scale range '" + spec + "'");
    std::vector<int> scales;
    for (int s = lo; s <= hi; ++s)
        scales.push_back(s);
    return scales;
}

void write_json_atomic(const json& j, const std::string& path) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out)
            throw mdd::DataError("cannot open file for writing: " + tmp);
        out << j.dump(2) << '\n';
        if (!out)
            throw mdd::DataError("write failure: " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec)
        throw mdd::DataError("cannot rename " + tmp + ": " + ec.message());
}

// Flags shared by the commands that run MVMD.
struct MvmdFlags {
    int modes = 10;
    double penalty = 2000.0;
    int max_iterations = 500;
    double tolerance = 1e-7;
    double tau = 0.0;

    void attach(CLI::App* cmd) {
        cmd->add_option("--modes", modes, "MVMD mode count K")->check(CLI::PositiveNumber);
        cmd->add_option("--penalty", penalty, "MVMD bandwidth penalty")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--max-iterations", max_iterations, "MVMD iteration cap")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--tolerance", tolerance, "MVMD convergence tolerance")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--tau", tau, "dual ascent step (0 disables)");
    }

    mdd::MvmdConfig config() const {
        mdd::MvmdConfig cfg;
        cfg.k = modes;
        cfg.bandwidth_penalty = penalty;
        cfg.max_iterations = max_iterations;
        cfg.tolerance = tolerance;
        cfg.dual_ascent_step = tau;
        return cfg;
    }
};

int run(int argc, char** argv) {
    CLI::App app{"multivariate signal denoising via MVMD + Mahalanobis DFA"};
    app.require_subcommand(1);

    // ---- synth ----
    auto* synth = app.add_subcommand("synth", "generate benchmark inputs");
    std::string synth_kind = "quad";
    int synth_n = 4096;
    double synth_snr = 10.0;
    bool synth_unbalanced = false;
    std::uint64_t synth_seed = 0;
    std::string synth_out, synth_clean;
    synth->add_option("--kind", synth_kind,
                      "quad | blocks | bumps | doppler | heavisine");
    synth->add_option("--n", synth_n, "signal length")->check(CLI::PositiveNumber);
    synth->add_option("--snr", synth_snr, "average input SNR target, dB");
    synth->add_flag("--unbalanced", synth_unbalanced,
                    "spread per-channel SNR targets in 1 dB steps");
    synth->add_option("--seed", synth_seed, "noise seed");
    synth->add_option("--out", synth_out, "noisy output CSV")->required();
    synth->add_option("--clean", synth_clean, "clean output CSV");

    // ---- decompose ----
    auto* decompose = app.add_subcommand("decompose", "MVMD decomposition to CSV bundle");
    std::string dec_input, dec_prefix = "mode", dec_report;
    bool dec_header = false;
    MvmdFlags dec_mvmd;
    decompose->add_option("--input", dec_input, "input CSV")->required();
    decompose->add_flag("--header", dec_header, "input has a header row");
    decompose->add_option("--out-prefix", dec_prefix,
                          "output prefix; writes <prefix>_<k>.csv");
    decompose->add_option("--report", dec_report, "JSON with center frequencies");
    dec_mvmd.attach(decompose);

    // ---- dfa ----
    auto* dfa_cmd = app.add_subcommand("dfa", "scaling-exponent analysis");
    std::string dfa_input, dfa_variant = "mahalanobis", dfa_scales = "4:16", dfa_report;
    bool dfa_header = false;
    int dfa_order = 1;
    dfa_cmd->add_option("--input", dfa_input, "input CSV")->required();
    dfa_cmd->add_flag("--header", dfa_header, "input has a header row");
    dfa_cmd->add_option("--variant", dfa_variant,
                        "mahalanobis | euclidean | univariate");
    dfa_cmd->add_option("--scales", dfa_scales, "scale range a:b");
    dfa_cmd->add_option("--order", dfa_order, "detrending polynomial order")
        ->check(CLI::PositiveNumber);
    dfa_cmd->add_option("--report", dfa_report, "JSON output path");

    // ---- denoise ----
    auto* den = app.add_subcommand("denoise", "full denoising pipeline");
    std::string den_input, den_clean, den_out, den_report, den_plots;
    std::string den_variant = "mahalanobis", den_scales = "4:16";
    bool den_header = false;
    MvmdFlags den_mvmd;
    den->add_option("--input", den_input, "noisy input CSV")->required();
    den->add_flag("--header", den_header, "input has a header row");
    den->add_option("--clean", den_clean, "clean reference CSV (enables SNR reporting)");
    den->add_option("--scales", den_scales, "scale range a:b");
    den->add_option("--variant", den_variant, "mahalanobis | euclidean");
    den->add_option("--out", den_out, "denoised output CSV")->required();
    den->add_option("--report", den_report, "JSON report path");
    den->add_option("--plots", den_plots, "directory for SVG plots");
    den_mvmd.attach(den);

    // ---- benchmark ----
    auto* bench = app.add_subcommand("benchmark", "SNR sweep over seeds");
    std::string bench_kind = "quad", bench_report, bench_variant = "mahalanobis";
    std::string bench_scales = "4:16", bench_clean_csv;
    int bench_n = 4096, bench_seeds = 20;
    bool bench_unbalanced = false;
    std::vector<double> bench_grid = {-2.0, 2.0, 6.0, 10.0};
    MvmdFlags bench_mvmd;
    bench->add_option("--kind", bench_kind, "quad | blocks | bumps | doppler | heavisine");
    bench->add_option("--clean-csv", bench_clean_csv,
                      "use this CSV as the clean signal instead of --kind");
    bench->add_option("--n", bench_n, "signal length")->check(CLI::PositiveNumber);
    bench->add_option("--grid", bench_grid, "average input SNR grid, dB");
    bench->add_option("--seeds", bench_seeds, "number of noise realizations")
        ->check(CLI::PositiveNumber);
    bench->add_flag("--unbalanced", bench_unbalanced, "unbalanced per-channel targets");
    bench->add_option("--variant", bench_variant, "mahalanobis | euclidean");
    bench->add_option("--scales", bench_scales, "scale range a:b");
    bench->add_option("--report", bench_report, "JSON output path")->required();
    bench_mvmd.attach(bench);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (*synth) {
        mdd::MultichannelSignal clean =
            synth_kind == "quad"
                ? mdd::make_quadrivariate(synth_n)
                : mdd::generate_test_signal(mdd::parse_test_kind(synth_kind), synth_n);
        mdd::NoiseSpec spec;
        spec.seed = synth_seed;
        const int m = static_cast<int>(clean.channels());
        spec.per_channel_snr_db =
            synth_unbalanced ? mdd::unbalanced_targets(m, synth_snr)
                             : std::vector<double>(static_cast<std::size_t>(m), synth_snr);
        mdd::MultichannelSignal noisy = mdd::add_noise(clean, spec);
        mdd::save_csv(noisy, synth_out);
        if (!synth_clean.empty())
            mdd::save_csv(clean, synth_clean);
        std::cout << "wrote " << synth_out << " (" << clean.length() << "x" << m << ")\n";
        return 0;
    }

    if (*decompose) {
        mdd::MultichannelSignal signal = mdd::load_csv(dec_input, dec_header);
        mdd::BlimfSet blimfs = mdd::mvmd_decompose(signal, dec_mvmd.config());
        for (std::size_t j = 0; j < blimfs.modes.size(); ++j)
            mdd::save_csv({blimfs.modes[j], signal.sample_rate},
                          dec_prefix + "_" + std::to_string(j + 1) + ".csv");
        json j;
        j["center_frequencies"] = blimfs.center_frequencies;
        j["iterations_used"] = blimfs.iterations_used;
        j["converged"] = blimfs.converged;
        if (!dec_report.empty())
            write_json_atomic(j, dec_report);
        std::cout << j.dump(2) << '\n';
        return 0;
    }

    if (*dfa_cmd) {
        mdd::MultichannelSignal signal = mdd::load_csv(dfa_input, dfa_header);
        std::vector<int> scales = parse_scale_range(dfa_scales);
        mdd::FluctuationCurve curve;
        if (dfa_variant == "univariate")
            curve = mdd::dfa_univariate(signal, scales, dfa_order);
        else if (mdd::parse_dfa_variant(dfa_variant) == mdd::DfaVariant::Mahalanobis)
            curve = mdd::mdfa(signal, scales, dfa_order);
        else
            curve = mdd::mdfa_euclidean(signal, scales, dfa_order);
        json j;
        j["alpha"] = curve.alpha;
        j["fit_residual"] = curve.fit_residual;
        j["degenerate_fit"] = curve.degenerate_fit;
        j["scales"] = curve.scales;
        j["f_values"] = curve.f_values;
        j["variant"] = dfa_variant;
        if (!dfa_report.empty())
            write_json_atomic(j, dfa_report);
        std::cout << j.dump(2) << '\n';
        return 0;
    }

    if (*den) {
        mdd::MultichannelSignal noisy = mdd::load_csv(den_input, den_header);
        std::optional<mdd::MultichannelSignal> clean;
        if (!den_clean.empty())
            clean = mdd::load_csv(den_clean, false);
        std::vector<int> scales = parse_scale_range(den_scales);
        mdd::DenoiseResult result =
            mdd::denoise(noisy, den_mvmd.config(), scales,
                         mdd::parse_dfa_variant(den_variant),
                         clean ? &*clean : nullptr);
        mdd::save_csv(result.estimate, den_out);
        if (!den_report.empty())
            write_json_atomic(mdd::report_to_json(result.report), den_report);
        if (!den_plots.empty())
            mdd::emit_plots(result.report, result.report.curves, den_plots);
        std::cout << "k1 = " << result.report.mode_scores.k1;
        if (result.report.output_snr)
            std::cout << ", output SNR = " << result.report.output_snr->average_db
                      << " dB";
        std::cout << '\n';
        return 0;
    }

    if (*bench) {
        mdd::MultichannelSignal clean =
            !bench_clean_csv.empty()
                ? mdd::load_csv(bench_clean_csv, false)
                : (bench_kind == "quad"
                       ? mdd::make_quadrivariate(bench_n)
                       : mdd::generate_test_signal(mdd::parse_test_kind(bench_kind),
                                                   bench_n));
        std::vector<std::uint64_t> seeds(static_cast<std::size_t>(bench_seeds));
        std::iota(seeds.begin(), seeds.end(), 1);
        std::vector<int> scales = parse_scale_range(bench_scales);
        std::vector<mdd::BenchmarkRow> rows =
            mdd::benchmark(clean, bench_grid, !bench_unbalanced, seeds,
                           mdd::parse_dfa_variant(bench_variant), bench_mvmd.config(),
                           scales);
        json j = json::array();
        for (const mdd::BenchmarkRow& row : rows) {
            json entry;
            entry["target_snr_db"] = row.target_snr_db;
            entry["mean_input_db"] = row.mean_input_db;
            entry["mean_output_db"] = row.mean_output_db;
            json reports = json::array();
            for (const mdd::DenoiseReport& report : row.reports)
                reports.push_back(mdd::report_to_json(report));
            entry["reports"] = std::move(reports);
            j.push_back(std::move(entry));
            std::cout << "input " << row.mean_input_db << " dB -> output "
                      << row.mean_output_db << " dB\n";
        }
        write_json_atomic(j, bench_report);
        return 0;
    }

    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const mdd::DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 3;
    } catch (const mdd::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return 4;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    }
}
