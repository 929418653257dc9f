#include "mdd/errors.hpp"
#include "mdd/signal.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

using namespace mdd;

namespace {

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
}

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

} // namespace

TEST_CASE("load_csv ingests a plain numeric file") {
    const std::string path = temp_path("mdd_zeros.csv");
    write_file(path, "0,0\n0,0\n0,0\n0,0\n");
    MultichannelSignal sig = load_csv(path);
    CHECK(sig.length() == 4);
    CHECK(sig.channels() == 2);
    CHECK(sig.samples.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("load_csv reports ragged rows with location") {
    const std::string path = temp_path("mdd_ragged.csv");
    write_file(path, "1,2\n3\n");
    CHECK_THROWS_WITH_AS(load_csv(path), doctest::Contains("row 2"), DataError);
}

TEST_CASE("load_csv reports non-numeric cells with location") {
    const std::string path = temp_path("mdd_alpha.csv");
    write_file(path, "1,2\n3,x\n");
    CHECK_THROWS_WITH_AS(load_csv(path), doctest::Contains("column 2"), DataError);
}

TEST_CASE("load_csv missing file") {
    CHECK_THROWS_AS(load_csv(temp_path("mdd_no_such_file.csv")), DataError);
}

TEST_CASE("load_csv skips a header row when flagged") {
    const std::string path = temp_path("mdd_header.csv");
    write_file(path, "a,b\n1,2\n");
    MultichannelSignal sig = load_csv(path, true);
    CHECK(sig.length() == 1);
    CHECK(sig.samples(0, 1) == 2.0);
}

TEST_CASE("save_csv writes one row per sample; 1x1 zero becomes '0'") {
    const std::string path = temp_path("mdd_one.csv");
    MultichannelSignal sig;
    sig.samples = Eigen::MatrixXd::Zero(1, 1);
    save_csv(sig, path);
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    CHECK(line == "0");

    MultichannelSignal big = random_signal(4096, 4, 1);
    const std::string path2 = temp_path("mdd_big.csv");
    save_csv(big, path2);
    std::ifstream in2(path2);
    int rows = 0;
    while (std::getline(in2, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 4096);
}

TEST_CASE("CSV round trip preserves values to 1e-12") {
    MultichannelSignal sig = random_signal(257, 3, 7);
    sig.samples *= 1e3;
    const std::string path = temp_path("mdd_roundtrip.csv");
    save_csv(sig, path);
    MultichannelSignal back = load_csv(path);
    REQUIRE(back.samples.rows() == sig.samples.rows());
    double rel = (back.samples - sig.samples).cwiseAbs().maxCoeff() /
                 sig.samples.cwiseAbs().maxCoeff();
    CHECK(rel < 1e-12);
}

TEST_CASE("generators are normalized to unit sample standard deviation") {
    for (TestKind kind : {TestKind::Blocks, TestKind::Bumps, TestKind::Doppler,
                          TestKind::Heavisine}) {
        MultichannelSignal sig = generate_test_signal(kind, 1024);
        double mean = sig.samples.col(0).mean();
        double sd = std::sqrt((sig.samples.col(0).array() - mean).square().sum() / 1023.0);
        CHECK(sd == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("bumps stays non-negative (sum of positive kernels)") {
    // direct-formula oracle: every kernel term is positive, so the raw sum
    // is positive and the positive normalization preserves the sign
    MultichannelSignal sig = generate_test_signal(TestKind::Bumps, 1024);
    CHECK(sig.samples.minCoeff() >= 0.0);
}

TEST_CASE("blocks is piecewise constant with at most 12 plateau values") {
    MultichannelSignal sig = generate_test_signal(TestKind::Blocks, 1024);
    std::set<long long> quantized;
    for (int i = 0; i < 1024; ++i)
        quantized.insert(llround(sig.samples(i, 0) * 1e9));
    CHECK(quantized.size() <= 12);
}

TEST_CASE("generators are deterministic") {
    MultichannelSignal a = generate_test_signal(TestKind::Doppler, 512);
    MultichannelSignal b = generate_test_signal(TestKind::Doppler, 512);
    CHECK(a.samples == b.samples);
}

TEST_CASE("generator input validation") {
    CHECK_THROWS_AS(generate_test_signal(TestKind::Blocks, 8), DataError);
    CHECK_THROWS_AS(parse_test_kind("sawtooth"), DataError);
}

TEST_CASE("make_quadrivariate stacks the four waveforms") {
    MultichannelSignal quad = make_quadrivariate(1024);
    CHECK(quad.length() == 1024);
    CHECK(quad.channels() == 4);
    MultichannelSignal heavisine = generate_test_signal(TestKind::Heavisine, 1024);
    CHECK(quad.samples.col(3) == heavisine.samples.col(0));
    for (int a = 0; a < 4; ++a)
        for (int b = a + 1; b < 4; ++b)
            CHECK((quad.samples.col(a) - quad.samples.col(b)).norm() > 1.0);
}

TEST_CASE("add_noise hits the per-channel SNR target exactly") {
    MultichannelSignal clean = make_quadrivariate(512);
    NoiseSpec spec;
    spec.per_channel_snr_db = {10.0, 10.0, 10.0, 10.0};
    spec.seed = 3;
    MultichannelSignal noisy = add_noise(clean, spec);
    SnrReport report = snr(clean, noisy);
    for (double db : report.per_channel_db)
        CHECK(db == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(report.average_db == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("add_noise SNR targets are exact across seeds and levels") {
    MultichannelSignal clean = make_quadrivariate(256);
    for (double target : {-10.0, -2.0, 0.0, 13.5, 30.0}) {
        for (unsigned seed : {1u, 17u, 255u}) {
            NoiseSpec spec;
            spec.per_channel_snr_db.assign(4, target);
            spec.seed = seed;
            SnrReport report = snr(clean, add_noise(clean, spec));
            for (double db : report.per_channel_db)
                CHECK(std::abs(db - target) < 1e-9);
        }
    }
}

TEST_CASE("unbalanced targets step 1 dB around the average") {
    std::vector<double> t3 = unbalanced_targets(3, 10.0);
    CHECK(t3 == std::vector<double>{9.0, 10.0, 11.0});
    std::vector<double> t4 = unbalanced_targets(4, -2.0);
    CHECK(t4[0] == doctest::Approx(-3.5));
    CHECK(t4[3] == doctest::Approx(-0.5));
    double avg = (t4[0] + t4[1] + t4[2] + t4[3]) / 4.0;
    CHECK(avg == doctest::Approx(-2.0).epsilon(1e-12));
}

TEST_CASE("unbalanced [9,10,11] averages 10 dB") {
    MultichannelSignal clean = random_signal(512, 3, 11);
    NoiseSpec spec;
    spec.per_channel_snr_db = unbalanced_targets(3, 10.0);
    spec.seed = 5;
    SnrReport report = snr(clean, add_noise(clean, spec));
    CHECK(report.average_db == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("add_noise is deterministic in the seed") {
    MultichannelSignal clean = make_quadrivariate(128);
    NoiseSpec spec;
    spec.per_channel_snr_db.assign(4, 6.0);
    spec.seed = 99;
    MultichannelSignal a = add_noise(clean, spec);
    MultichannelSignal b = add_noise(clean, spec);
    CHECK(a.samples == b.samples);
    spec.seed = 100;
    CHECK(add_noise(clean, spec).samples != a.samples);
}

TEST_CASE("add_noise honors a cross-channel noise correlation") {
    MultichannelSignal clean = random_signal(200000, 2, 21);
    NoiseSpec spec;
    spec.per_channel_snr_db = {0.0, 0.0};
    spec.seed = 8;
    Eigen::MatrixXd corr(2, 2);
    corr << 1.0, 0.8, 0.8, 1.0;
    spec.cross_channel_correlation = corr;
    MultichannelSignal noisy = add_noise(clean, spec);
    Eigen::MatrixXd psi = noisy.samples - clean.samples;
    Eigen::VectorXd a = psi.col(0).array() - psi.col(0).mean();
    Eigen::VectorXd b = psi.col(1).array() - psi.col(1).mean();
    double rho = a.dot(b) / (a.norm() * b.norm());
    CHECK(rho == doctest::Approx(0.8).epsilon(0.02));
}

TEST_CASE("add_noise rejects bad specs") {
    MultichannelSignal clean = make_quadrivariate(64);
    NoiseSpec spec;
    spec.per_channel_snr_db = {1.0, 2.0};  // wrong channel count
    CHECK_THROWS_AS(add_noise(clean, spec), DataError);

    MultichannelSignal with_zero = clean;
    with_zero.samples.col(1).setZero();
    NoiseSpec ok;
    ok.per_channel_snr_db.assign(4, 10.0);
    CHECK_THROWS_AS(add_noise(with_zero, ok), DataError);
}

TEST_CASE("snr marks an exact match as infinite") {
    MultichannelSignal clean = make_quadrivariate(64);
    SnrReport report = snr(clean, clean);
    for (double db : report.per_channel_db)
        CHECK(std::isinf(db));
}

TEST_CASE("snr of the zero estimate is 0 dB per channel") {
    MultichannelSignal clean = make_quadrivariate(64);
    MultichannelSignal zeros = clean;
    zeros.samples.setZero();
    SnrReport report = snr(clean, zeros);
    for (double db : report.per_channel_db)
        CHECK(db == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("snr is invariant under a common positive rescaling") {
    MultichannelSignal clean = random_signal(128, 2, 2);
    MultichannelSignal est = random_signal(128, 2, 3);
    SnrReport base = snr(clean, est);
    MultichannelSignal clean2 = clean, est2 = est;
    clean2.samples *= 7.5;
    est2.samples *= 7.5;
    SnrReport scaled = snr(clean2, est2);
    for (std::size_t c = 0; c < base.per_channel_db.size(); ++c)
        CHECK(scaled.per_channel_db[c] == doctest::Approx(base.per_channel_db[c]));
}

TEST_CASE("snr rejects shape mismatch and zero-energy channels") {
    MultichannelSignal a = random_signal(32, 2, 4);
    MultichannelSignal b = random_signal(33, 2, 4);
    CHECK_THROWS_AS(snr(a, b), DataError);
    MultichannelSignal zero = a;
    zero.samples.col(0).setZero();
    CHECK_THROWS_AS(snr(zero, a), DataError);
}
