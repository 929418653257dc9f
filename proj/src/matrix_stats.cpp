#include "mdd/matrix_stats.hpp"
#include "mdd/errors.hpp"

#include <cmath>
#include <limits>

namespace mdd {

CovarianceMatrix covariance(const Eigen::MatrixXd& rows) {
    if (rows.rows() < 2)
        throw DataError("covariance: need at least 2 rows, got " +
                        std::to_string(rows.rows()));
    if (!rows.allFinite())
        throw DataError("covariance: non-finite entry");

    const Eigen::Index count = rows.rows();
    const Eigen::Index m = rows.cols();
    Eigen::RowVectorXd mean = rows.colwise().mean();
    Eigen::MatrixXd centered = rows.rowwise() - mean;
    CovarianceMatrix cov;
    cov.entries = centered.transpose() * centered / static_cast<double>(count - 1);
    // enforce exact symmetry against accumulation noise
    cov.entries = 0.5 * (cov.entries + cov.entries.transpose()).eval();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov.entries,
                                                      Eigen::EigenvaluesOnly);
    double lo = es.eigenvalues().minCoeff();
    double hi = es.eigenvalues().maxCoeff();
    cov.condition_estimate = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
    if (lo <= 0.0 || cov.condition_estimate > 1e12) {
        double ridge = 1e-10 * cov.entries.trace() / static_cast<double>(m);
        cov.entries += ridge * Eigen::MatrixXd::Identity(m, m);
        cov.regularization_applied = true;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es2(cov.entries,
                                                           Eigen::EigenvaluesOnly);
        double lo2 = es2.eigenvalues().minCoeff();
        cov.condition_estimate = lo2 > 0.0 ? es2.eigenvalues().maxCoeff() / lo2
                                           : std::numeric_limits<double>::infinity();
    }
    return cov;
}

double mahalanobis_norm(const Eigen::VectorXd& z, const CovarianceMatrix& sigma) {
    if (z.size() != sigma.entries.rows())
        throw DataError("mahalanobis_norm: dimension mismatch");
    Eigen::LLT<Eigen::MatrixXd> llt(sigma.entries);
    if (llt.info() != Eigen::Success)
        throw NumericalError("mahalanobis_norm: covariance is not positive definite");
    // z^T Sigma^-1 z = ||L^-1 z||^2 with Sigma = L L^T
    Eigen::VectorXd w = llt.matrixL().solve(z);
    return w.norm();
}

Eigen::MatrixXd polyfit_hat_matrix(int s, int order) {
    if (s < order + 1)
        throw DataError("polyfit: need at least " + std::to_string(order + 1) +
                        " samples for order " + std::to_string(order));
    Eigen::MatrixXd vand(s, order + 1);
    for (int i = 0; i < s; ++i) {
        double x = static_cast<double>(i + 1);
        double p = 1.0;
        for (int j = 0; j <= order; ++j) {
            vand(i, j) = p;
            p *= x;
        }
    }
    Eigen::MatrixXd gram = vand.transpose() * vand;
    return vand * gram.ldlt().solve(vand.transpose());
}

Eigen::VectorXd polyfit_trend(const Eigen::VectorXd& values, int order) {
    return polyfit_hat_matrix(static_cast<int>(values.size()), order) * values;
}

QuadFit quad_polyfit(const Eigen::VectorXd& values) {
    const int s = static_cast<int>(values.size());
    if (s < 3)
        throw DataError("quad_polyfit: need at least 3 samples, got " + std::to_string(s));
    Eigen::MatrixXd vand(s, 3);
    for (int i = 0; i < s; ++i) {
        double x = static_cast<double>(i + 1);
        vand(i, 0) = 1.0;
        vand(i, 1) = x;
        vand(i, 2) = x * x;
    }
    Eigen::Vector3d coef = vand.colPivHouseholderQr().solve(values);
    QuadFit fit;
    fit.c = coef(0);
    fit.b = coef(1);
    fit.a = coef(2);
    fit.fitted = vand * coef;
    return fit;
}

namespace {

PcaResult pca_decompose(const MultichannelSignal& mode, const char* op) {
    validate_signal(mode, op);
    const Eigen::Index n = mode.length();
    const Eigen::Index m = mode.channels();
    if (n < 2)
        throw DataError(std::string(op) + ": need at least 2 samples");
    if (n < m)
        throw DataError(std::string(op) + ": need N >= m");

    CovarianceMatrix cov = covariance(mode.samples);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov.entries);
    if (es.info() != Eigen::Success)
        throw NumericalError(std::string(op) + ": eigendecomposition failed");

    PcaResult pca;
    pca.eigenvalues.resize(m);
    pca.eigenvectors.resize(m, m);
    // Eigen returns ascending order; flip to non-increasing.
    for (Eigen::Index j = 0; j < m; ++j) {
        pca.eigenvalues(j) = es.eigenvalues()(m - 1 - j);
        pca.eigenvectors.col(j) = es.eigenvectors().col(m - 1 - j);
    }
    return pca;
}

} // namespace

PcaResult pca_select(const MultichannelSignal& mode) {
    PcaResult pca = pca_decompose(mode, "pca_select");
    const Eigen::Index n = mode.length();
    const Eigen::Index m = mode.channels();

    double mean_eig = pca.eigenvalues.mean();
    double threshold = mean_eig * (1.0 + 2.0 * std::sqrt(static_cast<double>(m - 1) /
                                                         static_cast<double>(n - 1)));
    int retained = 0;
    for (Eigen::Index j = 0; j < m; ++j)
        if (pca.eigenvalues(j) > threshold)
            ++retained;
    pca.retained_count = std::max(retained, 1);
    return pca;
}

PcaResult pca_select_energy(const MultichannelSignal& mode, double energy_fraction) {
    if (!(energy_fraction > 0.0) || energy_fraction > 1.0)
        throw DataError("pca_select_energy: fraction must be in (0, 1]");
    PcaResult pca = pca_decompose(mode, "pca_select_energy");
    const Eigen::Index m = mode.channels();

    double total = pca.eigenvalues.sum();
    if (total <= 0.0) {
        pca.retained_count = 1;
        return pca;
    }
    double acc = 0.0;
    int retained = 0;
    for (Eigen::Index j = 0; j < m; ++j) {
        acc += pca.eigenvalues(j);
        ++retained;
        if (acc >= energy_fraction * total)
            break;
    }
    pca.retained_count = retained;
    return pca;
}

MultichannelSignal pca_project(const MultichannelSignal& mode, const PcaResult& pca) {
    validate_signal(mode, "pca_project");
    const Eigen::Index m = mode.channels();
    if (pca.eigenvectors.rows() != m || pca.retained_count < 1 ||
        pca.retained_count > m)
        throw DataError("pca_project: shape mismatch with PCA result");

    Eigen::RowVectorXd mean = mode.samples.colwise().mean();
    Eigen::MatrixXd centered = mode.samples.rowwise() - mean;
    Eigen::MatrixXd basis = pca.eigenvectors.leftCols(pca.retained_count);
    MultichannelSignal out = mode;
    out.samples = (centered * basis) * basis.transpose();
    out.samples.rowwise() += mean;
    return out;
}

} // namespace mdd
