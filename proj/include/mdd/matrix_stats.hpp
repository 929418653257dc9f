#pragma once

#include "mdd/signal.hpp"

#include <Eigen/Dense>

namespace mdd {

/// Symmetric positive-(semi)definite channel covariance. When the raw sample
/// covariance is singular or badly conditioned a small ridge is added and the
/// flag records it.
struct CovarianceMatrix {
    Eigen::MatrixXd entries;             // m x m
    bool regularization_applied = false;
    double condition_estimate = 0.0;     // lambda_max / lambda_min (post-ridge)
};

// Sample covariance with denominator (count - 1), mean-removed. If the
// condition estimate exceeds 1e12 or any eigenvalue <= 0, a ridge
// eps * (trace/m) * I with eps = 1e-10 is added and flagged.
CovarianceMatrix covariance(const Eigen::MatrixXd& rows);

// sqrt(z^T Sigma^-1 z), via a Cholesky solve rather than an explicit inverse.
double mahalanobis_norm(const Eigen::VectorXd& z, const CovarianceMatrix& sigma);

struct QuadFit {
    double a = 0.0, b = 0.0, c = 0.0;  // y ~ a*i^2 + b*i + c, i = 1..s
    Eigen::VectorXd fitted;
};

// Least-squares quadratic fit against the local index i = 1..s.
QuadFit quad_polyfit(const Eigen::VectorXd& values);

// Least-squares polynomial trend of the given order against i = 1..s.
Eigen::VectorXd polyfit_trend(const Eigen::VectorXd& values, int order);

// Projection matrix H (s x s) such that H*y is the order-`order` polynomial
// trend of y on local index 1..s. Shared by all segments of equal length.
Eigen::MatrixXd polyfit_hat_matrix(int s, int order);

struct PcaResult {
    Eigen::VectorXd eigenvalues;   // non-increasing
    Eigen::MatrixXd eigenvectors;  // orthonormal columns, matching order
    int retained_count = 1;
};

// Eigendecomposition of the mode's channel covariance. Retains eigenvalues
// strictly above lambda_bar * (1 + 2*sqrt((m-1)/(N-1))), at least one.
PcaResult pca_select(const MultichannelSignal& mode);

// Same decomposition, but retains the smallest leading component set whose
// eigenvalues capture at least `energy_fraction` of the total variance. Used
// by the denoising pipeline, where the significance threshold above is too
// aggressive for heterogeneous channels and discards real signal energy.
PcaResult pca_select_energy(const MultichannelSignal& mode, double energy_fraction);

// Mean-removed projection onto the retained eigenvectors, reconstructed in
// the original channel basis with the mean restored.
MultichannelSignal pca_project(const MultichannelSignal& mode, const PcaResult& pca);

} // namespace mdd
