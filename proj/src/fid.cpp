#include "synthlab/fid.hpp"

#include <cmath>

#include <Eigen/Dense>

namespace synthlab {

namespace {

using Matrix = Eigen::MatrixXd;

Matrix to_matrix(const FeatureMoments& m) {
  Matrix s(m.d, m.d);
  for (std::int64_t i = 0; i < m.d; ++i)
    for (std::int64_t j = 0; j < m.d; ++j) s(i, j) = m.sigma[static_cast<std::size_t>(i * m.d + j)];
  return s;
}

// Symmetric PSD square root with eigenvalue clamping. Eigenvalues below
// -tol_scale*1e-8 mean the input is not a covariance matrix.
Matrix psd_sqrt(const Matrix& s, const char* what) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(s);
  if (eig.info() != Eigen::Success)
    throw Error(Errc::nonfinite_eigenvalue, std::string(what) + ": eigendecomposition failed");
  Eigen::VectorXd lam = eig.eigenvalues();
  const double tol = 1e-8 * std::max(1.0, std::abs(s.trace()));
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    if (!std::isfinite(lam(i)))
      throw Error(Errc::nonfinite_eigenvalue, std::string(what) + ": non-finite eigenvalue");
    if (lam(i) < -tol)
      throw Error(Errc::nonfinite_eigenvalue,
                  std::string(what) + ": eigenvalue " + std::to_string(lam(i)) + " below -" + std::to_string(tol));
    lam(i) = std::sqrt(std::max(0.0, lam(i)));
  }
  return eig.eigenvectors() * lam.asDiagonal() * eig.eigenvectors().transpose();
}

}  // namespace

double fid(const FeatureMoments& real, const FeatureMoments& gen, const FidOptions& opts) {
  if (real.d != gen.d)
    throw Error(Errc::dimension_mismatch, "fid: feature dims " + std::to_string(real.d) + " vs " +
                                              std::to_string(gen.d));
  const std::int64_t d = real.d;
  Matrix sr = to_matrix(real);
  Matrix sg = to_matrix(gen);
  if (opts.regularize) {
    sr += opts.regularize_eps * Matrix::Identity(d, d);
    sg += opts.regularize_eps * Matrix::Identity(d, d);
  }

  double mean_term = 0.0;
  for (std::int64_t i = 0; i < d; ++i) {
    const double diff = real.mu[static_cast<std::size_t>(i)] - gen.mu[static_cast<std::size_t>(i)];
    mean_term += diff * diff;
  }

  const Matrix root_r = psd_sqrt(sr, "fid: real covariance");
  Matrix inner = root_r * sg * root_r;
  inner = 0.5 * (inner + inner.transpose().eval());  // enforce symmetry

  Eigen::SelfAdjointEigenSolver<Matrix> eig(inner);
  if (eig.info() != Eigen::Success)
    throw Error(Errc::nonfinite_eigenvalue, "fid: eigendecomposition of the product failed");
  const double tol = 1e-8 * std::max(1.0, std::abs(inner.trace()));
  double tr_root = 0.0;
  for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) {
    const double lam = eig.eigenvalues()(i);
    if (!std::isfinite(lam)) throw Error(Errc::nonfinite_eigenvalue, "fid: non-finite eigenvalue");
    if (lam < -tol)
      throw Error(Errc::nonfinite_eigenvalue,
                  "fid: product eigenvalue " + std::to_string(lam) + " below -" + std::to_string(tol));
    tr_root += std::sqrt(std::max(0.0, lam));
  }

  const double raw = mean_term + sr.trace() + sg.trace() - 2.0 * tr_root;
  const double scale = std::max(1.0, mean_term + sr.trace() + sg.trace());
  if (raw < -1e-6 * scale)
    throw Error(Errc::nonfinite_eigenvalue,
                "fid: value " + std::to_string(raw) + " is negative beyond tolerance");
  return std::max(0.0, raw);
}

}  // namespace synthlab
