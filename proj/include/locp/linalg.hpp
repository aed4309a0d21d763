#pragma once

#include <Eigen/Dense>
#include <complex>

namespace locp {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Largest singular value; 0 for empty matrices.
double spectral_norm(const Matrix& m);

/// Largest absolute entry; 0 for empty matrices.
double max_abs(const Matrix& m);

inline Matrix hermitian_part(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

/// ||m - m*|| in spectral norm.
double hermitian_defect(const Matrix& m);

/// Eigenvalues (ascending) and eigenvectors of the Hermitian part of m.
void hermitian_eigs(const Matrix& m, RealVector& values, Matrix& vectors);

double min_hermitian_eig(const Matrix& m);
double max_hermitian_eig(const Matrix& m);

/// Moore-Penrose pseudoinverse with singular values below
/// rel_tol * sigma_max treated as zero.
Matrix pseudo_inverse(const Matrix& m, double rel_tol = 1e-12);

/// Square root of a PSD matrix; negative eigenvalues are clipped to zero.
Matrix psd_sqrt(const Matrix& hermitian);

/// Spectral clip of a Hermitian matrix to the interval [lo, hi].
Matrix spectral_clip(const Matrix& hermitian, double lo, double hi);

}  // namespace locp
