#pragma once

#include <complex>
#include <ostream>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace drivenloc {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;
using CSparse = Eigen::SparseMatrix<Complex>;

/// exp(-i tau H) for real symmetric H, through its eigendecomposition.
CMatrix expm_hermitian(const RMatrix& H, double tau);
CMatrix expm_hermitian(const CMatrix& H, double tau);

/// Largest singular value.
double operator_norm(const CMatrix& A);
/// ||A^* A - I|| in operator norm.
double unitarity_defect(const CMatrix& U);
/// max |A - A^*| entrywise.
double hermiticity_defect(const CMatrix& A);

/// Coordinate triplets "row col re im", one per line, %.17g.
void write_triplets(std::ostream& out, const CSparse& A);

}  // namespace drivenloc
