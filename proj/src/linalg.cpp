#include "drivenloc/linalg.hpp"

#include <cstdio>

namespace drivenloc {

CMatrix expm_hermitian(const RMatrix& H, double tau) {
  Eigen::SelfAdjointEigenSolver<RMatrix> es(H);
  const RMatrix& Q = es.eigenvectors();
  CVector phase(H.rows());
  for (Eigen::Index i = 0; i < H.rows(); ++i) phase[i] = std::polar(1.0, -tau * es.eigenvalues()[i]);
  return Q.cast<Complex>() * phase.asDiagonal() * Q.transpose().cast<Complex>();
}

CMatrix expm_hermitian(const CMatrix& H, double tau) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(H);
  const CMatrix& Q = es.eigenvectors();
  CVector phase(H.rows());
  for (Eigen::Index i = 0; i < H.rows(); ++i) phase[i] = std::polar(1.0, -tau * es.eigenvalues()[i]);
  return Q * phase.asDiagonal() * Q.adjoint();
}

double operator_norm(const CMatrix& A) {
  if (A.size() == 0) return 0.0;
  Eigen::BDCSVD<CMatrix> svd(A);
  return svd.singularValues()[0];
}

double unitarity_defect(const CMatrix& U) {
  const CMatrix D = U.adjoint() * U - CMatrix::Identity(U.cols(), U.cols());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(D, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

double hermiticity_defect(const CMatrix& A) {
  return (A - A.adjoint()).cwiseAbs().maxCoeff();
}

void write_triplets(std::ostream& out, const CSparse& A) {
  char buf[128];
  for (int col = 0; col < A.outerSize(); ++col) {
    for (CSparse::InnerIterator it(A, col); it; ++it) {
      std::snprintf(buf, sizeof buf, "%lld %lld %.17g %.17g\n", static_cast<long long>(it.row()),
                    static_cast<long long>(it.col()), it.value().real(), it.value().imag());
      out << buf;
    }
  }
}

}  // namespace drivenloc
