#pragma once

#include <Eigen/Dense>

#include "qmmw/game.hpp"
#include "qmmw/hermitian.hpp"
#include "qmmw/random_matrices.hpp"
#include "qmmw/rng.hpp"

namespace qmmw::test {

inline Eigen::MatrixXcd to_eigen(const ComplexMatrix& m) {
  Eigen::MatrixXcd out(m.dim(), m.dim());
  for (std::size_t i = 0; i < m.dim(); ++i) {
    for (std::size_t j = 0; j < m.dim(); ++j) out(i, j) = m(i, j);
  }
  return out;
}

inline ComplexMatrix from_eigen(const Eigen::MatrixXcd& m) {
  ComplexMatrix out(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = m(i, j);
  }
  return out;
}

inline double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.entries().size(); ++k) m = std::max(m, std::abs(a.entries()[k] - b.entries()[k]));
  return m;
}

inline HermitianMatrix pauli_z() {
  const double z[] = {1.0, -1.0};
  return HermitianMatrix::diagonal(z);
}

inline HermitianMatrix pauli_x() {
  ComplexMatrix m(2);
  m(0, 1) = 1.0;
  m(1, 0) = 1.0;
  return HermitianMatrix(m);
}

/// Random N-player game in observable form with 2-qubit-sized factors.
inline QuantumGame random_observable_game(Rng& rng, std::vector<std::size_t> dims, bool zero_sum) {
  std::size_t prod = 1;
  for (auto d : dims) prod *= d;
  std::vector<HermitianMatrix> ws;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (zero_sum && i == 1) {
      ws.push_back(ws[0] * -1.0);
    } else {
      ws.push_back(random_hermitian(rng, prod));
    }
  }
  return QuantumGame::from_observables(std::move(dims), std::move(ws), zero_sum);
}

/// Random POVM game: a rank-one POVM from a random unitary plus random payoffs.
inline QuantumGame random_povm_game(Rng& rng, std::vector<std::size_t> dims) {
  std::size_t prod = 1;
  for (auto d : dims) prod *= d;
  Eigen::MatrixXcd g(prod, prod);
  for (std::size_t i = 0; i < prod; ++i) {
    for (std::size_t j = 0; j < prod; ++j) {
      const double re = rng.normal();
      const double im = rng.normal();
      g(i, j) = Complex(re, im);
    }
  }
  const Eigen::MatrixXcd q = Eigen::HouseholderQR<Eigen::MatrixXcd>(g).householderQ();
  std::vector<PovmOutcome> outcomes;
  for (std::size_t k = 0; k < prod; ++k) {
    const Eigen::VectorXcd v = q.col(static_cast<Eigen::Index>(k));
    const Eigen::MatrixXcd p = v * v.adjoint();
    std::vector<double> pay;
    for (std::size_t i = 0; i < dims.size(); ++i) pay.push_back(2.0 * rng.uniform01() - 1.0);
    outcomes.push_back({HermitianMatrix::hermitian_part(from_eigen(p)), std::move(pay)});
  }
  return QuantumGame::from_povm(std::move(dims), std::move(outcomes));
}

inline Profile random_profile(Rng& rng, const QuantumGame& game) {
  Profile p;
  for (auto d : game.dims()) p.push_back(random_density_mixed_rank(rng, d));
  return p;
}

}  // namespace qmmw::test
