#pragma once

// Dense complex Hermitian matrix algebra on small spaces (d <= 64).
//
// All types are immutable values once built; every free function is pure.
// Hermitian eigendecompositions use a cyclic complex Jacobi sweep, which is
// accurate to machine precision at the dimensions used by quantum games.

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace qmmw {

using Complex = std::complex<double>;

inline constexpr double kHermitianTolerance = 1e-12;
inline constexpr double kDensityEigenTolerance = 1e-10;
inline constexpr double kDensityTraceTolerance = 1e-10;
inline constexpr double kLogEigenvalueFloor = 1e-300;

/// Square complex matrix, row-major.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  explicit ComplexMatrix(std::size_t dim);
  ComplexMatrix(std::size_t dim, std::vector<Complex> entries);

  static ComplexMatrix identity(std::size_t dim);
  static ComplexMatrix diagonal(std::span<const double> values);

  [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
  [[nodiscard]] Complex& operator()(std::size_t row, std::size_t col) {
    return data_[row * dim_ + col];
  }
  [[nodiscard]] const Complex& operator()(std::size_t row, std::size_t col) const {
    return data_[row * dim_ + col];
  }
  [[nodiscard]] std::span<const Complex> entries() const noexcept { return data_; }

  [[nodiscard]] ComplexMatrix adjoint() const;
  [[nodiscard]] Complex trace() const;
  [[nodiscard]] bool is_finite() const;
  /// Largest entrywise |A - A^dagger|.
  [[nodiscard]] double hermiticity_residual() const;

  ComplexMatrix& operator+=(const ComplexMatrix& other);
  ComplexMatrix& operator-=(const ComplexMatrix& other);
  ComplexMatrix& operator*=(Complex scale);

  friend ComplexMatrix operator+(ComplexMatrix lhs, const ComplexMatrix& rhs) { return lhs += rhs; }
  friend ComplexMatrix operator-(ComplexMatrix lhs, const ComplexMatrix& rhs) { return lhs -= rhs; }
  friend ComplexMatrix operator*(ComplexMatrix lhs, Complex scale) { return lhs *= scale; }
  friend ComplexMatrix operator*(Complex scale, ComplexMatrix rhs) { return rhs *= scale; }
  friend ComplexMatrix operator*(const ComplexMatrix& lhs, const ComplexMatrix& rhs);
  friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<Complex> data_;
};

/// ComplexMatrix that equals its conjugate transpose.
///
/// Construction checks the entrywise residual against `tolerance` and then
/// stores the exact projection (A + A^dagger) / 2, so downstream code can rely
/// on real diagonals and conjugate-symmetric off-diagonals.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;
  explicit HermitianMatrix(const ComplexMatrix& matrix, double tolerance = kHermitianTolerance);

  /// Hermitian part (A + A^dagger) / 2 of an arbitrary matrix; never throws.
  static HermitianMatrix hermitian_part(const ComplexMatrix& matrix);
  static HermitianMatrix zero(std::size_t dim);
  static HermitianMatrix identity(std::size_t dim);
  static HermitianMatrix diagonal(std::span<const double> values);

  [[nodiscard]] const ComplexMatrix& matrix() const noexcept { return m_; }
  [[nodiscard]] std::size_t dim() const noexcept { return m_.dim(); }
  [[nodiscard]] const Complex& operator()(std::size_t row, std::size_t col) const { return m_(row, col); }
  [[nodiscard]] double trace() const { return m_.trace().real(); }
  [[nodiscard]] bool is_finite() const { return m_.is_finite(); }

  HermitianMatrix& operator+=(const HermitianMatrix& other);
  HermitianMatrix& operator-=(const HermitianMatrix& other);
  HermitianMatrix& operator*=(double scale);

  friend HermitianMatrix operator+(HermitianMatrix lhs, const HermitianMatrix& rhs) { return lhs += rhs; }
  friend HermitianMatrix operator-(HermitianMatrix lhs, const HermitianMatrix& rhs) { return lhs -= rhs; }
  friend HermitianMatrix operator*(HermitianMatrix lhs, double scale) { return lhs *= scale; }
  friend HermitianMatrix operator*(double scale, HermitianMatrix rhs) { return rhs *= scale; }
  friend bool operator==(const HermitianMatrix&, const HermitianMatrix&) = default;

 private:
  struct Trusted {};
  HermitianMatrix(ComplexMatrix matrix, Trusted) : m_(std::move(matrix)) {}

  ComplexMatrix m_;
};

/// Positive semidefinite Hermitian matrix with unit trace.
class DensityMatrix {
 public:
  DensityMatrix() = default;
  /// Throws ValidationError if an eigenvalue is below -1e-10 or |tr - 1| > 1e-10.
  explicit DensityMatrix(HermitianMatrix matrix);

  static DensityMatrix maximally_mixed(std::size_t dim);
  /// |k><k| in the computational basis.
  static DensityMatrix basis_state(std::size_t dim, std::size_t k);
  /// |psi><psi| / <psi|psi>.
  static DensityMatrix pure(std::span<const Complex> psi);

  [[nodiscard]] const HermitianMatrix& hermitian() const noexcept { return h_; }
  [[nodiscard]] const ComplexMatrix& matrix() const noexcept { return h_.matrix(); }
  [[nodiscard]] std::size_t dim() const noexcept { return h_.dim(); }
  [[nodiscard]] const Complex& operator()(std::size_t row, std::size_t col) const { return h_(row, col); }

  friend bool operator==(const DensityMatrix&, const DensityMatrix&) = default;

 private:
  friend DensityMatrix softmax_density(const HermitianMatrix& dual);
  struct Trusted {};
  DensityMatrix(HermitianMatrix matrix, Trusted) : h_(std::move(matrix)) {}

  HermitianMatrix h_;
};

/// Spectral decomposition H = U diag(eigenvalues) U^dagger, eigenvalues ascending.
struct EigenDecomposition {
  std::vector<double> eigenvalues;
  ComplexMatrix unitary;  ///< eigenvectors as columns

  /// U f(Lambda) U^dagger.
  [[nodiscard]] HermitianMatrix apply(const std::function<double(double)>& f) const;
  [[nodiscard]] HermitianMatrix reconstruct() const;
};

EigenDecomposition eigh(const HermitianMatrix& h);
/// Validates Hermiticity first; throws ValidationError otherwise.
EigenDecomposition eigh(const ComplexMatrix& m);

HermitianMatrix mat_exp(const HermitianMatrix& h);
/// Throws DomainError when an eigenvalue is <= kLogEigenvalueFloor.
HermitianMatrix mat_log(const HermitianMatrix& p);

/// exp(Y) / tr exp(Y), evaluated with the spectrum shifted by lambda_max(Y).
DensityMatrix softmax_density(const HermitianMatrix& dual);

double lambda_max(const HermitianMatrix& h);
double lambda_min(const HermitianMatrix& h);
/// Largest |eigenvalue|.
double operator_norm(const HermitianMatrix& h);

/// Re tr(A^dagger B); throws DimensionError on mismatch.
double frob_inner(const ComplexMatrix& a, const ComplexMatrix& b);
double frob_inner(const HermitianMatrix& a, const HermitianMatrix& b);
double frob_norm(const ComplexMatrix& a);
double frob_norm(const HermitianMatrix& a);
/// Re tr(A B) for Hermitian A, B.
double trace_product(const HermitianMatrix& a, const HermitianMatrix& b);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
/// Left fold a_1 (x) a_2 (x) ... ; an empty list yields the 1x1 identity.
ComplexMatrix kron(std::span<const ComplexMatrix> factors);
HermitianMatrix kron(std::span<const DensityMatrix> factors);

/// Gradient of tr(W X_1 (x) ... (x) X_N) with respect to X_player.
///
/// Returns the Hermitian G on the player's factor with tr(G X_player) equal
/// to the full trace for every X_player. `factors[player]` only supplies the
/// dimension; its entries are ignored.
HermitianMatrix partial_contraction(const HermitianMatrix& w,
                                    std::span<const HermitianMatrix> factors,
                                    std::size_t player);
HermitianMatrix partial_contraction(const HermitianMatrix& w,
                                    std::span<const DensityMatrix> factors,
                                    std::size_t player);

}  // namespace qmmw
