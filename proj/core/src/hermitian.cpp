#include "qmmw/hermitian.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "qmmw/errors.hpp"

namespace qmmw {

namespace {

void require_same_dim(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw DimensionError(std::string(what) + ": dimension mismatch (" + std::to_string(a) +
                         " vs " + std::to_string(b) + ")");
  }
}

constexpr double kJacobiOffDiagonalTolerance = 1e-13;
constexpr int kJacobiMaxSweeps = 100;

double off_diagonal_mass(const ComplexMatrix& a) {
  double sum = 0.0;
  const std::size_t n = a.dim();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) sum += std::norm(a(i, j));
    }
  }
  return std::sqrt(sum);
}

// One complex Jacobi rotation zeroing a(p, q). The rotation is U = P R where
// P = diag(1, e^{-i phi}) on (p, q) makes the pivot real and R is the classic
// real symmetric rotation.
void jacobi_rotate(ComplexMatrix& a, ComplexMatrix& v, std::size_t p, std::size_t q) {
  const Complex apq = a(p, q);
  const double b = std::abs(apq);
  if (b == 0.0) return;
  const Complex phase = std::conj(apq) / b;  // e^{-i phi}

  const double theta = (a(q, q).real() - a(p, p).real()) / (2.0 * b);
  double t;
  if (std::abs(theta) > 1e150) {
    t = 0.5 / theta;
  } else {
    t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  }
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;

  const Complex upp = c;
  const Complex upq = s;
  const Complex uqp = -s * phase;
  const Complex uqq = c * phase;

  const std::size_t n = a.dim();
  // A <- A U (columns p, q)
  for (std::size_t k = 0; k < n; ++k) {
    const Complex akp = a(k, p);
    const Complex akq = a(k, q);
    a(k, p) = akp * upp + akq * uqp;
    a(k, q) = akp * upq + akq * uqq;
  }
  // A <- U^dagger A (rows p, q)
  for (std::size_t k = 0; k < n; ++k) {
    const Complex apk = a(p, k);
    const Complex aqk = a(q, k);
    a(p, k) = std::conj(upp) * apk + std::conj(uqp) * aqk;
    a(q, k) = std::conj(upq) * apk + std::conj(uqq) * aqk;
  }
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  a(p, p) = a(p, p).real();
  a(q, q) = a(q, q).real();

  for (std::size_t k = 0; k < n; ++k) {
    const Complex vkp = v(k, p);
    const Complex vkq = v(k, q);
    v(k, p) = vkp * upp + vkq * uqp;
    v(k, q) = vkp * upq + vkq * uqq;
  }
}

// Digits of a product-space index, player 0 most significant.
void decompose(std::size_t index, std::span<const std::size_t> dims, std::span<std::size_t> digits) {
  for (std::size_t j = dims.size(); j-- > 0;) {
    digits[j] = index % dims[j];
    index /= dims[j];
  }
}

template <typename Factor>
HermitianMatrix contract(const HermitianMatrix& w, std::span<const Factor> factors, std::size_t player) {
  if (player >= factors.size()) {
    throw DimensionError("partial_contraction: player index out of range");
  }
  std::vector<std::size_t> dims(factors.size());
  std::size_t total = 1;
  for (std::size_t j = 0; j < factors.size(); ++j) {
    dims[j] = factors[j].dim();
    total *= dims[j];
  }
  require_same_dim(w.dim(), total, "partial_contraction");

  const std::size_t di = dims[player];
  ComplexMatrix g(di);
  std::vector<std::size_t> rd(dims.size());
  std::vector<std::size_t> cd(dims.size());
  for (std::size_t r = 0; r < total; ++r) {
    decompose(r, dims, rd);
    for (std::size_t c = 0; c < total; ++c) {
      const Complex wrc = w(r, c);
      if (wrc == Complex{}) continue;
      decompose(c, dims, cd);
      Complex weight = wrc;
      for (std::size_t j = 0; j < dims.size() && weight != Complex{}; ++j) {
        if (j == player) continue;
        weight *= factors[j](cd[j], rd[j]);
      }
      g(rd[player], cd[player]) += weight;
    }
  }
  return HermitianMatrix::hermitian_part(g);
}

}  // namespace

// ---------------------------------------------------------------- ComplexMatrix

ComplexMatrix::ComplexMatrix(std::size_t dim) : dim_(dim), data_(dim * dim) {}

ComplexMatrix::ComplexMatrix(std::size_t dim, std::vector<Complex> entries)
    : dim_(dim), data_(std::move(entries)) {
  if (data_.size() != dim_ * dim_) {
    throw DimensionError("ComplexMatrix: expected " + std::to_string(dim_ * dim_) + " entries, got " +
                         std::to_string(data_.size()));
  }
  if (!is_finite()) throw ValidationError("ComplexMatrix: non-finite entry");
}

ComplexMatrix ComplexMatrix::identity(std::size_t dim) {
  ComplexMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const double> values) {
  ComplexMatrix m(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
  return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix out(dim_);
  for (std::size_t i = 0; i < dim_; ++i) {
    for (std::size_t j = 0; j < dim_; ++j) out(j, i) = std::conj((*this)(i, j));
  }
  return out;
}

Complex ComplexMatrix::trace() const {
  Complex sum{};
  for (std::size_t i = 0; i < dim_; ++i) sum += (*this)(i, i);
  return sum;
}

bool ComplexMatrix::is_finite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](const Complex& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

double ComplexMatrix::hermiticity_residual() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) {
    for (std::size_t j = i; j < dim_; ++j) {
      worst = std::max(worst, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
    }
  }
  return worst;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
  require_same_dim(dim_, other.dim_, "matrix addition");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& other) {
  require_same_dim(dim_, other.dim_, "matrix subtraction");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(Complex scale) {
  for (auto& z : data_) z *= scale;
  return *this;
}

ComplexMatrix operator*(const ComplexMatrix& lhs, const ComplexMatrix& rhs) {
  require_same_dim(lhs.dim_, rhs.dim_, "matrix product");
  const std::size_t n = lhs.dim_;
  ComplexMatrix out(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      const Complex lik = lhs(i, k);
      if (lik == Complex{}) continue;
      for (std::size_t j = 0; j < n; ++j) out(i, j) += lik * rhs(k, j);
    }
  }
  return out;
}

// -------------------------------------------------------------- HermitianMatrix

HermitianMatrix::HermitianMatrix(const ComplexMatrix& matrix, double tolerance) {
  if (!matrix.is_finite()) throw ValidationError("HermitianMatrix: non-finite entry");
  const double residual = matrix.hermiticity_residual();
  if (residual > tolerance) {
    throw ValidationError("HermitianMatrix: not Hermitian (residual " + std::to_string(residual) + ")");
  }
  m_ = hermitian_part(matrix).m_;
}

HermitianMatrix HermitianMatrix::hermitian_part(const ComplexMatrix& matrix) {
  const std::size_t n = matrix.dim();
  ComplexMatrix out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out(i, i) = matrix(i, i).real();
    for (std::size_t j = i + 1; j < n; ++j) {
      const Complex z = 0.5 * (matrix(i, j) + std::conj(matrix(j, i)));
      out(i, j) = z;
      out(j, i) = std::conj(z);
    }
  }
  return HermitianMatrix(std::move(out), Trusted{});
}

HermitianMatrix HermitianMatrix::zero(std::size_t dim) { return HermitianMatrix(ComplexMatrix(dim), Trusted{}); }

HermitianMatrix HermitianMatrix::identity(std::size_t dim) {
  return HermitianMatrix(ComplexMatrix::identity(dim), Trusted{});
}

HermitianMatrix HermitianMatrix::diagonal(std::span<const double> values) {
  for (double v : values) {
    if (!std::isfinite(v)) throw ValidationError("HermitianMatrix::diagonal: non-finite entry");
  }
  return HermitianMatrix(ComplexMatrix::diagonal(values), Trusted{});
}

HermitianMatrix& HermitianMatrix::operator+=(const HermitianMatrix& other) {
  m_ += other.m_;
  return *this;
}

HermitianMatrix& HermitianMatrix::operator-=(const HermitianMatrix& other) {
  m_ -= other.m_;
  return *this;
}

HermitianMatrix& HermitianMatrix::operator*=(double scale) {
  m_ *= scale;
  return *this;
}

// ---------------------------------------------------------------- DensityMatrix

DensityMatrix::DensityMatrix(HermitianMatrix matrix) {
  const double tr = matrix.trace();
  if (!(std::abs(tr - 1.0) <= kDensityTraceTolerance)) {
    throw ValidationError("DensityMatrix: trace " + std::to_string(tr) + " differs from 1");
  }
  const double lo = lambda_min(matrix);
  if (lo < -kDensityEigenTolerance) {
    throw ValidationError("DensityMatrix: negative eigenvalue " + std::to_string(lo));
  }
  h_ = std::move(matrix);
}

DensityMatrix DensityMatrix::maximally_mixed(std::size_t dim) {
  if (dim == 0) throw DimensionError("DensityMatrix: dimension must be positive");
  return DensityMatrix(HermitianMatrix::identity(dim) * (1.0 / static_cast<double>(dim)), Trusted{});
}

DensityMatrix DensityMatrix::basis_state(std::size_t dim, std::size_t k) {
  if (k >= dim) throw DimensionError("DensityMatrix::basis_state: index out of range");
  std::vector<double> diag(dim, 0.0);
  diag[k] = 1.0;
  return DensityMatrix(HermitianMatrix::diagonal(diag), Trusted{});
}

DensityMatrix DensityMatrix::pure(std::span<const Complex> psi) {
  double norm2 = 0.0;
  for (const auto& z : psi) norm2 += std::norm(z);
  if (!(norm2 > 0.0) || !std::isfinite(norm2)) throw ValidationError("DensityMatrix::pure: zero or non-finite vector");
  ComplexMatrix m(psi.size());
  for (std::size_t i = 0; i < psi.size(); ++i) {
    for (std::size_t j = 0; j < psi.size(); ++j) m(i, j) = psi[i] * std::conj(psi[j]) / norm2;
  }
  return DensityMatrix(HermitianMatrix::hermitian_part(m), Trusted{});
}

// ------------------------------------------------------------ eigendecomposition

HermitianMatrix EigenDecomposition::apply(const std::function<double(double)>& f) const {
  const std::size_t n = unitary.dim();
  std::vector<double> fl(n);
  for (std::size_t k = 0; k < n; ++k) fl[k] = f(eigenvalues[k]);
  ComplexMatrix out(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      Complex sum{};
      for (std::size_t k = 0; k < n; ++k) sum += unitary(i, k) * fl[k] * std::conj(unitary(j, k));
      out(i, j) = sum;
      if (j != i) out(j, i) = std::conj(sum);
    }
  }
  return HermitianMatrix::hermitian_part(out);
}

HermitianMatrix EigenDecomposition::reconstruct() const {
  return apply([](double x) { return x; });
}

EigenDecomposition eigh(const HermitianMatrix& h) {
  const std::size_t n = h.dim();
  ComplexMatrix a = h.matrix();
  ComplexMatrix v = ComplexMatrix::identity(n);

  double scale = 0.0;
  for (const auto& z : a.entries()) scale += std::norm(z);
  const double threshold = kJacobiOffDiagonalTolerance * std::max(1.0, std::sqrt(scale));

  for (int sweep = 0; sweep < kJacobiMaxSweeps; ++sweep) {
    if (off_diagonal_mass(a) < threshold) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) jacobi_rotate(a, v, p, q);
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a(x, x).real() < a(y, y).real(); });

  EigenDecomposition out;
  out.eigenvalues.resize(n);
  out.unitary = ComplexMatrix(n);
  for (std::size_t k = 0; k < n; ++k) {
    out.eigenvalues[k] = a(order[k], order[k]).real();
    for (std::size_t i = 0; i < n; ++i) out.unitary(i, k) = v(i, order[k]);
  }
  return out;
}

EigenDecomposition eigh(const ComplexMatrix& m) { return eigh(HermitianMatrix(m)); }

HermitianMatrix mat_exp(const HermitianMatrix& h) {
  return eigh(h).apply([](double x) { return std::exp(x); });
}

HermitianMatrix mat_log(const HermitianMatrix& p) {
  const auto dec = eigh(p);
  if (!dec.eigenvalues.empty() && dec.eigenvalues.front() <= kLogEigenvalueFloor) {
    throw DomainError("mat_log: eigenvalue " + std::to_string(dec.eigenvalues.front()) +
                      " is not strictly positive");
  }
  return dec.apply([](double x) { return std::log(x); });
}

DensityMatrix softmax_density(const HermitianMatrix& dual) {
  const std::size_t n = dual.dim();
  if (n == 0) throw DimensionError("softmax_density: empty matrix");
  // Removing the mean diagonal first makes Y and Y + cI numerically identical inputs.
  const double mean = dual.trace() / static_cast<double>(n);
  const auto dec = eigh(dual - HermitianMatrix::identity(n) * mean);
  const double top = dec.eigenvalues.back();
  double total = 0.0;
  for (double x : dec.eigenvalues) total += std::exp(x - top);
  auto rho = dec.apply([&](double x) { return std::exp(x - top) / total; });
  return DensityMatrix(std::move(rho), DensityMatrix::Trusted{});
}

double lambda_max(const HermitianMatrix& h) { return eigh(h).eigenvalues.back(); }

double lambda_min(const HermitianMatrix& h) { return eigh(h).eigenvalues.front(); }

double operator_norm(const HermitianMatrix& h) {
  if (h.dim() == 0) return 0.0;
  const auto ev = eigh(h).eigenvalues;
  return std::max(std::abs(ev.front()), std::abs(ev.back()));
}

// ------------------------------------------------------------- inner products

double frob_inner(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_dim(a.dim(), b.dim(), "frob_inner");
  double sum = 0.0;
  const auto ea = a.entries();
  const auto eb = b.entries();
  for (std::size_t k = 0; k < ea.size(); ++k) sum += (std::conj(ea[k]) * eb[k]).real();
  return sum;
}

double frob_inner(const HermitianMatrix& a, const HermitianMatrix& b) { return frob_inner(a.matrix(), b.matrix()); }

double frob_norm(const ComplexMatrix& a) {
  double sum = 0.0;
  for (const auto& z : a.entries()) sum += std::norm(z);
  return std::sqrt(sum);
}

double frob_norm(const HermitianMatrix& a) { return frob_norm(a.matrix()); }

double trace_product(const HermitianMatrix& a, const HermitianMatrix& b) {
  // tr(AB) = <A^dagger, B> = <A, B> for Hermitian A.
  return frob_inner(a, b);
}

// --------------------------------------------------------------- tensor products

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  const std::size_t na = a.dim();
  const std::size_t nb = b.dim();
  ComplexMatrix out(na * nb);
  for (std::size_t i = 0; i < na; ++i) {
    for (std::size_t j = 0; j < na; ++j) {
      const Complex aij = a(i, j);
      if (aij == Complex{}) continue;
      for (std::size_t k = 0; k < nb; ++k) {
        for (std::size_t l = 0; l < nb; ++l) out(i * nb + k, j * nb + l) = aij * b(k, l);
      }
    }
  }
  return out;
}

ComplexMatrix kron(std::span<const ComplexMatrix> factors) {
  ComplexMatrix out = ComplexMatrix::identity(1);
  for (const auto& f : factors) out = kron(out, f);
  return out;
}

HermitianMatrix kron(std::span<const DensityMatrix> factors) {
  ComplexMatrix out = ComplexMatrix::identity(1);
  for (const auto& f : factors) out = kron(out, f.matrix());
  return HermitianMatrix::hermitian_part(out);
}

HermitianMatrix partial_contraction(const HermitianMatrix& w, std::span<const HermitianMatrix> factors,
                                    std::size_t player) {
  return contract(w, factors, player);
}

HermitianMatrix partial_contraction(const HermitianMatrix& w, std::span<const DensityMatrix> factors,
                                    std::size_t player) {
  return contract(w, factors, player);
}

}  // namespace qmmw
