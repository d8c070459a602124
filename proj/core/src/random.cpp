#include "orbitqsl/random.hpp"

#include <cmath>

namespace orbitqsl {

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t key) noexcept {
  return mix64(mix64(parent) ^ mix64(key + 0x632be59bd9b4e019ULL));
}

std::uint64_t derive_seed(std::uint64_t parent, std::string_view key) noexcept {
  // FNV-1a
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char ch : key) {
    h ^= static_cast<unsigned char>(ch);
    h *= 0x100000001b3ULL;
  }
  return derive_seed(parent, h);
}

ComplexMatrix random_ginibre(std::size_t dim, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto d = static_cast<Eigen::Index>(dim);
  ComplexMatrix g(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(i, j) = Complex(re, im);
    }
  return g;
}

DensityMatrix random_density(std::size_t dim, Rng& rng) {
  const ComplexMatrix g = random_ginibre(dim, rng);
  const ComplexMatrix w = g * g.adjoint();
  return DensityMatrix::validate(hermitian_part(w / w.trace().real()));
}

DensityMatrix random_pure_state(std::size_t dim, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexVector psi(static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < psi.size(); ++i) {
    const double re = normal(rng);
    const double im = normal(rng);
    psi[i] = Complex(re, im);
  }
  return pure_state(psi);
}

ComplexMatrix random_hermitian(std::size_t dim, Rng& rng) {
  const ComplexMatrix g = random_ginibre(dim, rng);
  const ComplexMatrix h = hermitian_part(g);
  const EigenSystem eig = hermitian_eig(h);
  const double norm = std::max(std::abs(eig.values[0]), std::abs(eig.values[eig.values.size() - 1]));
  return norm > 0.0 ? ComplexMatrix(h / norm) : h;
}

ComplexMatrix random_psd_hamiltonian(std::size_t dim, Rng& rng) {
  const ComplexMatrix h = random_hermitian(dim, rng);
  const double lowest = hermitian_eig(h).values[0];
  return hermitian_part(h - lowest * identity(dim));
}

ComplexMatrix random_unitary(std::size_t dim, Rng& rng) {
  // Haar measure: QR of a Ginibre matrix with the diagonal phases of R divided out.
  const ComplexMatrix g = random_ginibre(dim, rng);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index k = 0; k < q.cols(); ++k) {
    const Complex d = r(k, k);
    if (std::abs(d) > 0.0) q.col(k) *= d / std::abs(d);
  }
  return q;
}

}  // namespace orbitqsl
