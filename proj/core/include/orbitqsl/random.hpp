#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "orbitqsl/numerics.hpp"
#include "orbitqsl/states.hpp"

namespace orbitqsl {

using Rng = std::mt19937_64;

/// SplitMix64 finaliser.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Child seed keyed by `key` under `parent`; the basis of the seed derivation tree.
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t key) noexcept;
std::uint64_t derive_seed(std::uint64_t parent, std::string_view key) noexcept;

/// Matrix with i.i.d. standard complex Gaussian entries.
ComplexMatrix random_ginibre(std::size_t dim, Rng& rng);

/// Hilbert-Schmidt random state G G^dagger / Tr(G G^dagger).
DensityMatrix random_density(std::size_t dim, Rng& rng);

/// Haar-random pure state.
DensityMatrix random_pure_state(std::size_t dim, Rng& rng);

/// (G + G^dagger) / 2 rescaled to unit operator norm.
ComplexMatrix random_hermitian(std::size_t dim, Rng& rng);

/// random_hermitian shifted so that its smallest eigenvalue is zero.
ComplexMatrix random_psd_hamiltonian(std::size_t dim, Rng& rng);

/// Haar-random unitary.
ComplexMatrix random_unitary(std::size_t dim, Rng& rng);

}  // namespace orbitqsl
