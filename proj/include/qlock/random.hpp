#pragma once

// Seeded samplers for random states and unitaries. All randomness in the
// library flows through std::mt19937_64 instances seeded from derive_seed, so
// results are a deterministic function of the master seed.

#include <cstdint>
#include <random>

#include "qlock/densop.hpp"

namespace qlock {

using Rng = std::mt19937_64;

/// splitmix64 of (master, stream); independent streams for restarts/trials.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

/// Matrix of i.i.d. standard complex Gaussians.
Matrix ginibre(Eigen::Index rows, Eigen::Index cols, Rng& rng);

/// Haar-random unitary of size n (QR of a Ginibre matrix, phases fixed).
Matrix random_unitary(int n, Rng& rng);

/// Haar-random isometry with `rows` >= `cols`.
Matrix random_isometry(Eigen::Index rows, Eigen::Index cols, Rng& rng);

/// G G^dagger / Tr with G a dim x rank Ginibre matrix; rank = dim gives the
/// Hilbert-Schmidt measure.
DensityOperator random_density(const Dims& dims, const Parties& party, int rank, Rng& rng);

DensityOperator random_pure(const Dims& dims, const Parties& party, Rng& rng);

}  // namespace qlock
