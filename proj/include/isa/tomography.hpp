/**
 * @file tomography.hpp
 * @brief Simulated single-photon polarization tomography.
 *
 * Ideal projective measurements in the H/V, D/A and R/L bases. Counts are
 * drawn from a seeded mt19937_64 stream; reconstruction is linear Stokes
 * inversion followed by eigenvalue clipping onto the physical set.
 */

#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

#include "isa/polarization.hpp"

namespace isa {

/// Recorded in every output's metadata so runs can be replayed. Each
/// Bernoulli outcome consumes one 64-bit draw u; success iff
/// (u >> 11) * 2^-53 < p. Bases are sampled in the order H/V, D/A, R/L.
inline constexpr std::string_view kGeneratorId = "mt19937_64/u53-bernoulli";

using Generator = std::mt19937_64;

struct MeasurementCounts {
    std::uint64_t n_h = 0;
    std::uint64_t n_v = 0;
    std::uint64_t n_d = 0;
    std::uint64_t n_a = 0;
    std::uint64_t n_r = 0;
    std::uint64_t n_l = 0;

    friend bool operator==(const MeasurementCounts&, const MeasurementCounts&) = default;
};

/// Outcome probabilities per projector; complements sum to 1 per basis.
struct BornProbabilities {
    double p_h = 0.5;
    double p_v = 0.5;
    double p_d = 0.5;
    double p_a = 0.5;
    double p_r = 0.5;
    double p_l = 0.5;
};

enum class ProjectionMode { ClipRenormalize };

struct TomographyConfig {
    std::uint64_t photons_per_basis = 100000;
    std::uint64_t seed = 0;
    ProjectionMode projection_mode = ProjectionMode::ClipRenormalize;
};

BornProbabilities born_probabilities(const DensityMatrix& rho);

/// Draws config.photons_per_basis outcomes per basis from a generator seeded
/// with config.seed. Throws std::domain_error if photons_per_basis is 0.
MeasurementCounts simulate_counts(const DensityMatrix& rho, const TomographyConfig& config);

/// Same as above with caller-owned generator state.
MeasurementCounts simulate_counts(const DensityMatrix& rho, std::uint64_t photons_per_basis, Generator& gen);

/// Frequency estimates. Throws std::domain_error if any basis has no counts.
StokesVector stokes_estimate(const MeasurementCounts& counts);

/// Infinite-sample estimate: probabilities stand in for frequencies.
StokesVector stokes_estimate(const BornProbabilities& probabilities);

/// Linear inversion, then clip negative eigenvalues and renormalize. Accepts
/// raw estimates with |s| > 1; the result always satisfies the
/// DensityMatrix invariants.
DensityMatrix project_to_physical(const StokesVector& raw);

DensityMatrix reconstruct(const MeasurementCounts& counts);
DensityMatrix reconstruct(const BornProbabilities& probabilities);

inline constexpr std::string_view kCountsCsvHeader = "n_h,n_v,n_d,n_a,n_r,n_l";

/// Header line plus one data row, newline terminated.
std::string counts_to_csv(const MeasurementCounts& counts);

}  // namespace isa
