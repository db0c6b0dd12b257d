#include "isa/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace isa {

namespace {

double clamp_probability(double p) { return std::clamp(p, 0.0, 1.0); }

bool bernoulli(Generator& gen, double p) {
    const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
    return u < p;
}

std::uint64_t count_successes(Generator& gen, std::uint64_t trials, double p) {
    std::uint64_t hits = 0;
    for (std::uint64_t i = 0; i < trials; ++i) {
        hits += bernoulli(gen, p) ? 1 : 0;
    }
    return hits;
}

double basis_contrast(std::uint64_t plus, std::uint64_t minus, const char* basis) {
    const std::uint64_t total = plus + minus;
    if (total == 0) {
        throw std::domain_error(fmt::format("no photons recorded in the {} basis", basis));
    }
    return (static_cast<double>(plus) - static_cast<double>(minus)) / static_cast<double>(total);
}

}  // namespace

BornProbabilities born_probabilities(const DensityMatrix& rho) {
    const StokesVector s = stokes_from_density(rho);
    BornProbabilities p;
    p.p_h = rho(0, 0).real();
    p.p_v = rho(1, 1).real();
    p.p_d = 0.5 * (1.0 + s.s1);
    p.p_a = 0.5 * (1.0 - s.s1);
    p.p_r = 0.5 * (1.0 + s.s2);
    p.p_l = 0.5 * (1.0 - s.s2);
    return p;
}

MeasurementCounts simulate_counts(const DensityMatrix& rho, std::uint64_t photons_per_basis, Generator& gen) {
    if (photons_per_basis == 0) {
        throw std::domain_error("photons_per_basis must be at least 1");
    }
    const BornProbabilities p = born_probabilities(rho);
    MeasurementCounts counts;
    counts.n_h = count_successes(gen, photons_per_basis, clamp_probability(p.p_h));
    counts.n_v = photons_per_basis - counts.n_h;
    counts.n_d = count_successes(gen, photons_per_basis, clamp_probability(p.p_d));
    counts.n_a = photons_per_basis - counts.n_d;
    counts.n_r = count_successes(gen, photons_per_basis, clamp_probability(p.p_r));
    counts.n_l = photons_per_basis - counts.n_r;
    return counts;
}

MeasurementCounts simulate_counts(const DensityMatrix& rho, const TomographyConfig& config) {
    Generator gen(config.seed);
    return simulate_counts(rho, config.photons_per_basis, gen);
}

StokesVector stokes_estimate(const MeasurementCounts& counts) {
    StokesVector s;
    s.s1 = basis_contrast(counts.n_d, counts.n_a, "D/A");
    s.s2 = basis_contrast(counts.n_r, counts.n_l, "R/L");
    s.s3 = basis_contrast(counts.n_h, counts.n_v, "H/V");
    return s;
}

StokesVector stokes_estimate(const BornProbabilities& p) {
    StokesVector s;
    s.s1 = (p.p_d - p.p_a) / (p.p_d + p.p_a);
    s.s2 = (p.p_r - p.p_l) / (p.p_r + p.p_l);
    s.s3 = (p.p_h - p.p_v) / (p.p_h + p.p_v);
    return s;
}

DensityMatrix project_to_physical(const StokesVector& raw) {
    const double radius = std::sqrt(raw.radius_squared());
    if (radius <= 1.0) {
        return density_from_stokes({1.0, raw.s1, raw.s2, raw.s3});
    }
    // Eigenvalues of the unit-trace linear estimate are (1 +- radius) / 2.
    const double upper = std::max(0.5 * (1.0 + radius), 0.0);
    const double lower = std::max(0.5 * (1.0 - radius), 0.0);
    const double clipped_radius = (upper - lower) / (upper + lower);
    const double scale = clipped_radius / radius;
    return density_from_stokes({1.0, raw.s1 * scale, raw.s2 * scale, raw.s3 * scale});
}

DensityMatrix reconstruct(const MeasurementCounts& counts) { return project_to_physical(stokes_estimate(counts)); }

DensityMatrix reconstruct(const BornProbabilities& probabilities) {
    return project_to_physical(stokes_estimate(probabilities));
}

std::string counts_to_csv(const MeasurementCounts& c) {
    return fmt::format("{}\n{},{},{},{},{},{}\n", kCountsCsvHeader, c.n_h, c.n_v, c.n_d, c.n_a, c.n_r, c.n_l);
}

}  // namespace isa
