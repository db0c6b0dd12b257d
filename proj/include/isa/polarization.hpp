/**
 * @file polarization.hpp
 * @brief Linear-polarization qubit kernel: angles, pure states, density
 * matrices, photon ensembles, Stokes coordinates and the closed-form 2x2
 * eigendecomposition.
 *
 * Basis convention: |0> = H, |1> = V. Stokes components are indexed so that
 *   S1 <-> sigma_1 (D/A), S2 <-> sigma_2 (R/L), S3 <-> sigma_3 (H/V),
 * which differs from the classical-optics S1 = H/V ordering.
 */

#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace isa {

using Complex = std::complex<double>;

namespace tolerance {
inline constexpr double kHermitian = 1e-12;
inline constexpr double kTrace = 1e-12;
inline constexpr double kNegativeEigenvalue = 1e-10;
inline constexpr double kPureNorm = 1e-12;
inline constexpr double kBlochRadius = 1e-10;
inline constexpr double kDegeneracy = 1e-9;
}  // namespace tolerance

/// Linear polarization angle in degrees, canonical range [0, 180).
class PolarizationAngle {
public:
    constexpr PolarizationAngle() = default;

    /// Reduces any finite angle mod 180. Throws std::domain_error otherwise.
    static PolarizationAngle from_degrees(double raw_degrees);

    double degrees() const { return degrees_; }
    double radians() const;

    friend bool operator==(PolarizationAngle, PolarizationAngle) = default;

private:
    explicit constexpr PolarizationAngle(double canonical) : degrees_(canonical) {}
    double degrees_ = 0.0;
};

PolarizationAngle normalize_angle(double raw_degrees);

/// Real-amplitude pure state a0|H> + a1|V>.
class PureState {
public:
    /// Throws std::domain_error unless a0^2 + a1^2 = 1 within 1e-12.
    PureState(double a0, double a1);

    double a0() const { return a0_; }
    double a1() const { return a1_; }

private:
    double a0_;
    double a1_;
};

PureState pure_state(PolarizationAngle angle);

/// 2x2 Hermitian, unit-trace, positive-semidefinite operator.
///
/// Every instance satisfies the invariants; the constructor throws
/// std::domain_error for anything else. Values are immutable.
class DensityMatrix {
public:
    DensityMatrix(Complex e00, Complex e01, Complex e10, Complex e11);

    /// Real symmetric matrix [[hh, off], [off, vv]].
    static DensityMatrix real(double hh, double off, double vv);

    Complex operator()(int row, int col) const { return entries_[static_cast<std::size_t>(2 * row + col)]; }
    const std::array<Complex, 4>& entries() const { return entries_; }

    /// True when every off-diagonal imaginary part is exactly zero.
    bool is_real() const;

private:
    std::array<Complex, 4> entries_;
};

struct StokesVector {
    double s0 = 1.0;
    double s1 = 0.0;
    double s2 = 0.0;
    double s3 = 0.0;

    /// s1^2 + s2^2 + s3^2, the squared distance from the sphere center.
    double radius_squared() const { return s1 * s1 + s2 * s2 + s3 * s3; }
};

/// Eigen-decomposition of a density matrix. Eigenvalues are the intensities
/// of the two orthogonal polarization axes; angles are the orientations of
/// the matching eigenvectors.
struct Spectrum {
    double lambda_max = 1.0;
    double lambda_min = 0.0;
    std::optional<PolarizationAngle> principal_angle;
    std::optional<PolarizationAngle> minor_angle;
    /// Unit eigenvectors, first nonzero component real and positive.
    std::array<Complex, 2> principal_vector{};
    std::array<Complex, 2> minor_vector{};
};

struct EnsembleComponent {
    std::uint64_t count = 0;
    PolarizationAngle angle;

    friend bool operator==(const EnsembleComponent&, const EnsembleComponent&) = default;
};

/// Weighted collection of linearly polarized photons; weights are count/total.
struct PhotonEnsemble {
    std::vector<EnsembleComponent> components;

    std::uint64_t total() const;

    friend bool operator==(const PhotonEnsemble&, const PhotonEnsemble&) = default;
};

DensityMatrix density_of_pure(const PureState& state);

/// Convex combination sum_i (n_i / N) |psi_i><psi_i|. Empty or zero-count
/// ensembles throw std::domain_error.
DensityMatrix ensemble_density(const PhotonEnsemble& ensemble);

PhotonEnsemble rotate_ensemble(const PhotonEnsemble& ensemble, PolarizationAngle delta);

/// tr(rho^2), in [0.5, 1].
double purity(const DensityMatrix& rho);

/// S_i = Tr(sigma_i rho).
StokesVector stokes_from_density(const DensityMatrix& rho);

/// rho = 1/2 sum_i S_i sigma_i. Throws std::domain_error when the Bloch
/// vector lies outside the unit ball beyond 1e-10 or s0 is not 1.
DensityMatrix density_from_stokes(const StokesVector& s);

Spectrum eigendecompose(const DensityMatrix& rho);

/// Frobenius norm of (a - b).
double matrix_distance(const DensityMatrix& a, const DensityMatrix& b);

/// Row-major rendering, fixed point with six decimals: [[a, b], [c, d]].
std::string format_matrix(const DensityMatrix& rho);

}  // namespace isa
