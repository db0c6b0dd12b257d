#include "isa/polarization.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

#include "isa/text.hpp"

namespace isa {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;

// Eigenvalues of a 2x2 Hermitian matrix [[a, b], [conj(b), d]].
struct EigenPair {
    double upper;
    double lower;
};

EigenPair hermitian_eigenvalues(double a, Complex b, double d) {
    const double mean = 0.5 * (a + d);
    const double half_gap = std::hypot(0.5 * (a - d), std::abs(b));
    return {mean + half_gap, mean - half_gap};
}

// Unit eigenvector for eigenvalue lambda of [[a, b], [conj(b), d]], phase
// fixed so the first nonzero component is real and positive.
std::array<Complex, 2> eigenvector(double a, Complex b, double d, double lambda) {
    const std::array<Complex, 2> from_first_row{b, Complex(lambda - a)};
    const std::array<Complex, 2> from_second_row{Complex(lambda - d), std::conj(b)};
    const auto norm = [](const std::array<Complex, 2>& v) { return std::hypot(std::abs(v[0]), std::abs(v[1])); };

    auto v = norm(from_first_row) >= norm(from_second_row) ? from_first_row : from_second_row;
    const double length = norm(v);
    v[0] /= length;
    v[1] /= length;

    const Complex lead = std::abs(v[0]) > 1e-15 ? v[0] : v[1];
    const Complex phase = std::conj(lead) / std::abs(lead);
    v[0] *= phase;
    v[1] *= phase;
    // Exact real zero for the imaginary part of the lead component.
    if (std::abs(v[0]) > 1e-15) {
        v[0] = std::abs(v[0]);
    } else {
        v[0] = 0.0;
        v[1] = std::abs(v[1]);
    }
    return v;
}

double positive_zero(double x) { return x + 0.0; }

}  // namespace

PolarizationAngle PolarizationAngle::from_degrees(double raw_degrees) {
    if (!std::isfinite(raw_degrees)) {
        throw std::domain_error("polarization angle must be finite");
    }
    double reduced = std::fmod(raw_degrees, 180.0);
    if (reduced < 0.0) {
        reduced += 180.0;
    }
    if (reduced >= 180.0) {
        reduced = 0.0;
    }
    return PolarizationAngle(positive_zero(reduced));
}

double PolarizationAngle::radians() const { return degrees_ * kDegToRad; }

PolarizationAngle normalize_angle(double raw_degrees) { return PolarizationAngle::from_degrees(raw_degrees); }

PureState::PureState(double a0, double a1) : a0_(a0), a1_(a1) {
    if (!std::isfinite(a0) || !std::isfinite(a1) || std::abs(a0 * a0 + a1 * a1 - 1.0) > tolerance::kPureNorm) {
        throw std::domain_error(fmt::format("pure state amplitudes ({}, {}) are not normalized", a0, a1));
    }
}

PureState pure_state(PolarizationAngle angle) {
    const double t = angle.radians();
    return PureState(std::cos(t), std::sin(t));
}

DensityMatrix::DensityMatrix(Complex e00, Complex e01, Complex e10, Complex e11) : entries_{e00, e01, e10, e11} {
    for (const Complex& e : entries_) {
        if (!std::isfinite(e.real()) || !std::isfinite(e.imag())) {
            throw std::domain_error("density matrix entries must be finite");
        }
    }
    if (std::abs(e00.imag()) > tolerance::kHermitian || std::abs(e11.imag()) > tolerance::kHermitian ||
        std::abs(e01 - std::conj(e10)) > tolerance::kHermitian) {
        throw std::domain_error("density matrix is not Hermitian");
    }
    const double trace = e00.real() + e11.real();
    if (std::abs(trace - 1.0) > tolerance::kTrace) {
        throw std::domain_error(fmt::format("density matrix trace {} is not 1", trace));
    }
    const auto eig = hermitian_eigenvalues(e00.real(), e01, e11.real());
    if (eig.lower < -tolerance::kNegativeEigenvalue) {
        throw std::domain_error(fmt::format("density matrix has negative eigenvalue {}", eig.lower));
    }
}

DensityMatrix DensityMatrix::real(double hh, double off, double vv) { return DensityMatrix(hh, off, off, vv); }

bool DensityMatrix::is_real() const {
    return std::all_of(entries_.begin(), entries_.end(), [](const Complex& e) { return e.imag() == 0.0; });
}

std::uint64_t PhotonEnsemble::total() const {
    std::uint64_t n = 0;
    for (const auto& c : components) {
        n += c.count;
    }
    return n;
}

DensityMatrix density_of_pure(const PureState& state) {
    const double a0 = state.a0();
    const double a1 = state.a1();
    return DensityMatrix::real(a0 * a0, a0 * a1, a1 * a1);
}

DensityMatrix ensemble_density(const PhotonEnsemble& ensemble) {
    const std::uint64_t total = ensemble.total();
    if (total == 0) {
        throw std::domain_error("ensemble has no photons");
    }
    double hh = 0.0;
    double off = 0.0;
    double vv = 0.0;
    for (const auto& c : ensemble.components) {
        if (c.count == 0) {
            continue;
        }
        const double weight = static_cast<double>(c.count) / static_cast<double>(total);
        const PureState psi = pure_state(c.angle);
        hh += weight * psi.a0() * psi.a0();
        off += weight * psi.a0() * psi.a1();
        vv += weight * psi.a1() * psi.a1();
    }
    return DensityMatrix::real(hh, off, vv);
}

PhotonEnsemble rotate_ensemble(const PhotonEnsemble& ensemble, PolarizationAngle delta) {
    PhotonEnsemble rotated = ensemble;
    for (auto& c : rotated.components) {
        c.angle = normalize_angle(c.angle.degrees() + delta.degrees());
    }
    return rotated;
}

double purity(const DensityMatrix& rho) {
    double sum = 0.0;
    for (const Complex& e : rho.entries()) {
        sum += std::norm(e);
    }
    return sum;
}

StokesVector stokes_from_density(const DensityMatrix& rho) {
    const Complex e00 = rho(0, 0);
    const Complex e01 = rho(0, 1);
    const Complex e10 = rho(1, 0);
    const Complex e11 = rho(1, 1);
    StokesVector s;
    s.s0 = positive_zero((e00 + e11).real());
    s.s1 = positive_zero((e01 + e10).real());
    s.s2 = positive_zero((Complex(0.0, 1.0) * (e01 - e10)).real());
    s.s3 = positive_zero((e00 - e11).real());
    return s;
}

DensityMatrix density_from_stokes(const StokesVector& s) {
    if (s.radius_squared() > 1.0 + tolerance::kBlochRadius) {
        throw std::domain_error(
            fmt::format("Stokes vector ({}, {}, {}) lies outside the Poincare sphere", s.s1, s.s2, s.s3));
    }
    const Complex off(0.5 * s.s1, -0.5 * s.s2);
    return DensityMatrix(0.5 * (s.s0 + s.s3), off, std::conj(off), 0.5 * (s.s0 - s.s3));
}

Spectrum eigendecompose(const DensityMatrix& rho) {
    const double a = rho(0, 0).real();
    const double d = rho(1, 1).real();
    const Complex b = rho(0, 1);
    const auto eig = hermitian_eigenvalues(a, b, d);

    Spectrum spec;
    spec.lambda_min = std::max(eig.lower, 0.0);
    spec.lambda_max = eig.upper;

    if (spec.lambda_max - spec.lambda_min < tolerance::kDegeneracy) {
        spec.principal_vector = {Complex(1.0), Complex(0.0)};
        spec.minor_vector = {Complex(0.0), Complex(1.0)};
        return spec;
    }

    spec.principal_vector = eigenvector(a, b, d, eig.upper);
    spec.minor_vector = eigenvector(a, b, d, eig.lower);

    if (rho.is_real()) {
        const auto& p = spec.principal_vector;
        const auto& m = spec.minor_vector;
        spec.principal_angle = normalize_angle(std::atan2(p[1].real(), p[0].real()) * kRadToDeg);
        spec.minor_angle = normalize_angle(std::atan2(m[1].real(), m[0].real()) * kRadToDeg);
    } else {
        // Orientation of the polarization ellipse's major axis.
        const StokesVector s = stokes_from_density(rho);
        const double orientation = 0.5 * std::atan2(s.s1, s.s3) * kRadToDeg;
        spec.principal_angle = normalize_angle(orientation);
        spec.minor_angle = normalize_angle(orientation + 90.0);
    }
    return spec;
}

double matrix_distance(const DensityMatrix& a, const DensityMatrix& b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        sum += std::norm(a.entries()[i] - b.entries()[i]);
    }
    return std::sqrt(sum);
}

std::string format_matrix(const DensityMatrix& rho) {
    const auto entry = [](Complex e) {
        if (e.imag() == 0.0) {
            return format_fixed(e.real());
        }
        std::string imag = format_fixed(e.imag());
        if (imag.front() != '-') {
            imag.insert(0, "+");
        }
        return format_fixed(e.real()) + imag + "i";
    };
    return fmt::format("[[{}, {}], [{}, {}]]", entry(rho(0, 0)), entry(rho(0, 1)), entry(rho(1, 0)), entry(rho(1, 1)));
}

}  // namespace isa
