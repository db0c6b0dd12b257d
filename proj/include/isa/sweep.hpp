/**
 * @file sweep.hpp
 * @brief Peak intensity / peak angle sweeps over the number of photons Eve
 * manipulates, and families of sweeps over the angle gap between Alice and
 * Eve.
 */

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "isa/polarization.hpp"
#include "isa/protocol.hpp"

namespace isa {

struct SweepSpec {
    PolarizationAngle theta;
    PolarizationAngle phi;
    Bit bob_bit = Bit::Zero;
    std::uint64_t n_photons = 100;
    /// Total photons siphoned across both legs; each total is split evenly.
    std::vector<std::uint64_t> siphon_totals;
    Mode mode = Mode::Exact;
    std::uint64_t seed = 0;
    /// Sampled mode only.
    std::uint64_t photons_per_basis = 100000;
};

struct SweepRecord {
    std::uint64_t siphon_total = 0;
    double lambda_max = 1.0;
    std::optional<double> peak_angle_deg;
    double purity = 1.0;
    bool detected = false;
};

/// Throws std::domain_error unless totals are even, strictly increasing and
/// no larger than n_photons.
void validate(const SweepSpec& spec);

/// One record per siphon total, in order. Sampled-mode points are seeded with
/// point_seed(spec.seed, total), so results do not depend on evaluation order.
std::vector<SweepRecord> sweep_siphon(const SweepSpec& spec);

std::uint64_t point_seed(std::uint64_t seed, std::uint64_t siphon_total);

/// 1/2 (1 + sqrt(1 - 4 f (1 - f) sin^2 delta)): the larger eigenvalue of a
/// two-angle mixture with minority fraction f. Throws for f outside [0, 1].
double closed_form_lambda_max(double fraction, PolarizationAngle delta);

struct DeltaFamilyRow {
    double delta_deg = 0.0;
    double fraction = 0.0;
    SweepRecord record;
};

struct DeltaFamilyTable {
    std::vector<DeltaFamilyRow> rows;

    /// Throws std::out_of_range if the pair was not swept.
    const SweepRecord& at(double delta_deg, double fraction) const;
};

inline constexpr double kDefaultDeltas[] = {7.5, 15.0, 30.0, 60.0};
inline constexpr double kDefaultBaseTheta = 30.0;
inline constexpr std::uint64_t kDefaultFamilyPhotons = 100;

/// Fractions 0, 0.05, ..., 0.5.
std::vector<double> default_fraction_grid();

/// Exact mode, bit 0, phi = base_theta + delta. Each fraction f becomes a
/// siphon total f * n_photons, which must be a whole number; odd totals put
/// the extra photon on the second leg.
DeltaFamilyTable sweep_delta_family(std::span<const double> deltas_deg, PolarizationAngle base_theta,
                                    std::span<const double> fractions, std::uint64_t n_photons);

inline constexpr std::string_view kSweepCsvHeader = "siphon_total,lambda_max,peak_angle_deg,purity,detected";
inline constexpr std::string_view kDeltaFamilyCsvHeader =
    "delta_deg,fraction,siphon_total,lambda_max,peak_angle_deg,purity,detected";

std::string sweep_to_csv(std::span<const SweepRecord> records);
std::string delta_family_to_csv(const DeltaFamilyTable& table);

/// Writes `contents` to `path`; throws std::runtime_error naming the path on failure.
void write_text_file(const std::filesystem::path& path, std::string_view contents);

void write_csv(std::span<const SweepRecord> records, const std::filesystem::path& path);

/// key=value sidecar describing how a sweep was produced.
std::string sweep_metadata(std::string_view name, const SweepSpec& spec);

struct SiphonPreset {
    std::string_view name;
    double theta_deg;
    double phi_deg;
};

/// Figure presets fig4 ... fig11. Intensity and angle figures share a pair.
inline constexpr SiphonPreset kSiphonPresets[] = {
    {"fig4", 22.5, 30.0}, {"fig5", 22.5, 30.0},  {"fig6", 45.0, 60.0},  {"fig7", 45.0, 60.0},
    {"fig8", 30.0, 60.0}, {"fig9", 30.0, 60.0}, {"fig10", 30.0, 90.0}, {"fig11", 30.0, 90.0},
};

/// fig12, fig13 and delta-family all select the default delta family.
inline constexpr std::string_view kDeltaFamilyPresets[] = {"fig12", "fig13", "delta-family"};

/// Preset sweep: n = 100, totals 0, 2, ..., 50 (fraction up to one half).
std::optional<SweepSpec> siphon_preset(std::string_view name);
bool is_delta_family_preset(std::string_view name);

}  // namespace isa
