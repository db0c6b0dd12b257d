/**
 * @file protocol.hpp
 * @brief Single-transmission intensity-and-state-aware ping-pong protocol.
 *
 * Alice sends n photons polarized at theta. Bob encodes one bit by rotating
 * the returning stream by 0 or 90 degrees. Eve may siphon photons on either
 * leg and inject the same number at her own angle phi, which keeps the
 * photon count constant. Alice compares the received density matrix against
 * both hypotheses and checks its purity.
 *
 * Eve only siphons photons she did not inject herself (she knows the slots
 * she filled). Alice's photons share one polarization, so the choice among
 * them is immaterial and siphoning is deterministic in both modes.
 */

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "isa/polarization.hpp"
#include "isa/tomography.hpp"

namespace isa {

enum class Bit { Zero = 0, One = 1 };
enum class Decision { Bit0, Bit1, EveDetected };
enum class Mode { Exact, Sampled };

std::string_view to_string(Decision decision);
std::string_view to_string(Mode mode);
/// Parses "exact" or "sampled"; throws std::invalid_argument otherwise.
Mode parse_mode(std::string_view text);

struct EveConfig {
    bool enabled = false;
    std::uint64_t siphon_stage1 = 0;
    std::uint64_t siphon_stage2 = 0;
    PolarizationAngle injection_angle;
    /// False models a plain tap: photons are removed but not replaced.
    bool reinject = true;
};

struct ProtocolConfig {
    std::uint64_t n_photons = 100;
    PolarizationAngle alice_angle;
    Bit bob_bit = Bit::Zero;
    EveConfig eve;
    Mode mode = Mode::Exact;
    TomographyConfig tomography;
    /// Unset values fall back to default_thresholds(mode, photons_per_basis).
    std::optional<double> epsilon_distance;
    std::optional<double> epsilon_purity;
};

struct Thresholds {
    double distance = 1e-9;
    double purity = 1e-6;
};

/// Exact: (1e-9, 1e-6). Sampled: both max(floor, 6 / sqrt(N)).
Thresholds default_thresholds(Mode mode, std::uint64_t photons_per_basis);

/// Resolves overrides and validates epsilon_distance > 0, epsilon_purity in (0, 1).
Thresholds resolve_thresholds(const ProtocolConfig& config);

struct StageIntensities {
    std::uint64_t sent = 0;
    std::uint64_t after_stage1 = 0;
    std::uint64_t after_stage2 = 0;
};

struct ProtocolOutcome {
    Decision decision = Decision::Bit0;
    DensityMatrix rho_hypothesis_0;
    DensityMatrix rho_hypothesis_90;
    DensityMatrix rho_received;
    double purity_received = 1.0;
    double dist_to_h0 = 0.0;
    double dist_to_h90 = 0.0;
    Spectrum spectrum;
    StageIntensities stage_intensities;
    bool intensity_ok = true;
    Thresholds thresholds;
    /// Ground-truth ensemble that reached Alice.
    PhotonEnsemble received_ensemble;
};

/// Ties go to Bit0.
Decision decide(const DensityMatrix& rho_received, const DensityMatrix& rho_h0, const DensityMatrix& rho_h90,
                double eps_dist, double eps_purity);

/// True iff every recorded stage count equals the number sent.
bool intensity_check(const StageIntensities& intensities);

/// Throws std::domain_error on invalid configuration, including a siphon
/// count larger than the photons Eve can take at that stage.
ProtocolOutcome run_protocol(const ProtocolConfig& config);

/// Flat key=value block, one field per line.
std::string outcome_to_key_value(const ProtocolOutcome& outcome);

inline constexpr std::string_view kOutcomeCsvHeader =
    "decision,purity,dist_h0,dist_h90,lambda_max,principal_angle_deg,intensity_sent,intensity_stage1,"
    "intensity_stage2";

/// One data row matching kOutcomeCsvHeader, no trailing newline.
std::string outcome_to_csv_row(const ProtocolOutcome& outcome);

}  // namespace isa
