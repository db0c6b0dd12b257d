#include "isa/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <fmt/format.h>

#include "isa/text.hpp"

namespace isa {

namespace {

// Photons in flight. Alice's photons always share one polarization; Eve's
// injections are kept separately so she never re-siphons her own.
struct Channel {
    std::uint64_t alice_count = 0;
    PolarizationAngle alice_angle;
    std::vector<EnsembleComponent> injected;

    std::uint64_t total() const {
        std::uint64_t n = alice_count;
        for (const auto& c : injected) {
            n += c.count;
        }
        return n;
    }

    void attack(std::uint64_t siphon, const EveConfig& eve, int stage) {
        if (siphon > alice_count) {
            throw std::domain_error(fmt::format("stage-{} siphon of {} photons exceeds the {} photons available", stage,
                                                siphon, alice_count));
        }
        alice_count -= siphon;
        if (eve.reinject && siphon > 0) {
            injected.push_back({siphon, eve.injection_angle});
        }
    }

    void rotate(PolarizationAngle delta) {
        alice_angle = normalize_angle(alice_angle.degrees() + delta.degrees());
        for (auto& c : injected) {
            c.angle = normalize_angle(c.angle.degrees() + delta.degrees());
        }
    }

    PhotonEnsemble ensemble() const {
        PhotonEnsemble e;
        if (alice_count > 0) {
            e.components.push_back({alice_count, alice_angle});
        }
        for (const auto& c : injected) {
            e.components.push_back(c);
        }
        return e;
    }
};

PolarizationAngle bob_rotation(Bit bit) {
    switch (bit) {
    case Bit::Zero:
        return normalize_angle(0.0);
    case Bit::One:
        return normalize_angle(90.0);
    }
    throw std::domain_error("bob_bit must be 0 or 1");
}

std::string optional_angle(const std::optional<PolarizationAngle>& angle) {
    return angle ? format_fixed(angle->degrees()) : std::string{};
}

}  // namespace

std::string_view to_string(Decision decision) {
    switch (decision) {
    case Decision::Bit0:
        return "Bit0";
    case Decision::Bit1:
        return "Bit1";
    case Decision::EveDetected:
        return "EveDetected";
    }
    return "unknown";
}

std::string_view to_string(Mode mode) { return mode == Mode::Exact ? "exact" : "sampled"; }

Mode parse_mode(std::string_view text) {
    if (text == "exact") {
        return Mode::Exact;
    }
    if (text == "sampled") {
        return Mode::Sampled;
    }
    throw std::invalid_argument(fmt::format("unknown mode '{}' (expected exact or sampled)", text));
}

Thresholds default_thresholds(Mode mode, std::uint64_t photons_per_basis) {
    Thresholds t;
    if (mode == Mode::Sampled && photons_per_basis > 0) {
        const double noise_floor = 6.0 / std::sqrt(static_cast<double>(photons_per_basis));
        t.distance = std::max(1e-9, noise_floor);
        t.purity = std::max(1e-6, noise_floor);
    }
    return t;
}

Thresholds resolve_thresholds(const ProtocolConfig& config) {
    Thresholds t = default_thresholds(config.mode, config.tomography.photons_per_basis);
    if (config.epsilon_distance) {
        t.distance = *config.epsilon_distance;
    }
    if (config.epsilon_purity) {
        t.purity = *config.epsilon_purity;
    }
    if (!(t.distance > 0.0) || !std::isfinite(t.distance)) {
        throw std::domain_error("epsilon_distance must be positive");
    }
    if (!(t.purity > 0.0 && t.purity < 1.0)) {
        throw std::domain_error("epsilon_purity must lie in (0, 1)");
    }
    return t;
}

Decision decide(const DensityMatrix& rho_received, const DensityMatrix& rho_h0, const DensityMatrix& rho_h90,
                double eps_dist, double eps_purity) {
    if (purity(rho_received) < 1.0 - eps_purity) {
        return Decision::EveDetected;
    }
    const double d0 = matrix_distance(rho_received, rho_h0);
    const double d90 = matrix_distance(rho_received, rho_h90);
    if (std::min(d0, d90) > eps_dist) {
        return Decision::EveDetected;
    }
    return d0 <= d90 ? Decision::Bit0 : Decision::Bit1;
}

bool intensity_check(const StageIntensities& intensities) {
    return intensities.after_stage1 == intensities.sent && intensities.after_stage2 == intensities.sent;
}

ProtocolOutcome run_protocol(const ProtocolConfig& config) {
    if (config.n_photons == 0) {
        throw std::domain_error("n_photons must be positive");
    }
    const Thresholds thresholds = resolve_thresholds(config);
    const PolarizationAngle rotation = bob_rotation(config.bob_bit);

    const DensityMatrix rho_h0 = density_of_pure(pure_state(config.alice_angle));
    const DensityMatrix rho_h90 = density_of_pure(pure_state(normalize_angle(config.alice_angle.degrees() + 90.0)));

    Channel channel{config.n_photons, config.alice_angle, {}};
    StageIntensities intensities;
    intensities.sent = channel.total();

    if (config.eve.enabled) {
        channel.attack(config.eve.siphon_stage1, config.eve, 1);
    }
    intensities.after_stage1 = channel.total();

    channel.rotate(rotation);

    if (config.eve.enabled) {
        channel.attack(config.eve.siphon_stage2, config.eve, 2);
    }
    intensities.after_stage2 = channel.total();

    PhotonEnsemble received = channel.ensemble();
    if (received.total() == 0) {
        throw std::domain_error("no photons reached Alice");
    }
    const DensityMatrix true_density = ensemble_density(received);
    const DensityMatrix rho_received = config.mode == Mode::Exact
                                           ? true_density
                                           : reconstruct(simulate_counts(true_density, config.tomography));

    const bool intensity_ok = intensity_check(intensities);
    const Decision decision = intensity_ok
                                  ? decide(rho_received, rho_h0, rho_h90, thresholds.distance, thresholds.purity)
                                  : Decision::EveDetected;

    return ProtocolOutcome{
        .decision = decision,
        .rho_hypothesis_0 = rho_h0,
        .rho_hypothesis_90 = rho_h90,
        .rho_received = rho_received,
        .purity_received = purity(rho_received),
        .dist_to_h0 = matrix_distance(rho_received, rho_h0),
        .dist_to_h90 = matrix_distance(rho_received, rho_h90),
        .spectrum = eigendecompose(rho_received),
        .stage_intensities = intensities,
        .intensity_ok = intensity_ok,
        .thresholds = thresholds,
        .received_ensemble = std::move(received),
    };
}

std::string outcome_to_key_value(const ProtocolOutcome& o) {
    std::string out;
    const auto line = [&out](std::string_view key, const std::string& value) {
        out += fmt::format("{}={}\n", key, value);
    };
    line("decision", std::string(to_string(o.decision)));
    line("purity", format_fixed(o.purity_received));
    line("dist_h0", format_fixed(o.dist_to_h0));
    line("dist_h90", format_fixed(o.dist_to_h90));
    line("lambda_max", format_fixed(o.spectrum.lambda_max));
    line("lambda_min", format_fixed(o.spectrum.lambda_min));
    line("principal_angle_deg", optional_angle(o.spectrum.principal_angle));
    line("minor_angle_deg", optional_angle(o.spectrum.minor_angle));
    line("intensity_sent", std::to_string(o.stage_intensities.sent));
    line("intensity_stage1", std::to_string(o.stage_intensities.after_stage1));
    line("intensity_stage2", std::to_string(o.stage_intensities.after_stage2));
    line("intensity_check", o.intensity_ok ? "true" : "false");
    line("eps_distance", format_general(o.thresholds.distance));
    line("eps_purity", format_general(o.thresholds.purity));
    line("rho_h0", format_matrix(o.rho_hypothesis_0));
    line("rho_h90", format_matrix(o.rho_hypothesis_90));
    line("rho_received", format_matrix(o.rho_received));
    return out;
}

std::string outcome_to_csv_row(const ProtocolOutcome& o) {
    return fmt::format("{},{},{},{},{},{},{},{},{}", to_string(o.decision), format_fixed(o.purity_received),
                       format_fixed(o.dist_to_h0), format_fixed(o.dist_to_h90), format_fixed(o.spectrum.lambda_max),
                       optional_angle(o.spectrum.principal_angle), o.stage_intensities.sent,
                       o.stage_intensities.after_stage1, o.stage_intensities.after_stage2);
}

}  // namespace isa
