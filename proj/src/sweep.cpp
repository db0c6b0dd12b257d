#include "isa/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <fmt/format.h>

#include "isa/text.hpp"
#include "isa/tomography.hpp"

namespace isa {

namespace {

SweepRecord record_from(std::uint64_t siphon_total, const ProtocolOutcome& outcome) {
    SweepRecord r;
    r.siphon_total = siphon_total;
    r.lambda_max = outcome.spectrum.lambda_max;
    if (outcome.spectrum.principal_angle) {
        r.peak_angle_deg = outcome.spectrum.principal_angle->degrees();
    }
    r.purity = outcome.purity_received;
    r.detected = outcome.decision == Decision::EveDetected;
    return r;
}

ProtocolConfig attack_config(PolarizationAngle theta, PolarizationAngle phi, Bit bit, std::uint64_t n_photons,
                             std::uint64_t stage1, std::uint64_t stage2) {
    ProtocolConfig config;
    config.n_photons = n_photons;
    config.alice_angle = theta;
    config.bob_bit = bit;
    config.eve.enabled = true;
    config.eve.siphon_stage1 = stage1;
    config.eve.siphon_stage2 = stage2;
    config.eve.injection_angle = phi;
    return config;
}

std::string record_fields(const SweepRecord& r) {
    return fmt::format("{},{},{},{},{}", r.siphon_total, format_fixed(r.lambda_max), format_fixed(r.peak_angle_deg),
                       format_fixed(r.purity), r.detected ? "true" : "false");
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

}  // namespace

void validate(const SweepSpec& spec) {
    if (spec.n_photons == 0) {
        throw std::domain_error("n_photons must be positive");
    }
    for (std::size_t i = 0; i < spec.siphon_totals.size(); ++i) {
        const std::uint64_t total = spec.siphon_totals[i];
        if (total % 2 != 0) {
            throw std::domain_error(fmt::format("siphon total {} is odd; totals are split evenly across both legs", total));
        }
        if (total > spec.n_photons) {
            throw std::domain_error(fmt::format("siphon total {} exceeds the {} photons sent", total, spec.n_photons));
        }
        if (i > 0 && total <= spec.siphon_totals[i - 1]) {
            throw std::domain_error("siphon totals must be strictly increasing");
        }
    }
}

std::uint64_t point_seed(std::uint64_t seed, std::uint64_t siphon_total) {
    return splitmix64(seed ^ splitmix64(siphon_total));
}

std::vector<SweepRecord> sweep_siphon(const SweepSpec& spec) {
    validate(spec);
    std::vector<SweepRecord> records;
    records.reserve(spec.siphon_totals.size());
    for (const std::uint64_t total : spec.siphon_totals) {
        ProtocolConfig config = attack_config(spec.theta, spec.phi, spec.bob_bit, spec.n_photons, total / 2, total / 2);
        config.mode = spec.mode;
        config.tomography.photons_per_basis = spec.photons_per_basis;
        config.tomography.seed = point_seed(spec.seed, total);
        records.push_back(record_from(total, run_protocol(config)));
    }
    return records;
}

double closed_form_lambda_max(double fraction, PolarizationAngle delta) {
    if (!(fraction >= 0.0 && fraction <= 1.0)) {
        throw std::domain_error(fmt::format("fraction {} outside [0, 1]", fraction));
    }
    const double s = std::sin(delta.radians());
    return 0.5 * (1.0 + std::sqrt(1.0 - 4.0 * fraction * (1.0 - fraction) * s * s));
}

std::vector<double> default_fraction_grid() {
    std::vector<double> grid;
    for (int i = 0; i <= 10; ++i) {
        grid.push_back(0.05 * i);
    }
    return grid;
}

const SweepRecord& DeltaFamilyTable::at(double delta_deg, double fraction) const {
    for (const auto& row : rows) {
        if (std::abs(row.delta_deg - delta_deg) < 1e-9 && std::abs(row.fraction - fraction) < 1e-9) {
            return row.record;
        }
    }
    throw std::out_of_range(fmt::format("no delta-family point at delta={} fraction={}", delta_deg, fraction));
}

DeltaFamilyTable sweep_delta_family(std::span<const double> deltas_deg, PolarizationAngle base_theta,
                                    std::span<const double> fractions, std::uint64_t n_photons) {
    if (deltas_deg.empty()) {
        throw std::domain_error("delta family needs at least one delta");
    }
    if (n_photons == 0) {
        throw std::domain_error("n_photons must be positive");
    }
    DeltaFamilyTable table;
    for (const double delta : deltas_deg) {
        const PolarizationAngle phi = normalize_angle(base_theta.degrees() + delta);
        for (const double fraction : fractions) {
            if (!(fraction >= 0.0 && fraction <= 0.5)) {
                throw std::domain_error(fmt::format("fraction {} outside [0, 0.5]", fraction));
            }
            const double exact_total = fraction * static_cast<double>(n_photons);
            const double rounded = std::round(exact_total);
            if (std::abs(exact_total - rounded) > 1e-9) {
                throw std::domain_error(
                    fmt::format("fraction {} of {} photons is not a whole photon count", fraction, n_photons));
            }
            const auto total = static_cast<std::uint64_t>(rounded);
            const ProtocolConfig config =
                attack_config(base_theta, phi, Bit::Zero, n_photons, total / 2, total - total / 2);
            table.rows.push_back({delta, fraction, record_from(total, run_protocol(config))});
        }
    }
    return table;
}

std::string sweep_to_csv(std::span<const SweepRecord> records) {
    std::string out(kSweepCsvHeader);
    out += '\n';
    for (const auto& r : records) {
        out += record_fields(r);
        out += '\n';
    }
    return out;
}

std::string delta_family_to_csv(const DeltaFamilyTable& table) {
    std::string out(kDeltaFamilyCsvHeader);
    out += '\n';
    for (const auto& row : table.rows) {
        out += fmt::format("{},{},{}\n", format_fixed(row.delta_deg), format_fixed(row.fraction),
                           record_fields(row.record));
    }
    return out;
}

void write_text_file(const std::filesystem::path& path, std::string_view contents) {
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) {
        throw std::runtime_error(fmt::format("cannot open '{}' for writing", path.string()));
    }
    file.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    file.close();
    if (!file) {
        throw std::runtime_error(fmt::format("failed writing '{}'", path.string()));
    }
}

void write_csv(std::span<const SweepRecord> records, const std::filesystem::path& path) {
    write_text_file(path, sweep_to_csv(records));
}

std::string sweep_metadata(std::string_view name, const SweepSpec& spec) {
    std::string totals;
    for (std::size_t i = 0; i < spec.siphon_totals.size(); ++i) {
        totals += (i ? "," : "") + std::to_string(spec.siphon_totals[i]);
    }
    std::string out;
    out += fmt::format("name={}\n", name);
    out += fmt::format("theta_deg={}\n", format_general(spec.theta.degrees()));
    out += fmt::format("phi_deg={}\n", format_general(spec.phi.degrees()));
    out += fmt::format("bob_bit={}\n", static_cast<int>(spec.bob_bit));
    out += fmt::format("n_photons={}\n", spec.n_photons);
    out += fmt::format("siphon_totals={}\n", totals);
    out += "siphon_total_meaning=photons siphoned across both legs\n";
    out += "stage_split=total/2 on the outbound leg, total/2 on the return leg\n";
    out += fmt::format("mode={}\n", to_string(spec.mode));
    out += fmt::format("seed={}\n", spec.seed);
    out += fmt::format("photons_per_basis={}\n", spec.mode == Mode::Sampled ? std::to_string(spec.photons_per_basis) : "");
    out += fmt::format("generator={}\n", kGeneratorId);
    return out;
}

std::optional<SweepSpec> siphon_preset(std::string_view name) {
    const auto* it = std::find_if(std::begin(kSiphonPresets), std::end(kSiphonPresets),
                                  [name](const SiphonPreset& p) { return p.name == name; });
    if (it == std::end(kSiphonPresets)) {
        return std::nullopt;
    }
    SweepSpec spec;
    spec.theta = normalize_angle(it->theta_deg);
    spec.phi = normalize_angle(it->phi_deg);
    spec.n_photons = 100;
    for (std::uint64_t total = 0; total <= 50; total += 2) {
        spec.siphon_totals.push_back(total);
    }
    return spec;
}

bool is_delta_family_preset(std::string_view name) {
    return std::find(std::begin(kDeltaFamilyPresets), std::end(kDeltaFamilyPresets), name) !=
           std::end(kDeltaFamilyPresets);
}

}  // namespace isa
