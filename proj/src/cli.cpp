#include "isa/cli.hpp"

#include <charconv>
#include <chrono>
#include <ostream>
#include <stdexcept>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "isa/polarization.hpp"
#include "isa/protocol.hpp"
#include "isa/sweep.hpp"
#include "isa/text.hpp"
#include "isa/tomography.hpp"

namespace isa::cli {

namespace {

// Invalid flag combinations that CLI11 cannot express; reported as usage errors.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct ProtocolFlags {
    double theta = 0.0;
    int bit = 0;
    std::uint64_t photons = 0;
    std::uint64_t siphon1 = 0;
    std::uint64_t siphon2 = 0;
    double eve_angle = 0.0;
    bool no_reinject = false;
    std::string mode = "exact";
    std::uint64_t seed = 0;
    std::uint64_t photons_per_basis = 100000;
    double eps_distance = 0.0;
    double eps_purity = 0.0;
    std::string out;
};

struct SweepFlags {
    std::string preset;
    double theta = 0.0;
    double phi = 0.0;
    std::vector<std::uint64_t> totals;
    int bit = 0;
    std::uint64_t photons = 100;
    std::string name = "sweep";
    std::string out;
    std::string mode = "exact";
    std::uint64_t seed = 0;
    std::uint64_t photons_per_basis = 100000;
};

struct TomographyFlags {
    double theta = 0.0;
    std::string mix;
    std::uint64_t photons_per_basis = 0;
    std::uint64_t seed = 0;
    std::string out;
};

PhotonEnsemble parse_mixture(const std::string& text) {
    PhotonEnsemble ensemble;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t comma = std::min(text.find(',', start), text.size());
        const std::string_view item(text.data() + start, comma - start);
        const std::size_t at = item.find('@');
        if (at == std::string_view::npos) {
            throw UsageError(fmt::format("mixture entry '{}' is not of the form count@degrees", item));
        }
        std::uint64_t count = 0;
        double degrees = 0.0;
        const auto count_end = item.data() + at;
        const auto [cp, cec] = std::from_chars(item.data(), count_end, count);
        const auto [dp, dec] = std::from_chars(count_end + 1, item.data() + item.size(), degrees);
        if (cec != std::errc{} || cp != count_end || dec != std::errc{} || dp != item.data() + item.size() ||
            at == 0) {
            throw UsageError(fmt::format("mixture entry '{}' is not of the form count@degrees", item));
        }
        ensemble.components.push_back({count, normalize_angle(degrees)});
        start = comma + 1;
    }
    if (ensemble.total() == 0) {
        throw UsageError("mixture has no photons");
    }
    return ensemble;
}

std::string join(const std::vector<std::uint64_t>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        out += (i ? "," : "") + std::to_string(values[i]);
    }
    return out;
}

std::string with_suffix(const std::filesystem::path& path, std::string_view suffix) {
    return path.string() + std::string(suffix);
}

void write_manifest(const std::filesystem::path& path, const RunManifest& manifest) {
    write_text_file(path, manifest_to_text(manifest));
}

int cmd_protocol(const ProtocolFlags& f, bool eve_requested, bool angle_given, bool eps_dist_given,
                 bool eps_purity_given, std::ostream& out) {
    const auto start = Clock::now();
    if (eve_requested && !angle_given && !f.no_reinject) {
        throw UsageError("--eve-angle is required when Eve reinjects photons");
    }

    ProtocolConfig config;
    config.n_photons = f.photons;
    config.alice_angle = normalize_angle(f.theta);
    config.bob_bit = f.bit == 0 ? Bit::Zero : Bit::One;
    config.eve.enabled = eve_requested;
    config.eve.siphon_stage1 = f.siphon1;
    config.eve.siphon_stage2 = f.siphon2;
    config.eve.injection_angle = normalize_angle(f.eve_angle);
    config.eve.reinject = !f.no_reinject;
    config.mode = parse_mode(f.mode);
    config.tomography.photons_per_basis = f.photons_per_basis;
    config.tomography.seed = f.seed;
    if (eps_dist_given) {
        config.epsilon_distance = f.eps_distance;
    }
    if (eps_purity_given) {
        config.epsilon_purity = f.eps_purity;
    }

    const ProtocolOutcome outcome = run_protocol(config);
    out << outcome_to_key_value(outcome);

    if (!f.out.empty()) {
        const std::filesystem::path csv_path(f.out);
        write_text_file(csv_path, fmt::format("{}\n{}\n", kOutcomeCsvHeader, outcome_to_csv_row(outcome)));
        RunManifest manifest;
        manifest.subcommand = "protocol";
        manifest.parameters = {
            {"theta", format_general(config.alice_angle.degrees())},
            {"bit", std::to_string(f.bit)},
            {"photons", std::to_string(f.photons)},
            {"eve", eve_requested ? "true" : "false"},
            {"eve_siphon1", std::to_string(f.siphon1)},
            {"eve_siphon2", std::to_string(f.siphon2)},
            {"eve_angle", format_general(config.eve.injection_angle.degrees())},
            {"eve_reinject", config.eve.reinject ? "true" : "false"},
            {"mode", std::string(to_string(config.mode))},
            {"photons_per_basis", std::to_string(f.photons_per_basis)},
            {"eps_distance", format_general(outcome.thresholds.distance)},
            {"eps_purity", format_general(outcome.thresholds.purity)},
        };
        manifest.seed = f.seed;
        manifest.outputs = {csv_path};
        manifest.duration_seconds = seconds_since(start);
        write_manifest(with_suffix(csv_path, ".manifest"), manifest);
    }
    return 0;
}

int cmd_sweep(const SweepFlags& f, bool preset_given, bool explicit_given, std::ostream& out) {
    const auto start = Clock::now();
    if (preset_given == explicit_given) {
        throw UsageError("give either --preset or all of --theta, --phi and --totals");
    }
    const std::filesystem::path dir(f.out);
    std::filesystem::create_directories(dir);

    RunManifest manifest;
    manifest.subcommand = "sweep";
    manifest.seed = f.seed;

    if (preset_given && is_delta_family_preset(f.preset)) {
        if (parse_mode(f.mode) != Mode::Exact) {
            throw UsageError("delta-family presets run in exact mode only");
        }
        const auto fractions = default_fraction_grid();
        const DeltaFamilyTable table =
            sweep_delta_family(kDefaultDeltas, normalize_angle(kDefaultBaseTheta), fractions, kDefaultFamilyPhotons);

        const auto csv_path = dir / (f.preset + ".csv");
        const auto meta_path = dir / (f.preset + ".meta.txt");
        write_text_file(csv_path, delta_family_to_csv(table));
        std::string meta = fmt::format("name={}\nbase_theta_deg={}\nphi=base_theta+delta\n", f.preset,
                                       format_general(kDefaultBaseTheta));
        meta += fmt::format("deltas_deg=7.5,15,30,60\nfractions=0,0.05,...,0.5\nn_photons={}\n", kDefaultFamilyPhotons);
        meta += "stage_split=floor(total/2) outbound, remainder on return\nmode=exact\nbob_bit=0\n";
        meta += fmt::format("generator={}\n", kGeneratorId);
        write_text_file(meta_path, meta);

        for (const double delta : kDefaultDeltas) {
            const double at_half = table.at(delta, 0.5).lambda_max;
            out << fmt::format("{} delta={}: {} points, lambda_max 1.000000 -> {} at fraction 0.5\n", f.preset,
                               format_general(delta), fractions.size(), format_fixed(at_half));
        }
        manifest.parameters = {{"preset", f.preset}, {"mode", "exact"}};
        manifest.outputs = {csv_path, meta_path};
        manifest.duration_seconds = seconds_since(start);
        write_manifest(dir / (f.preset + ".manifest"), manifest);
        return 0;
    }

    SweepSpec spec;
    std::string name = f.name;
    if (preset_given) {
        const auto preset = siphon_preset(f.preset);
        if (!preset) {
            throw UsageError(fmt::format("unknown preset '{}'", f.preset));
        }
        spec = *preset;
        name = f.preset;
    } else {
        spec.theta = normalize_angle(f.theta);
        spec.phi = normalize_angle(f.phi);
        spec.siphon_totals = f.totals;
        spec.n_photons = f.photons;
        spec.bob_bit = f.bit == 0 ? Bit::Zero : Bit::One;
    }
    spec.mode = parse_mode(f.mode);
    spec.seed = f.seed;
    spec.photons_per_basis = f.photons_per_basis;

    const auto records = sweep_siphon(spec);
    const auto csv_path = dir / (name + ".csv");
    const auto meta_path = dir / (name + ".meta.txt");
    write_csv(records, csv_path);
    write_text_file(meta_path, sweep_metadata(name, spec));

    out << fmt::format("{}: theta={} phi={} {} points, lambda_max {} -> {}, wrote {}\n", name,
                       format_general(spec.theta.degrees()), format_general(spec.phi.degrees()), records.size(),
                       records.empty() ? "" : format_fixed(records.front().lambda_max),
                       records.empty() ? "" : format_fixed(records.back().lambda_max), csv_path.string());

    manifest.parameters = {
        {"preset", preset_given ? f.preset : ""},
        {"name", name},
        {"theta", format_general(spec.theta.degrees())},
        {"phi", format_general(spec.phi.degrees())},
        {"totals", join(spec.siphon_totals)},
        {"bit", std::to_string(static_cast<int>(spec.bob_bit))},
        {"photons", std::to_string(spec.n_photons)},
        {"mode", std::string(to_string(spec.mode))},
        {"photons_per_basis", std::to_string(spec.photons_per_basis)},
    };
    manifest.outputs = {csv_path, meta_path};
    manifest.duration_seconds = seconds_since(start);
    write_manifest(dir / (name + ".manifest"), manifest);
    return 0;
}

int cmd_tomography(const TomographyFlags& f, bool theta_given, bool mix_given, std::ostream& out) {
    const auto start = Clock::now();
    if (theta_given == mix_given) {
        throw UsageError("give exactly one of --theta or --mix");
    }
    const PhotonEnsemble ensemble =
        mix_given ? parse_mixture(f.mix) : PhotonEnsemble{{{1, normalize_angle(f.theta)}}};
    const DensityMatrix truth = ensemble_density(ensemble);

    TomographyConfig config;
    config.photons_per_basis = f.photons_per_basis;
    config.seed = f.seed;
    const MeasurementCounts counts = simulate_counts(truth, config);
    const StokesVector s = stokes_estimate(counts);
    const DensityMatrix rho = reconstruct(counts);
    const Spectrum spec = eigendecompose(rho);
    const auto angle = [](const std::optional<PolarizationAngle>& a) {
        return a ? format_fixed(a->degrees()) : std::string{};
    };

    out << fmt::format("n_h={}\nn_v={}\nn_d={}\nn_a={}\nn_r={}\nn_l={}\n", counts.n_h, counts.n_v, counts.n_d,
                       counts.n_a, counts.n_r, counts.n_l);
    out << fmt::format("s0={}\ns1={}\ns2={}\ns3={}\n", format_fixed(s.s0), format_fixed(s.s1), format_fixed(s.s2),
                       format_fixed(s.s3));
    out << fmt::format("rho_true={}\n", format_matrix(truth));
    out << fmt::format("rho_reconstructed={}\n", format_matrix(rho));
    out << fmt::format("distance_to_true={}\n", format_fixed(matrix_distance(rho, truth)));
    out << fmt::format("purity={}\n", format_fixed(purity(rho)));
    out << fmt::format("lambda_max={}\nlambda_min={}\n", format_fixed(spec.lambda_max), format_fixed(spec.lambda_min));
    out << fmt::format("principal_angle_deg={}\nminor_angle_deg={}\n", angle(spec.principal_angle),
                       angle(spec.minor_angle));
    out << fmt::format("generator={}\nseed={}\n", kGeneratorId, f.seed);

    if (!f.out.empty()) {
        const std::filesystem::path csv_path(f.out);
        write_text_file(csv_path, counts_to_csv(counts));
        RunManifest manifest;
        manifest.subcommand = "tomography";
        std::string mixture;
        for (const auto& c : ensemble.components) {
            mixture += fmt::format("{}{}@{}", mixture.empty() ? "" : ",", c.count, format_general(c.angle.degrees()));
        }
        manifest.parameters = {{"mix", mixture}, {"photons_per_basis", std::to_string(f.photons_per_basis)}};
        manifest.seed = f.seed;
        manifest.outputs = {csv_path};
        manifest.duration_seconds = seconds_since(start);
        write_manifest(with_suffix(csv_path, ".manifest"), manifest);
    }
    return 0;
}

}  // namespace

std::string manifest_to_text(const RunManifest& m) {
    std::string out;
    out += fmt::format("revision={}\n", kRevision);
    out += fmt::format("subcommand={}\n", m.subcommand);
    for (const auto& [key, value] : m.parameters) {
        out += fmt::format("param.{}={}\n", key, value);
    }
    out += fmt::format("seed={}\n", m.seed);
    out += fmt::format("generator={}\n", kGeneratorId);
    for (const auto& path : m.outputs) {
        out += fmt::format("output={}\n", path.string());
    }
    out += fmt::format("duration_seconds={:.6f}\n", m.duration_seconds);
    return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Intensity-and-state-aware polarization protocol simulator", "isa_sim"};
    app.require_subcommand(1);
    const std::vector<std::string> modes{"exact", "sampled"};

    ProtocolFlags pf;
    auto* protocol = app.add_subcommand("protocol", "Run one protocol transmission and print the outcome");
    protocol->add_option("--theta", pf.theta, "Alice's polarization angle in degrees")->required();
    protocol->add_option("--bit", pf.bit, "Bob's bit: 0 (no rotation) or 1 (90 degree rotation)")
        ->required()
        ->check(CLI::IsMember({0, 1}));
    protocol->add_option("--photons", pf.photons, "Photons Alice sends")->required()->check(CLI::PositiveNumber);
    auto* siphon1 = protocol->add_option("--eve-siphon1", pf.siphon1, "Photons Eve siphons on the outbound leg");
    auto* siphon2 = protocol->add_option("--eve-siphon2", pf.siphon2, "Photons Eve siphons on the return leg");
    auto* eve_angle = protocol->add_option("--eve-angle", pf.eve_angle, "Polarization of Eve's injected photons (degrees)");
    auto* no_reinject =
        protocol->add_flag("--no-reinject", pf.no_reinject, "Eve removes photons without replacing them");
    protocol->add_option("--mode", pf.mode, "exact or sampled (tomography from simulated counts)")
        ->check(CLI::IsMember(modes));
    protocol->add_option("--seed", pf.seed, "Seed for sampled-mode tomography");
    protocol->add_option("--photons-per-basis", pf.photons_per_basis, "Tomography photons per basis (sampled mode)")
        ->check(CLI::PositiveNumber);
    auto* eps_dist = protocol->add_option("--eps-distance", pf.eps_distance, "Override the hypothesis-match distance");
    auto* eps_purity = protocol->add_option("--eps-purity", pf.eps_purity, "Override the purity tolerance");
    protocol->add_option("--out", pf.out, "Write the outcome CSV row here (plus <path>.manifest)");

    SweepFlags sf;
    auto* sweep = app.add_subcommand("sweep", "Sweep peak intensity and angle over Eve's siphon count");
    auto* preset = sweep->add_option("--preset", sf.preset, "fig4 ... fig13 or delta-family");
    auto* theta = sweep->add_option("--theta", sf.theta, "Alice's angle in degrees");
    auto* phi = sweep->add_option("--phi", sf.phi, "Eve's angle in degrees");
    auto* totals = sweep->add_option("--totals", sf.totals, "Comma-separated even siphon totals")->delimiter(',');
    sweep->add_option("--bit", sf.bit, "Bob's bit")->check(CLI::IsMember({0, 1}));
    sweep->add_option("--photons", sf.photons, "Photons Alice sends")->check(CLI::PositiveNumber);
    sweep->add_option("--name", sf.name, "Base file name for explicit sweeps");
    sweep->add_option("--out", sf.out, "Output directory")->required();
    sweep->add_option("--mode", sf.mode, "exact or sampled")->check(CLI::IsMember(modes));
    sweep->add_option("--seed", sf.seed, "Base seed; each point derives its own");
    sweep->add_option("--photons-per-basis", sf.photons_per_basis, "Tomography photons per basis (sampled mode)")
        ->check(CLI::PositiveNumber);
    preset->excludes(theta)->excludes(phi)->excludes(totals);

    TomographyFlags tf;
    auto* tomography = app.add_subcommand("tomography", "Simulate counts and reconstruct a density matrix");
    auto* tomo_theta = tomography->add_option("--theta", tf.theta, "Pure state angle in degrees");
    auto* mix = tomography->add_option("--mix", tf.mix, "Mixture as count@degrees,count@degrees,...");
    tomography->add_option("--photons-per-basis", tf.photons_per_basis, "Photons measured per basis")
        ->required()
        ->check(CLI::PositiveNumber);
    tomography->add_option("--seed", tf.seed, "Generator seed")->required();
    tomography->add_option("--out", tf.out, "Write the counts CSV here (plus <path>.manifest)");

    std::vector<const char*> argv{"isa_sim"};
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }

    CLI::App* active = &app;
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
        if (protocol->parsed()) {
            active = protocol;
            const bool eve = siphon1->count() + siphon2->count() + eve_angle->count() + no_reinject->count() > 0;
            return cmd_protocol(pf, eve, eve_angle->count() > 0, eps_dist->count() > 0, eps_purity->count() > 0, out);
        }
        if (sweep->parsed()) {
            active = sweep;
            const bool explicit_given = theta->count() + phi->count() + totals->count() > 0;
            if (explicit_given && (theta->count() == 0 || phi->count() == 0 || totals->count() == 0)) {
                throw UsageError("explicit sweeps need --theta, --phi and --totals");
            }
            return cmd_sweep(sf, preset->count() > 0, explicit_given, out);
        }
        active = tomography;
        return cmd_tomography(tf, tomo_theta->count() > 0, mix->count() > 0, out);
    } catch (const CLI::CallForHelp&) {
        for (auto* sub : app.get_subcommands()) {
            active = sub;
        }
        out << active->help();
        return 0;
    } catch (const CLI::ParseError& e) {
        for (auto* sub : app.get_subcommands()) {
            active = sub;
        }
        err << "error: " << e.what() << "\n\n" << active->help();
        return 2;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n\n" << active->help();
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace isa::cli
