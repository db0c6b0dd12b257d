// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.
// Usage: isa_acceptance [scratch_dir]

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "isa/cli.hpp"
#include "isa/polarization.hpp"
#include "isa/protocol.hpp"
#include "isa/sweep.hpp"
#include "isa/tomography.hpp"
#include "oracles.hpp"

using namespace isa;

namespace {

struct Verdict {
    bool pass;
    std::string detail;
};

std::filesystem::path g_scratch;

DensityMatrix pure_at(double degrees) { return density_of_pure(pure_state(normalize_angle(degrees))); }

DensityMatrix worked_mixture() {
    return ensemble_density({{{80, normalize_angle(30)}, {20, normalize_angle(45)}}});
}

ProtocolConfig worked_attack() {
    ProtocolConfig c;
    c.n_photons = 100;
    c.alice_angle = normalize_angle(30);
    c.bob_bit = Bit::Zero;
    c.eve = EveConfig{true, 10, 10, normalize_angle(45), true};
    c.mode = Mode::Exact;
    return c;
}

double angular_offset(double from, double to) {
    double d = std::fmod(to - from, 180.0);
    if (d <= -90.0) d += 180.0;
    if (d > 90.0) d -= 180.0;
    return d;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// 1. Worked-example matrix within 1e-3 entrywise.
Verdict worked_matrix() {
    const DensityMatrix rho = worked_mixture();
    const double err = std::max({std::abs(rho(0, 0).real() - 0.7), std::abs(rho(0, 1).real() - 0.4464),
                                 std::abs(rho(1, 0).real() - 0.4464), std::abs(rho(1, 1).real() - 0.3),
                                 std::abs(rho(0, 1).imag()), std::abs(rho(1, 0).imag())});
    return {err <= 1e-3, fmt::format("rho''={} max entry error {:.2e} (tol 1e-3)", format_matrix(rho), err)};
}

// 2. Eigenvalues {0.0108, 0.9892} within 5e-4; principal angle 32.93 +- 0.05 deg.
Verdict worked_spectrum() {
    const Spectrum s = eigendecompose(worked_mixture());
    const double angle = s.principal_angle ? s.principal_angle->degrees() : -1.0;
    const bool ok = std::abs(s.lambda_max - 0.9892) <= 5e-4 && std::abs(s.lambda_min - 0.0108) <= 5e-4 &&
                    std::abs(angle - 32.93) <= 0.05;
    return {ok, fmt::format("lambda=({:.6f}, {:.6f}) angle={:.4f} deg", s.lambda_max, s.lambda_min, angle)};
}

// 3. Stokes of the 45-degree projector is exactly (1, 1, 0, 0).
Verdict stokes_example() {
    const StokesVector s = stokes_from_density(DensityMatrix::real(0.5, 0.5, 0.5));
    const bool ok = s.s0 == 1.0 && s.s1 == 1.0 && s.s2 == 0.0 && s.s3 == 0.0;
    return {ok, fmt::format("S=({}, {}, {}, {})", s.s0, s.s1, s.s2, s.s3)};
}

// 4. The replacement attack keeps intensity but is caught by the state check.
Verdict attack_detection() {
    const ProtocolOutcome o = run_protocol(worked_attack());
    const bool ok = o.purity_received < 1 - 1e-6 && o.decision == Decision::EveDetected &&
                    intensity_check(o.stage_intensities);
    return {ok, fmt::format("purity={:.6f} decision={} intensities=({}, {}, {})", o.purity_received,
                            to_string(o.decision), o.stage_intensities.sent, o.stage_intensities.after_stage1,
                            o.stage_intensities.after_stage2)};
}

// 5. Sweep lambda_max equals the closed form within 1e-10 on the grid; the
//    closed form is first checked against brute-force ensembles.
Verdict oracle_equivalence() {
    const std::vector<double> deltas{7.5, 15.0, 30.0, 60.0, 90.0};
    const auto fractions = default_fraction_grid();
    double closed_vs_brute = 0.0;
    for (const double d : deltas) {
        for (const double f : fractions) {
            const auto m = oracle::brute_force_mixture({{1 - f, 30.0}, {f, 30.0 + d}});
            const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> solver(m);
            closed_vs_brute =
                std::max(closed_vs_brute, std::abs(closed_form_lambda_max(f, normalize_angle(d)) - solver.eigenvalues()(1)));
        }
    }
    const DeltaFamilyTable table = sweep_delta_family(deltas, normalize_angle(30), fractions, 100);
    double sweep_vs_closed = 0.0;
    for (const auto& row : table.rows) {
        sweep_vs_closed = std::max(sweep_vs_closed, std::abs(row.record.lambda_max -
                                                             closed_form_lambda_max(row.fraction, normalize_angle(row.delta_deg))));
    }
    const bool ok = closed_vs_brute <= 1e-10 && sweep_vs_closed <= 1e-10 && table.rows.size() == 55;
    return {ok, fmt::format("closed-form vs brute force {:.1e}, sweep vs closed form {:.1e} over {} points",
                            closed_vs_brute, sweep_vs_closed, table.rows.size())};
}

// 6. Figure-shape properties for fig4-fig11 and the delta-family ordering.
Verdict figure_shapes() {
    std::string failures;
    for (const auto& preset : kSiphonPresets) {
        const auto records = sweep_siphon(*siphon_preset(preset.name));
        const double gap = angular_offset(preset.theta_deg, preset.phi_deg);
        double previous_offset = 0.0;
        for (std::size_t i = 0; i < records.size(); ++i) {
            const auto& r = records[i];
            if (i > 0 && r.lambda_max > records[i - 1].lambda_max) {
                failures += fmt::format(" {}:lambda@{}", preset.name, r.siphon_total);
            }
            if (!r.peak_angle_deg) {
                failures += fmt::format(" {}:undefined-angle@{}", preset.name, r.siphon_total);
                continue;
            }
            const double offset = angular_offset(preset.theta_deg, *r.peak_angle_deg);
            if (offset * gap < previous_offset * gap - 1e-12 || std::abs(offset) > std::abs(gap) + 1e-12) {
                failures += fmt::format(" {}:angle@{}", preset.name, r.siphon_total);
            }
            previous_offset = offset;
        }
    }
    const auto fractions = default_fraction_grid();
    const DeltaFamilyTable family = sweep_delta_family(kDefaultDeltas, normalize_angle(kDefaultBaseTheta), fractions,
                                                       kDefaultFamilyPhotons);
    for (const double f : fractions) {
        if (f == 0.0) continue;
        for (std::size_t k = 1; k < std::size(kDefaultDeltas); ++k) {
            if (!(family.at(kDefaultDeltas[k], f).lambda_max < family.at(kDefaultDeltas[k - 1], f).lambda_max)) {
                failures += fmt::format(" delta-family:order@f={}", f);
            }
        }
    }
    return {failures.empty(), failures.empty() ? "8 siphon presets monotone, delta family ordered 7.5>15>30>60"
                                               : "violations:" + failures};
}

// 7. No attack: decision equals Bob's bit on a 1-degree grid, both bits.
Verdict no_attack_correctness() {
    int correct = 0;
    for (int theta = 0; theta < 180; ++theta) {
        for (const Bit bit : {Bit::Zero, Bit::One}) {
            ProtocolConfig c;
            c.n_photons = 100;
            c.alice_angle = normalize_angle(theta);
            c.bob_bit = bit;
            const Decision d = run_protocol(c).decision;
            correct += d == (bit == Bit::Zero ? Decision::Bit0 : Decision::Bit1);
        }
    }
    return {correct == 360, fmt::format("{}/360 correct", correct)};
}

// 8. Tomography at N = 1e5 per basis lands within 0.02 Frobenius in >= 99/100 trials.
Verdict tomography_convergence() {
    std::string detail;
    bool ok = true;
    const std::pair<const char*, DensityMatrix> states[] = {{"rho(30)", pure_at(30)}, {"mixture", worked_mixture()}};
    for (const auto& [name, rho] : states) {
        int within = 0;
        double worst = 0.0;
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            const double err = matrix_distance(reconstruct(simulate_counts(rho, TomographyConfig{100000, seed})), rho);
            worst = std::max(worst, err);
            within += err <= 0.02;
        }
        ok = ok && within >= 99;
        detail += fmt::format("{}: {}/100 (worst {:.4f}) ", name, within, worst);
    }
    return {ok, detail};
}

// 9. Property suites on 1000 randomized inputs each.
Verdict property_suites() {
    std::mt19937_64 gen(9090);
    std::uniform_real_distribution<double> uniform(-0.2, 0.2);
    int construction = 0, rejection = 0, round_trip = 0, residual = 0, rotation = 0;
    for (int i = 0; i < 1000; ++i) {
        const DensityMatrix rho = oracle::random_density(gen);
        const Eigen::Matrix2cd m = oracle::to_eigen(rho);
        const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> solver(m);
        construction += (m - m.adjoint()).norm() <= 1e-12 && std::abs(m.trace() - 1.0) <= 1e-12 &&
                        solver.eigenvalues()(0) >= -1e-10;
        // Breaking any one invariant must be rejected at construction.
        const double kick = 1e-3 + std::abs(uniform(gen));
        int rejected = 0;
        const auto rejects = [&](auto make) {
            try {
                make();
            } catch (const std::domain_error&) {
                ++rejected;
            }
        };
        rejects([&] { DensityMatrix(rho(0, 0) + kick, rho(0, 1), rho(1, 0), rho(1, 1)); });
        rejects([&] { DensityMatrix(rho(0, 0), rho(0, 1) + kick, rho(1, 0), rho(1, 1)); });
        rejects([&] {
            const double r = 0.5 + kick;  // push the Bloch vector outside the ball
            const StokesVector s = stokes_from_density(rho);
            const double n = std::sqrt(s.radius_squared()) + 1e-300;
            const Complex off(r * s.s1 / n, -r * s.s2 / n);
            DensityMatrix(0.5 + r * s.s3 / n, off, std::conj(off), 0.5 - r * s.s3 / n);
        });
        rejection += rejected == 3;

        round_trip += matrix_distance(density_from_stokes(stokes_from_density(rho)), rho) <= 1e-12;

        const Spectrum s = eigendecompose(rho);
        const Eigen::Vector2cd vmax(s.principal_vector[0], s.principal_vector[1]);
        const Eigen::Vector2cd vmin(s.minor_vector[0], s.minor_vector[1]);
        residual += (m * vmax - s.lambda_max * vmax).norm() < 1e-10 && (m * vmin - s.lambda_min * vmin).norm() < 1e-10;

        std::uniform_real_distribution<double> angle(0.0, 180.0);
        std::uniform_int_distribution<std::uint64_t> count(1, 1000);
        const PhotonEnsemble e{{{count(gen), normalize_angle(angle(gen))},
                                {count(gen), normalize_angle(angle(gen))},
                                {count(gen), normalize_angle(angle(gen))}}};
        const Spectrum before = eigendecompose(ensemble_density(e));
        const Spectrum after = eigendecompose(ensemble_density(rotate_ensemble(e, normalize_angle(angle(gen)))));
        rotation += std::abs(before.lambda_max - after.lambda_max) <= 1e-12 &&
                    std::abs(before.lambda_min - after.lambda_min) <= 1e-12;
    }
    const bool ok = construction == 1000 && rejection == 1000 && round_trip == 1000 && residual == 1000 &&
                    rotation == 1000;
    return {ok, fmt::format("invariants {}/1000, rejections {}/1000, round trip {}/1000, residuals {}/1000, "
                            "rotation {}/1000",
                            construction, rejection, round_trip, residual, rotation)};
}

// 10. Two exact fig4 sweeps through the CLI produce byte-identical CSV files.
Verdict sweep_reproducibility() {
    const auto a = g_scratch / "run_a";
    const auto b = g_scratch / "run_b";
    std::filesystem::remove_all(a);
    std::filesystem::remove_all(b);
    std::ostringstream out, err;
    const int code_a = cli::run({"sweep", "--preset", "fig4", "--mode", "exact", "--out", a.string()}, out, err);
    const int code_b = cli::run({"sweep", "--preset", "fig4", "--mode", "exact", "--out", b.string()}, out, err);
    const std::string csv_a = slurp(a / "fig4.csv");
    const std::string csv_b = slurp(b / "fig4.csv");
    const bool ok = code_a == 0 && code_b == 0 && !csv_a.empty() && csv_a == csv_b;
    return {ok, fmt::format("exit codes ({}, {}), {} bytes, identical={}", code_a, code_b, csv_a.size(),
                            csv_a == csv_b)};
}

}  // namespace

int main(int argc, char** argv) {
    g_scratch = argc > 1 ? std::filesystem::path(argv[1])
                         : std::filesystem::temp_directory_path() / "isa_acceptance";
    std::filesystem::create_directories(g_scratch);

    const std::pair<const char*, std::function<Verdict()>> criteria[] = {
        {"1 worked-example matrix", worked_matrix},
        {"2 worked-example spectrum", worked_spectrum},
        {"3 Stokes example", stokes_example},
        {"4 attack detection", attack_detection},
        {"5 oracle equivalence", oracle_equivalence},
        {"6 figure-shape properties", figure_shapes},
        {"7 no-attack correctness", no_attack_correctness},
        {"8 tomography convergence", tomography_convergence},
        {"9 property suites", property_suites},
        {"10 sweep reproducibility", sweep_reproducibility},
    };

    int failed = 0;
    for (const auto& [name, check] : criteria) {
        Verdict v{false, ""};
        try {
            v = check();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        failed += !v.pass;
        std::cout << (v.pass ? "PASS " : "FAIL ") << name << " | " << v.detail << "\n";
    }
    std::cout << (failed == 0 ? "all acceptance criteria passed" : fmt::format("{} criteria failed", failed)) << "\n";
    return failed == 0 ? 0 : 1;
}
