#pragma once

#include "tumorfb/error.hpp"
#include "tumorfb/full_solver.hpp"
#include "tumorfb/quasi.hpp"
#include "tumorfb/stationary.hpp"
#include "tumorfb/verification.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace tumorfb {

/// Malformed or inconsistent scenario configuration.
class ConfigError : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

enum class DataFamily { QuadraticCompatible, ComparisonProfile, QuarticBlend };

std::string_view to_string(DataFamily f);
DataFamily data_family_from_string(std::string_view name);

InitialData make_initial_data(DataFamily family, double R0, std::size_t n, double blend_centre,
                              const ModelParams& params, const SmoothingSpec& spec);

struct BifurcationConfig {
    ScanAxis axis = ScanAxis::Gamma;
    double lo = 0.25;
    double hi = 1.0;
    std::size_t samples = 16;
};

struct SimulateConfig {
    double R0 = 3.0;
    double t_end = 500.0;
    DataFamily family = DataFamily::ComparisonProfile;
    double blend_centre = 0.5;
    std::size_t data_samples = 201;
    std::vector<double> snapshot_times;
    SolverOpts solver;
    QuasiOptions quasi;
};

struct VerifyConfig {
    struct Bounds {
        double c = 1e-2;
        double R0 = 3.0;
        double t_end = 5.0;
        std::vector<DataFamily> families{DataFamily::QuadraticCompatible, DataFamily::ComparisonProfile,
                                         DataFamily::QuarticBlend};
    } bounds;
    struct Matrix {
        double c = 1e-3;
        double t_end = 2000.0;
        double small_c = 1e-2;
        double tol_conv_full = 1e-3;
        std::size_t random_samples = 10; ///< per side of R_s1 at c = 0, drawn with the seed
        std::optional<std::vector<OutcomeCase>> cases;
    } matrix;
    struct Scaling {
        double R0 = 3.0;
        double t_end = 10.0;
        std::vector<double> c_values{0.1, 0.05, 0.025, 0.0125};
        std::size_t samples = 41;
    } scaling;
    struct Convergence {
        double R0 = 3.0;
        double t_end = 2.0;
        double c = 0.1;
        std::size_t n_coarse = 101;
        double dt_coarse = 0.04;
    } convergence;
    struct Monotonicity {
        double lo = 0.25;
        double hi = 1.0;
        double sigma_tilde = 0.3;
        std::size_t samples = 16;
    } monotonicity;
    SolverOpts solver;
};

/// Everything a command needs. The verify suite works in the scaled frame
/// (lambda = sigma_bar = 1); the other commands take user units.
struct ScenarioConfig {
    ModelParams params;
    SmoothingKind smoothing = SmoothingKind::CubicSmoothstep;
    BifurcationConfig bifurcation;
    SimulateConfig simulate;
    VerifyConfig verify;
    std::string output = "out";
    unsigned parallel = 1;
    std::uint64_t seed = 0;

    [[nodiscard]] SmoothingSpec spec() const { return SmoothingSpec::for_gamma(params.gamma, smoothing); }
};

/// Unknown keys and wrongly typed values are rejected with their path.
ScenarioConfig parse_config(const nlohmann::json& doc);
ScenarioConfig load_config(const std::filesystem::path& path);

/// Full configuration including every defaulted option; parses back to
/// an equivalent ScenarioConfig.
nlohmann::ordered_json to_json(const ScenarioConfig& cfg);

nlohmann::ordered_json to_json(const VerificationReport& report);

/// Shortest decimal form that round-trips the double.
std::string format_double(double v);

int cmd_stationary(const ScenarioConfig& cfg, std::ostream& log);
int cmd_bifurcation(const ScenarioConfig& cfg, std::ostream& log);
int cmd_simulate(const ScenarioConfig& cfg, std::ostream& log);
int cmd_verify(const ScenarioConfig& cfg, std::ostream& log);

/// The verify suite without any file output.
VerificationReport run_verification_suite(const ScenarioConfig& cfg);

} // namespace tumorfb
