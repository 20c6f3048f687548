#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>

#include "slngeo/blockdiag.hpp"
#include "slngeo/families.hpp"
#include "slngeo/integrate.hpp"

namespace slngeo {

/// Malformed configuration (unparseable JSON, unknown family, missing keys).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

enum class ScenarioFamily { CustomPhase, CustomReduced, Linear, Exponential, BlockDiag, Preset };
enum class OutputFormat { Csv, Json };

struct PhaseParams { SquareMatrix A, Adot; };
struct ReducedParams { SquareMatrix beta, omega, zeta; };
struct LinearParams { SquareMatrix B, M; };
struct ExponentialParams { SquareMatrix B, C; };
struct BlockParams { BlockState state; };
struct PresetParams { int id = 1; };

/// One simulation request. Initial data always sits at t = 0; the window
/// [t_start, t_end] with t_start <= 0 <= t_end is covered by backward and
/// forward integration glued at 0.
struct ScenarioConfig {
    ScenarioFamily family = ScenarioFamily::CustomPhase;
    std::variant<PhaseParams, ReducedParams, LinearParams, ExponentialParams, BlockParams,
                 PresetParams> params = PresetParams{};
    IntegratorOptions integrator;
    double t_start = 0.0;
    double t_end = 10.0;
    OutputFormat format = OutputFormat::Csv;
    std::string output_path;  // file name under the output directory; defaulted per family
    std::string name;         // optional label, used by sweep
};

ScenarioConfig parse_scenario_config(const std::string& json_text);
ScenarioConfig load_scenario_config(const std::filesystem::path& path);

struct RunSummary {
    std::string name;
    std::string family;
    int dimension = 0;
    double t_start = 0.0, t_end = 0.0;
    std::size_t sample_count = 0;
    bool truncated = false;
    std::string truncation_reason;
    InvariantReport final_report;
    std::optional<std::string> classification;
    std::optional<CertificateReport> certificates;
    std::optional<BoundednessReport> boundedness;
    std::optional<double> detected_period;
    std::string output_file;

    std::string to_json() const;
    std::string to_text() const;
};

struct RunResult {
    int exit_code = 0;  // 0 ok, 4 truncated
    RunSummary summary;
};

/// Execute a scenario: integrate, write the trajectory file and
/// summary.json under out_dir, and return the summary. Throws ConfigError /
/// InvariantError for bad configs; truncation is reported via exit_code 4.
RunResult run_scenario(const ScenarioConfig& config, const std::filesystem::path& out_dir);

/// Window integration helpers (backward + forward glued at t = 0).
Trajectory integrate_window_phase(const PhaseState& init, double t_start, double t_end,
                                  const IntegratorOptions& opts);
Trajectory integrate_window_reduced(const ReducedState& init, double t_start, double t_end,
                                    const IntegratorOptions& opts);
BlockTrajectory integrate_window_block(const BlockState& init, double t_start, double t_end,
                                       const IntegratorOptions& opts);

/// Trajectory writers. Column order is fixed: t, the flattened state
/// (row-major), then energy, det_drift, zeta_drift, angmom_drift, sff,
/// virial_residual, trace_omega. The JSON mirror carries the same column
/// names plus the rows; numbers are printed with 17 significant digits so a
/// reparse is bit-exact.
void write_trajectory_csv(const Trajectory& traj, std::ostream& os);
void write_trajectory_json(const Trajectory& traj, std::ostream& os);

/// Block-coordinate trajectory: t, b0_*, b1_*, b2_*, w0_*, w1_*, w2_*,
/// (b_inf, w_inf when odd), energy, axis_1..axis_m with axis_i = b0_i^-1/2.
void write_block_csv(const BlockTrajectory& traj, std::ostream& os);
void write_block_json(const BlockTrajectory& traj, std::ostream& os);

struct ParsedTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};
ParsedTable parse_trajectory_json(const std::string& text);

/// Matrix literals as JSON arrays-of-arrays, row-major.
SquareMatrix parse_matrix_json(const std::string& text);
SquareMatrix load_matrix_file(const std::filesystem::path& path);

/// Classification verdict text for the CLI (`classify` subcommand).
std::string classify_line_text(const SquareMatrix& a0, const SquareMatrix& a1);
std::string classify_exponential_text(const SquareMatrix& b, const SquareMatrix& c);

/// Reproduce one of the published figure datasets: axis lengths against
/// time over the default window ([-20, 20] for 1 and 2, [-40, 40] for 3) or
/// an explicit override. Returns the written file path.
std::filesystem::path run_figure(int id, const std::filesystem::path& out_dir,
                                 std::optional<std::pair<double, double>> window = std::nullopt);

/// Run every scenario in a sweep config (JSON: {"scenarios": [...]}) across
/// worker threads; summaries are printed in scenario order. Returns the
/// worst exit code.
int run_sweep(const std::string& json_text, const std::filesystem::path& out_dir, std::ostream& os);

}  // namespace slngeo
