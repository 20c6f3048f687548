// Scenario runner for geodesic flows of the Hilbert-Schmidt metric on the
// unit-determinant group: integrates custom/linear/exponential/block-diagonal
// initial data, classifies candidate geodesics, and reproduces the published
// block-diagonal figure datasets as CSV.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "slngeo/scenario.hpp"

namespace {

int run_command(const std::string& config_path, const std::string& out_dir) {
    const slngeo::ScenarioConfig config = slngeo::load_scenario_config(config_path);
    const slngeo::RunResult result = slngeo::run_scenario(config, out_dir);
    std::cout << result.summary.to_text() << "\n";
    return result.exit_code;
}

int classify_command(const std::string& kind, const std::string& a_path, const std::string& b_path) {
    const slngeo::SquareMatrix a = slngeo::load_matrix_file(a_path);
    const slngeo::SquareMatrix b = slngeo::load_matrix_file(b_path);
    if (kind == "line")
        std::cout << slngeo::classify_line_text(a, b) << "\n";
    else
        std::cout << slngeo::classify_exponential_text(a, b) << "\n";
    return 0;
}

int figures_command(int id, const std::string& out_dir, const std::vector<double>& span) {
    std::optional<std::pair<double, double>> window;
    if (!span.empty()) {
        if (span.size() != 2 || !(span[0] < span[1]))
            throw slngeo::ConfigError("--t-span needs two values t_start < t_end");
        window = {span[0], span[1]};
    }
    const auto path = slngeo::run_figure(id, out_dir, window);
    std::cout << "wrote " << path.string() << "\n";
    return 0;
}

int sweep_command(const std::string& config_path, const std::string& out_dir) {
    std::ifstream in(config_path);
    if (!in) throw slngeo::ConfigError("cannot open sweep config " + config_path);
    std::stringstream ss;
    ss << in.rdbuf();
    return slngeo::run_sweep(ss.str(), out_dir, std::cout);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"geodesic flows on the unit-determinant matrix group"};
    app.require_subcommand(1);

    std::string config_path, out_dir = ".", kind = "exp", a_path, b_path;
    int figure_id = 1;
    std::vector<double> t_span;

    auto* run = app.add_subcommand("run", "integrate one scenario from a JSON config");
    run->add_option("--config", config_path, "scenario config file")->required();
    run->add_option("--out", out_dir, "output directory (default .)");

    auto* classify = app.add_subcommand("classify", "classify candidate line/exponential geodesics");
    classify->add_option("--kind", kind, "line or exp")->check(CLI::IsMember({"line", "exp"}))->required();
    classify->add_option("--a", a_path, "first matrix (JSON rows), A0 or B")->required();
    classify->add_option("--b", b_path, "second matrix (JSON rows), A1 or C")->required();

    auto* figures = app.add_subcommand("figures", "emit the published figure datasets");
    figures->add_option("--id", figure_id, "figure id (1, 2 or 3)")->check(CLI::Range(1, 3))->required();
    figures->add_option("--out", out_dir, "output directory (default .)");
    figures->add_option("--t-span", t_span, "override window: t_start t_end")->expected(2);

    auto* sweep = app.add_subcommand("sweep", "run an ensemble of scenarios");
    sweep->add_option("--config", config_path, "sweep config file with a scenarios array")->required();
    sweep->add_option("--out", out_dir, "output directory (default .)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return run_command(config_path, out_dir);
        if (classify->parsed()) return classify_command(kind, a_path, b_path);
        if (figures->parsed()) return figures_command(figure_id, out_dir, t_span);
        if (sweep->parsed()) return sweep_command(config_path, out_dir);
    } catch (const slngeo::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const slngeo::InvariantError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
