#include "slngeo/scenario.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <future>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace slngeo {

namespace {

using nlohmann::json;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

SquareMatrix matrix_from_json(const json& j, const std::string& what) {
    if (!j.is_array() || j.empty())
        throw ConfigError(what + ": expected a JSON array of rows");
    const int n = static_cast<int>(j.size());
    std::vector<double> data;
    data.reserve(static_cast<std::size_t>(n) * n);
    for (const auto& row : j) {
        if (!row.is_array() || static_cast<int>(row.size()) != n)
            throw ConfigError(what + ": rows must all have length " + std::to_string(n));
        for (const auto& v : row) {
            if (!v.is_number()) throw ConfigError(what + ": entries must be numbers");
            data.push_back(v.get<double>());
        }
    }
    try {
        return SquareMatrix(n, std::move(data));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(what + ": " + e.what());
    }
}

std::vector<double> vector_from_json(const json& j, const std::string& what, std::size_t len) {
    if (!j.is_array() || j.size() != len)
        throw ConfigError(what + ": expected an array of length " + std::to_string(len));
    std::vector<double> out;
    out.reserve(len);
    for (const auto& v : j) {
        if (!v.is_number()) throw ConfigError(what + ": entries must be numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

BlockState block_state_from_json(const json& p) {
    BlockState s;
    if (!p.contains("m")) throw ConfigError("blockdiag params: missing \"m\"");
    s.m = p.at("m").get<int>();
    if (s.m < 1) throw ConfigError("blockdiag params: m must be >= 1");
    const std::string parity = p.value("parity", "even");
    if (parity == "even") s.parity = BlockParity::Even;
    else if (parity == "odd") s.parity = BlockParity::Odd;
    else throw ConfigError("blockdiag params: parity must be \"even\" or \"odd\"");

    const auto mz = static_cast<std::size_t>(s.m);
    const auto get_vec = [&](const char* key, bool required) -> std::vector<double> {
        if (!p.contains(key)) {
            if (required) throw ConfigError(std::string("blockdiag params: missing \"") + key + "\"");
            return std::vector<double>(mz, 0.0);
        }
        return vector_from_json(p.at(key), std::string("blockdiag params ") + key, mz);
    };
    s.b0 = get_vec("b0", true);
    s.b1 = get_vec("b1", false);
    s.b2 = get_vec("b2", false);
    s.w0 = get_vec("w0", false);
    s.w1 = get_vec("w1", false);
    s.w2 = get_vec("w2", false);
    s.z = get_vec("z", true);
    if (s.parity == BlockParity::Odd) {
        if (!p.contains("b_inf")) throw ConfigError("blockdiag params: odd parity needs \"b_inf\"");
        s.b_inf = p.at("b_inf").get<double>();
        s.w_inf = p.value("w_inf", 0.0);
    }
    return s;
}

int preset_id_from_json(const json& p) {
    if (!p.contains("id")) throw ConfigError("preset params: missing \"id\"");
    const auto& id = p.at("id");
    if (id.is_number_integer()) return id.get<int>();
    const std::string text = id.get<std::string>();
    if (text == "fig1") return 1;
    if (text == "fig2") return 2;
    if (text == "fig3") return 3;
    throw ConfigError("preset params: id must be fig1, fig2 or fig3");
}

const char* family_name(ScenarioFamily f) {
    switch (f) {
        case ScenarioFamily::CustomPhase: return "custom_phase";
        case ScenarioFamily::CustomReduced: return "custom_reduced";
        case ScenarioFamily::Linear: return "linear";
        case ScenarioFamily::Exponential: return "exponential";
        case ScenarioFamily::BlockDiag: return "blockdiag";
        case ScenarioFamily::Preset: return "preset";
    }
    return "?";
}

void append_report_columns(std::vector<std::string>& cols) {
    for (const char* c : {"energy", "det_drift", "zeta_drift", "angmom_drift", "sff",
                          "virial_residual", "trace_omega"})
        cols.emplace_back(c);
}

void append_matrix_columns(std::vector<std::string>& cols, const std::string& prefix, int n) {
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j)
            cols.push_back(prefix + "_" + std::to_string(i) + std::to_string(j));
}

struct TrajectoryTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

void append_matrix_values(std::vector<double>& row, const SquareMatrix& m) {
    row.insert(row.end(), m.data().begin(), m.data().end());
}

TrajectoryTable tabulate(const Trajectory& traj) {
    TrajectoryTable table;
    if (traj.samples.empty()) {
        table.columns = {"t"};
        return table;
    }
    const auto& first = traj.samples.front().state;
    table.columns.push_back("t");
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            const int n = s.dim();
            if constexpr (std::is_same_v<T, PhaseState>) {
                append_matrix_columns(table.columns, "A", n);
                append_matrix_columns(table.columns, "Adot", n);
            } else if constexpr (std::is_same_v<T, ReducedState>) {
                append_matrix_columns(table.columns, "beta", n);
                append_matrix_columns(table.columns, "omega", n);
                append_matrix_columns(table.columns, "zeta", n);
            } else {
                append_matrix_columns(table.columns, "A", n);
                append_matrix_columns(table.columns, "Adot", n);
                append_matrix_columns(table.columns, "J", n);
                append_matrix_columns(table.columns, "Jdot", n);
            }
        },
        first);
    append_report_columns(table.columns);
    if (std::holds_alternative<JacobiState>(first)) {
        table.columns.emplace_back("J_norm");
        table.columns.emplace_back("Jdot_cov_norm");
    }

    table.rows.reserve(traj.samples.size());
    for (const auto& sample : traj.samples) {
        std::vector<double> row;
        row.reserve(table.columns.size());
        row.push_back(sample.t);
        std::visit(
            [&](const auto& s) {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, PhaseState>) {
                    append_matrix_values(row, s.A().mat());
                    append_matrix_values(row, s.Adot());
                } else if constexpr (std::is_same_v<T, ReducedState>) {
                    append_matrix_values(row, s.beta());
                    append_matrix_values(row, s.omega());
                    append_matrix_values(row, s.zeta());
                } else {
                    append_matrix_values(row, s.along().A().mat());
                    append_matrix_values(row, s.along().Adot());
                    append_matrix_values(row, s.J());
                    append_matrix_values(row, s.Jdot());
                }
            },
            sample.state);
        const InvariantReport& r = sample.report;
        for (double v : {r.energy, r.det_drift, r.zeta_drift, r.angmom_drift, r.sff,
                         r.virial_residual, r.trace_omega})
            row.push_back(v);
        if (const auto* js = std::get_if<JacobiState>(&sample.state)) {
            row.push_back(js->j_norm());
            row.push_back(js->jdot_covariant_norm());
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

void write_table_csv(const TrajectoryTable& table, std::ostream& os) {
    for (std::size_t c = 0; c < table.columns.size(); ++c)
        os << (c ? "," : "") << table.columns[c];
    os << "\n";
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c)
            os << (c ? "," : "") << fmt(row[c]);
        os << "\n";
    }
}

void write_table_json(const TrajectoryTable& table, bool truncated, const std::string& reason,
                      std::ostream& os) {
    os << "{\n  \"columns\": [";
    for (std::size_t c = 0; c < table.columns.size(); ++c)
        os << (c ? ", " : "") << '"' << table.columns[c] << '"';
    os << "],\n  \"truncated\": " << (truncated ? "true" : "false");
    if (truncated) os << ",\n  \"truncation_reason\": " << json(reason).dump();
    os << ",\n  \"rows\": [\n";
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        os << "    [";
        for (std::size_t c = 0; c < table.rows[r].size(); ++c)
            os << (c ? ", " : "") << fmt(table.rows[r][c]);
        os << (r + 1 < table.rows.size() ? "],\n" : "]\n");
    }
    os << "  ]\n}\n";
}

TrajectoryTable tabulate_block(const BlockTrajectory& traj) {
    TrajectoryTable table;
    table.columns.push_back("t");
    if (traj.states.empty()) return table;
    const BlockState& first = traj.states.front();
    const int m = first.m;
    for (const char* base : {"b0", "b1", "b2", "w0", "w1", "w2"})
        for (int i = 1; i <= m; ++i) table.columns.push_back(std::string(base) + "_" + std::to_string(i));
    if (first.parity == BlockParity::Odd) {
        table.columns.emplace_back("b_inf");
        table.columns.emplace_back("w_inf");
    }
    table.columns.emplace_back("energy");
    for (int i = 1; i <= m; ++i) table.columns.push_back("axis_" + std::to_string(i));

    for (std::size_t k = 0; k < traj.states.size(); ++k) {
        const BlockState& s = traj.states[k];
        std::vector<double> row;
        row.reserve(table.columns.size());
        row.push_back(traj.t[k]);
        for (const auto* v : {&s.b0, &s.b1, &s.b2, &s.w0, &s.w1, &s.w2})
            row.insert(row.end(), v->begin(), v->end());
        if (s.parity == BlockParity::Odd) {
            row.push_back(s.b_inf);
            row.push_back(s.w_inf);
        }
        row.push_back(traj.energy[k]);
        for (int i = 0; i < m; ++i) row.push_back(1.0 / std::sqrt(s.b0[static_cast<std::size_t>(i)]));
        table.rows.push_back(std::move(row));
    }
    return table;
}

}  // namespace

ScenarioConfig parse_scenario_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");

    ScenarioConfig cfg;
    const std::string family = j.value("family", "");
    const json params = j.value("params", json::object());
    if (family == "custom_phase") {
        cfg.family = ScenarioFamily::CustomPhase;
        if (!params.contains("A") || !params.contains("Adot"))
            throw ConfigError("custom_phase params need \"A\" and \"Adot\"");
        cfg.params = PhaseParams{matrix_from_json(params.at("A"), "A"),
                                 matrix_from_json(params.at("Adot"), "Adot")};
    } else if (family == "custom_reduced") {
        cfg.family = ScenarioFamily::CustomReduced;
        for (const char* k : {"beta", "omega", "zeta"})
            if (!params.contains(k))
                throw ConfigError(std::string("custom_reduced params need \"") + k + "\"");
        cfg.params = ReducedParams{matrix_from_json(params.at("beta"), "beta"),
                                   matrix_from_json(params.at("omega"), "omega"),
                                   matrix_from_json(params.at("zeta"), "zeta")};
    } else if (family == "linear") {
        cfg.family = ScenarioFamily::Linear;
        if (!params.contains("B") || !params.contains("M"))
            throw ConfigError("linear params need \"B\" and \"M\"");
        cfg.params = LinearParams{matrix_from_json(params.at("B"), "B"),
                                  matrix_from_json(params.at("M"), "M")};
    } else if (family == "exponential") {
        cfg.family = ScenarioFamily::Exponential;
        if (!params.contains("B") || !params.contains("C"))
            throw ConfigError("exponential params need \"B\" and \"C\"");
        cfg.params = ExponentialParams{matrix_from_json(params.at("B"), "B"),
                                       matrix_from_json(params.at("C"), "C")};
    } else if (family == "blockdiag") {
        cfg.family = ScenarioFamily::BlockDiag;
        cfg.params = BlockParams{block_state_from_json(params)};
    } else if (family == "preset") {
        cfg.family = ScenarioFamily::Preset;
        cfg.params = PresetParams{preset_id_from_json(params)};
    } else {
        throw ConfigError("unknown family \"" + family +
                          "\" (expected custom_phase, custom_reduced, linear, exponential, "
                          "blockdiag or preset)");
    }

    if (j.contains("integrator")) {
        const json& integ = j.at("integrator");
        cfg.integrator.rel_tol = integ.value("rel_tol", cfg.integrator.rel_tol);
        cfg.integrator.abs_tol = integ.value("abs_tol", cfg.integrator.abs_tol);
        cfg.integrator.dt_out = integ.value("dt_out", cfg.integrator.dt_out);
    }
    if (j.contains("t_span")) {
        const json& span = j.at("t_span");
        if (!span.is_array() || span.size() != 2)
            throw ConfigError("t_span must be [t_start, t_end]");
        cfg.t_start = span[0].get<double>();
        cfg.t_end = span[1].get<double>();
    } else if (cfg.family == ScenarioFamily::Preset) {
        const int id = std::get<PresetParams>(cfg.params).id;
        const double half = (id == 3) ? 40.0 : 20.0;
        cfg.t_start = -half;
        cfg.t_end = half;
    }
    if (!(cfg.t_start <= 0.0 && cfg.t_end >= 0.0))
        throw ConfigError("t_span must contain 0 (initial data is given at t = 0)");

    if (j.contains("output")) {
        const json& out = j.at("output");
        const std::string format = out.value("format", "csv");
        if (format == "csv") cfg.format = OutputFormat::Csv;
        else if (format == "json") cfg.format = OutputFormat::Json;
        else throw ConfigError("output.format must be csv or json");
        cfg.output_path = out.value("path", "");
    }
    cfg.name = j.value("name", "");
    return cfg;
}

ScenarioConfig load_scenario_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scenario_config(ss.str());
}

SquareMatrix parse_matrix_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("matrix is not valid JSON: ") + e.what());
    }
    return matrix_from_json(j, "matrix");
}

SquareMatrix load_matrix_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open matrix file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_matrix_json(ss.str());
}

namespace {

Trajectory merge_window(Trajectory backward, Trajectory forward) {
    Trajectory merged;
    merged.truncated = backward.truncated || forward.truncated;
    merged.truncation_reason = !backward.truncation_reason.empty() ? backward.truncation_reason
                                                                   : forward.truncation_reason;
    merged.samples.reserve(backward.samples.size() + forward.samples.size());
    for (auto it = backward.samples.rbegin(); it != backward.samples.rend(); ++it) {
        if (it->t == 0.0) continue;  // forward piece re-emits t = 0
        merged.samples.push_back(std::move(*it));
    }
    for (auto& s : forward.samples) merged.samples.push_back(std::move(s));
    return merged;
}

}  // namespace

Trajectory integrate_window_phase(const PhaseState& init, double t_start, double t_end,
                                  const IntegratorOptions& opts) {
    if (t_start == 0.0) return integrate_geodesic(init, t_end, opts);
    return merge_window(integrate_geodesic(init, t_start, opts),
                        integrate_geodesic(init, t_end, opts));
}

Trajectory integrate_window_reduced(const ReducedState& init, double t_start, double t_end,
                                    const IntegratorOptions& opts) {
    if (t_start == 0.0) return integrate_geodesic(init, t_end, opts);
    return merge_window(integrate_geodesic(init, t_start, opts),
                        integrate_geodesic(init, t_end, opts));
}

BlockTrajectory integrate_window_block(const BlockState& init, double t_start, double t_end,
                                       const IntegratorOptions& opts) {
    if (t_start == 0.0) return integrate_block(init, t_end, opts);
    BlockTrajectory backward = integrate_block(init, t_start, opts);
    BlockTrajectory forward = integrate_block(init, t_end, opts);
    BlockTrajectory merged;
    merged.truncated = backward.truncated || forward.truncated;
    merged.truncation_reason = !backward.truncation_reason.empty() ? backward.truncation_reason
                                                                   : forward.truncation_reason;
    for (std::size_t k = backward.t.size(); k-- > 0;) {
        if (backward.t[k] == 0.0) continue;
        merged.t.push_back(backward.t[k]);
        merged.states.push_back(std::move(backward.states[k]));
        merged.energy.push_back(backward.energy[k]);
    }
    merged.t.insert(merged.t.end(), forward.t.begin(), forward.t.end());
    merged.energy.insert(merged.energy.end(), forward.energy.begin(), forward.energy.end());
    for (auto& s : forward.states) merged.states.push_back(std::move(s));
    return merged;
}

void write_trajectory_csv(const Trajectory& traj, std::ostream& os) {
    write_table_csv(tabulate(traj), os);
}

void write_trajectory_json(const Trajectory& traj, std::ostream& os) {
    write_table_json(tabulate(traj), traj.truncated, traj.truncation_reason, os);
}

void write_block_csv(const BlockTrajectory& traj, std::ostream& os) {
    write_table_csv(tabulate_block(traj), os);
}

void write_block_json(const BlockTrajectory& traj, std::ostream& os) {
    write_table_json(tabulate_block(traj), traj.truncated, traj.truncation_reason, os);
}

ParsedTable parse_trajectory_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("trajectory is not valid JSON: ") + e.what());
    }
    ParsedTable table;
    for (const auto& c : j.at("columns")) table.columns.push_back(c.get<std::string>());
    for (const auto& row : j.at("rows")) {
        std::vector<double> r;
        r.reserve(row.size());
        for (const auto& v : row) r.push_back(v.get<double>());
        table.rows.push_back(std::move(r));
    }
    return table;
}

std::string classify_line_text(const SquareMatrix& a0, const SquareMatrix& a1) {
    std::ostringstream os;
    if (classify_line(a0, a1)) {
        const auto idx = nilpotency_index(inverse(a0) * a1);
        os << "Linear geodesic, index " << (idx ? *idx : 0);
    } else {
        os << "Not a linear geodesic";
    }
    try {
        const PhaseState s{GroupPoint(a0), a1};
        const CertificateReport cert = unbounded_certificate(s);
        os << "\nunboundedness certificate: " << to_string(cert.primary);
        if (cert.all.size() > 1) {
            os << " (all:";
            for (auto c : cert.all) os << " " << to_string(c);
            os << ")";
        }
    } catch (const InvariantError&) {
        // not a valid phase state; no certificate applies
    }
    return os.str();
}

std::string classify_exponential_text(const SquareMatrix& b, const SquareMatrix& c) {
    std::ostringstream os;
    const ExponentialVerdict verdict = classify_exponential(b, c);
    switch (verdict.kind) {
        case ExponentialClass::Rotational:
            os << "Rotational, kappa = " << fmt(verdict.kappa);
            break;
        case ExponentialClass::LinearNilpotent:
            os << "LinearNilpotent";
            break;
        case ExponentialClass::NotGeodesic:
            os << "NotGeodesic";
            break;
    }
    try {
        const PhaseState s{GroupPoint(b), b * c};
        const CertificateReport cert = unbounded_certificate(s);
        os << "\nunboundedness certificate: " << to_string(cert.primary);
        if (cert.all.size() > 1) {
            os << " (all:";
            for (auto cc : cert.all) os << " " << to_string(cc);
            os << ")";
        }
    } catch (const InvariantError&) {
    }
    return os.str();
}

namespace {

std::string verdict_text(const BoundednessReport& r) {
    std::ostringstream os;
    os << (r.verdict == BoundednessVerdict::Bounded ? "Bounded" : "Inconclusive");
    os << " (E = " << fmt(r.energy);
    for (std::size_t i = 0; i < r.ceilings.size(); ++i) {
        os << ", ceiling_" << (i + 1) << " = ";
        if (r.ceilings[i]) os << fmt(*r.ceilings[i]);
        else os << "none";
    }
    if (!r.zero_momentum_blocks.empty()) {
        os << "; zero-momentum blocks:";
        for (int b : r.zero_momentum_blocks) os << " " << b;
    }
    os << ")";
    return os.str();
}

}  // namespace

std::string RunSummary::to_json() const {
    json j;
    if (!name.empty()) j["name"] = name;
    j["family"] = family;
    j["dimension"] = dimension;
    j["t_span"] = {t_start, t_end};
    j["samples"] = sample_count;
    j["truncated"] = truncated;
    if (truncated) j["truncation_reason"] = truncation_reason;
    j["final"] = {{"energy", final_report.energy},
                  {"det_drift", final_report.det_drift},
                  {"zeta_drift", final_report.zeta_drift},
                  {"angmom_drift", final_report.angmom_drift},
                  {"sff", final_report.sff},
                  {"virial_residual", final_report.virial_residual},
                  {"trace_omega", final_report.trace_omega}};
    if (classification) j["classification"] = *classification;
    if (certificates) {
        j["certificate"] = to_string(certificates->primary);
        json all = json::array();
        for (auto c : certificates->all) all.push_back(to_string(c));
        j["certificates_all"] = all;
    }
    if (boundedness) {
        j["boundedness"] = verdict_text(*boundedness);
        j["energy_paper_convention"] = boundedness->energy;
    }
    if (detected_period) j["detected_period"] = *detected_period;
    j["output_file"] = output_file;
    return j.dump(2);
}

std::string RunSummary::to_text() const {
    std::ostringstream os;
    if (!name.empty()) os << "[" << name << "] ";
    os << family << " n=" << dimension << " t in [" << fmt(t_start) << ", " << fmt(t_end) << "], "
       << sample_count << " samples\n";
    if (truncated) os << "  TRUNCATED: " << truncation_reason << "\n";
    os << "  final drifts: energy " << fmt(final_report.energy) << ", det " << fmt(final_report.det_drift)
       << ", zeta " << fmt(final_report.zeta_drift) << ", angmom " << fmt(final_report.angmom_drift)
       << "\n";
    if (classification) os << "  classification: " << *classification << "\n";
    if (certificates) os << "  unboundedness certificate: " << to_string(certificates->primary) << "\n";
    if (boundedness) os << "  boundedness: " << verdict_text(*boundedness) << "\n";
    if (detected_period) os << "  detected period: " << fmt(*detected_period) << "\n";
    os << "  wrote " << output_file;
    return os.str();
}

RunResult run_scenario(const ScenarioConfig& config, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    RunResult result;
    RunSummary& summary = result.summary;
    summary.name = config.name;
    summary.family = family_name(config.family);
    summary.t_start = config.t_start;
    summary.t_end = config.t_end;

    const std::string ext = config.format == OutputFormat::Csv ? ".csv" : ".json";
    std::string filename = config.output_path.empty() ? ("trajectory" + ext) : config.output_path;
    const std::filesystem::path out_path = out_dir / filename;

    const auto write_traj = [&](const Trajectory& traj) {
        std::ofstream os(out_path);
        if (!os) throw ConfigError("cannot write " + out_path.string());
        if (config.format == OutputFormat::Csv) write_trajectory_csv(traj, os);
        else write_trajectory_json(traj, os);
    };
    const auto finish_traj = [&](const Trajectory& traj) {
        summary.sample_count = traj.samples.size();
        summary.truncated = traj.truncated;
        summary.truncation_reason = traj.truncation_reason;
        if (!traj.samples.empty()) summary.final_report = traj.samples.back().report;
        write_traj(traj);
        summary.output_file = out_path.string();
        if (traj.truncated) result.exit_code = 4;
    };

    switch (config.family) {
        case ScenarioFamily::CustomPhase: {
            const auto& p = std::get<PhaseParams>(config.params);
            PhaseState init{GroupPoint(p.A), p.Adot};
            summary.dimension = init.dim();
            summary.certificates = unbounded_certificate(init);
            finish_traj(integrate_window_phase(init, config.t_start, config.t_end, config.integrator));
            break;
        }
        case ScenarioFamily::CustomReduced: {
            const auto& p = std::get<ReducedParams>(config.params);
            ReducedState init{p.beta, p.omega, p.zeta};
            summary.dimension = init.dim();
            finish_traj(integrate_window_reduced(init, config.t_start, config.t_end, config.integrator));
            break;
        }
        case ScenarioFamily::Linear: {
            const auto& p = std::get<LinearParams>(config.params);
            LinearGeodesicSpec spec{GroupPoint(p.B), p.M};
            summary.dimension = p.B.dim();
            summary.classification = "Linear geodesic, index " + std::to_string(spec.index());
            PhaseState init = spec.phase_state();
            summary.certificates = unbounded_certificate(init);
            finish_traj(integrate_window_phase(init, config.t_start, config.t_end, config.integrator));
            break;
        }
        case ScenarioFamily::Exponential: {
            const auto& p = std::get<ExponentialParams>(config.params);
            const ExponentialVerdict verdict = classify_exponential(p.B, p.C);
            summary.dimension = p.B.dim();
            if (verdict.kind == ExponentialClass::NotGeodesic)
                throw InvariantError(
                    "exponential scenario: (B, C) is NotGeodesic (neither C^2 = 0 nor the "
                    "rotational balance holds)");
            summary.classification = verdict.kind == ExponentialClass::Rotational
                                         ? ("Rotational, kappa = " + fmt(verdict.kappa))
                                         : std::string("LinearNilpotent");
            PhaseState init{GroupPoint(p.B), p.B * p.C};
            summary.certificates = unbounded_certificate(init);
            finish_traj(integrate_window_phase(init, config.t_start, config.t_end, config.integrator));
            break;
        }
        case ScenarioFamily::BlockDiag:
        case ScenarioFamily::Preset: {
            BlockState init = config.family == ScenarioFamily::Preset
                                  ? figure_preset(std::get<PresetParams>(config.params).id)
                                  : std::get<BlockParams>(config.params).state;
            init.validate();
            summary.dimension = init.dim();
            summary.boundedness = boundedness_verdict(init);
            if (const auto ansatz = match_pulse_ansatz(init)) {
                const PulseSystem pulse(ansatz->m0, init.m, ansatz->z1, ansatz->zm);
                summary.detected_period = pulse.detect_period(ansatz->state);
            }
            BlockTrajectory traj =
                integrate_window_block(init, config.t_start, config.t_end, config.integrator);
            summary.sample_count = traj.t.size();
            summary.truncated = traj.truncated;
            summary.truncation_reason = traj.truncation_reason;
            if (!traj.states.empty()) {
                const ReducedState final_state = embed(traj.states.back());
                summary.final_report = invariant_report(final_state, embed(init));
            }
            std::ofstream os(out_path);
            if (!os) throw ConfigError("cannot write " + out_path.string());
            if (config.format == OutputFormat::Csv) write_block_csv(traj, os);
            else write_block_json(traj, os);
            summary.output_file = out_path.string();
            if (traj.truncated) result.exit_code = 4;
            break;
        }
    }

    std::ofstream sj(out_dir / "summary.json");
    sj << summary.to_json() << "\n";
    return result;
}

std::filesystem::path run_figure(int id, const std::filesystem::path& out_dir,
                                 std::optional<std::pair<double, double>> window) {
    if (id < 1 || id > 3) throw ConfigError("figure id must be 1, 2 or 3");
    std::filesystem::create_directories(out_dir);
    const double half = (id == 3) ? 40.0 : 20.0;
    const double t0 = window ? window->first : -half;
    const double t1 = window ? window->second : half;

    const BlockState init = figure_preset(id);
    const BlockTrajectory traj = integrate_window_block(init, t0, t1, IntegratorOptions{});

    const std::filesystem::path path = out_dir / ("fig" + std::to_string(id) + ".csv");
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot write " + path.string());
    os << "t";
    for (int i = 1; i <= init.m; ++i) os << ",axis_" << i;
    os << "\n";
    for (std::size_t k = 0; k < traj.t.size(); ++k) {
        os << fmt(traj.t[k]);
        for (int i = 0; i < init.m; ++i)
            os << "," << fmt(1.0 / std::sqrt(traj.states[k].b0[static_cast<std::size_t>(i)]));
        os << "\n";
    }
    return path;
}

int run_sweep(const std::string& json_text, const std::filesystem::path& out_dir, std::ostream& os) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("sweep config is not valid JSON: ") + e.what());
    }
    if (!j.contains("scenarios") || !j.at("scenarios").is_array())
        throw ConfigError("sweep config needs a \"scenarios\" array");

    std::vector<ScenarioConfig> configs;
    std::size_t index = 0;
    for (const auto& sj : j.at("scenarios")) {
        ScenarioConfig cfg = parse_scenario_config(sj.dump());
        if (cfg.output_path.empty())
            cfg.output_path = "scenario_" + std::to_string(index) +
                              (cfg.format == OutputFormat::Csv ? ".csv" : ".json");
        if (cfg.name.empty()) cfg.name = "scenario " + std::to_string(index);
        configs.push_back(std::move(cfg));
        ++index;
    }

    // Fan out, then report in scenario order so output is deterministic.
    std::vector<std::future<RunResult>> futures;
    futures.reserve(configs.size());
    for (const auto& cfg : configs) {
        const std::filesystem::path dir = out_dir / ("scenario_" + std::to_string(futures.size()));
        futures.push_back(std::async(std::launch::async,
                                     [cfg, dir]() { return run_scenario(cfg, dir); }));
    }
    int worst = 0;
    for (std::size_t k = 0; k < futures.size(); ++k) {
        try {
            const RunResult r = futures[k].get();
            os << r.summary.to_text() << "\n";
            worst = std::max(worst, r.exit_code);
        } catch (const std::exception& e) {
            os << "[scenario " << k << "] FAILED: " << e.what() << "\n";
            worst = std::max(worst, 3);
        }
    }
    return worst;
}

}  // namespace slngeo
