#pragma once
// Command implementations behind the `symrb` executable: JSON config
// ingestion, run orchestration and CSV / key-value report output.
//
// Exit codes: 0 ok, 1 I/O or unexpected failure, 2 validation,
// 3 divergence, 4 tolerance or certification failure, 5 BVP non-convergence.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "symrb/control.hpp"
#include "symrb/properties.hpp"

namespace symrb::app {

using json = nlohmann::json;

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kValidation = 2,
    kDivergence = 3,
    kTolerance = 4,
    kNonConvergence = 5,
};

class ConfigError : public DomainError {
public:
    using DomainError::DomainError;
};

class IoError : public Error {
public:
    using Error::Error;
};

struct Tolerances {
    double e_equiv = 1e-6;
    double level_set = 1e-8;
    double energy = 1e-8;
    double casimir = 1e-8;
};

struct BvpSettings {
    Mat q_target;
    double tol = 1e-6;
    int max_iter = 30;
};

struct RunConfig {
    Index n = 0;
    std::vector<double> lambda;
    Mat q0;
    Mat pi0;
    IntegratorConfig integrator;
    std::uint64_t seed = 0;
    std::string trajectory_file = "trajectory.csv";
    std::string report_file = "report.txt";
    Tolerances tolerances;
    std::optional<BvpSettings> bvp;

    InertiaSpec spec() const { return InertiaSpec(lambda); }
    Rotation rotation0() const { return Rotation(q0); }
    SkewMat momentum0() const { return SkewMat(pi0); }
};

// ---------------------------------------------------------------------------
// Config parsing
// ---------------------------------------------------------------------------

namespace detail {

inline double number(const json& j, const std::string& what) {
    if (!j.is_number()) throw ConfigError(what + ": expected a number");
    return j.get<double>();
}

inline Mat matrix_rows(const json& j, Index rows, Index cols, const std::string& what) {
    if (!j.is_array() || static_cast<Index>(j.size()) != rows) {
        throw ConfigError(what + ": expected " + std::to_string(rows) + " rows");
    }
    Mat m(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        const json& row = j[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Index>(row.size()) != cols) {
            throw ConfigError(what + ": row " + std::to_string(i) + " must have " + std::to_string(cols) +
                              " entries");
        }
        for (Index c = 0; c < cols; ++c) m(i, c) = number(row[static_cast<std::size_t>(c)], what);
    }
    return m;
}

/// Skew input: n x n rows, or a 3-vector when n = 3. Never symmetrised.
inline Mat skew_input(const json& j, Index n, const std::string& what) {
    if (n == 3 && j.is_array() && j.size() == 3 && j[0].is_number()) {
        return hat(Vec3(number(j[0], what), number(j[1], what), number(j[2], what))).mat();
    }
    const Mat m = matrix_rows(j, n, n, what);
    try {
        return SkewMat(m).mat();
    } catch (const DomainError& e) {
        throw ConfigError(what + ": " + e.what());
    }
}

}  // namespace detail

inline RunConfig parse_config(const json& doc) {
    using detail::number;
    if (!doc.is_object()) throw ConfigError("config: top level must be an object");
    RunConfig cfg;

    if (!doc.contains("lambda") || !doc["lambda"].is_array()) throw ConfigError("config: 'lambda' array required");
    for (const auto& v : doc["lambda"]) cfg.lambda.push_back(number(v, "lambda"));
    cfg.n = static_cast<Index>(cfg.lambda.size());
    if (doc.contains("n") && static_cast<Index>(number(doc["n"], "n")) != cfg.n) {
        throw ConfigError("config: 'n' does not match the length of 'lambda'");
    }
    (void)cfg.spec();  // validates lambda_i + lambda_j > 0

    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_unsigned()) throw ConfigError("config: 'seed' must be a non-negative integer");
        cfg.seed = doc["seed"].get<std::uint64_t>();
    }
    Rng rng(cfg.seed);

    const json q0 = doc.value("q0", json("identity"));
    if (q0.is_string() && q0.get<std::string>() == "identity") {
        cfg.q0 = Mat::Identity(cfg.n, cfg.n);
    } else if (q0.is_string() && q0.get<std::string>() == "random") {
        cfg.q0 = random_rotation(cfg.n, rng).mat();
    } else {
        cfg.q0 = detail::matrix_rows(q0, cfg.n, cfg.n, "q0");
    }
    try {
        (void)cfg.rotation0();
    } catch (const DomainError& e) {
        throw ConfigError(std::string("q0: ") + e.what());
    }

    if (!doc.contains("pi0")) throw ConfigError("config: 'pi0' required");
    const json& pi0 = doc["pi0"];
    if (pi0.is_object()) {
        if (!pi0.contains("random_norm")) throw ConfigError("pi0: object form needs 'random_norm'");
        const double norm = number(pi0["random_norm"], "pi0.random_norm");
        const Mat p = random_skew(cfg.n, rng).mat();
        cfg.pi0 = norm * p / spectral_norm(p);
    } else {
        cfg.pi0 = detail::skew_input(pi0, cfg.n, "pi0");
    }

    if (doc.contains("integrator")) {
        const json& ij = doc["integrator"];
        if (!ij.is_object()) throw ConfigError("config: 'integrator' must be an object");
        auto& ic = cfg.integrator;
        if (ij.contains("scheme")) {
            if (!ij["scheme"].is_string()) throw ConfigError("integrator.scheme must be a string");
            ic.scheme = parse_scheme(ij["scheme"].get<std::string>());
        }
        if (ij.contains("step")) ic.step = number(ij["step"], "integrator.step");
        if (ij.contains("t_final")) ic.t_final = number(ij["t_final"], "integrator.t_final");
        if (ij.contains("project_attitude")) {
            if (!ij["project_attitude"].is_boolean()) throw ConfigError("integrator.project_attitude must be boolean");
            ic.project_attitude = ij["project_attitude"].get<bool>();
        }
        if (ij.contains("midpoint_tol")) ic.midpoint_tol = number(ij["midpoint_tol"], "integrator.midpoint_tol");
        if (ij.contains("midpoint_max_iter")) {
            ic.midpoint_max_iter = static_cast<int>(number(ij["midpoint_max_iter"], "integrator.midpoint_max_iter"));
        }
    }
    cfg.integrator.validate();

    if (doc.contains("outputs")) {
        const json& o = doc["outputs"];
        if (o.contains("trajectory")) cfg.trajectory_file = o["trajectory"].get<std::string>();
        if (o.contains("report")) cfg.report_file = o["report"].get<std::string>();
    }

    if (doc.contains("tolerances")) {
        const json& t = doc["tolerances"];
        auto& tl = cfg.tolerances;
        if (t.contains("e_equiv")) tl.e_equiv = number(t["e_equiv"], "tolerances.e_equiv");
        if (t.contains("level_set")) tl.level_set = number(t["level_set"], "tolerances.level_set");
        if (t.contains("energy")) tl.energy = number(t["energy"], "tolerances.energy");
        if (t.contains("casimir")) tl.casimir = number(t["casimir"], "tolerances.casimir");
    }

    if (doc.contains("bvp")) {
        const json& b = doc["bvp"];
        BvpSettings bs;
        if (b.contains("q_target")) {
            bs.q_target = detail::matrix_rows(b["q_target"], cfg.n, cfg.n, "bvp.q_target");
        } else if (b.contains("q_target_exp")) {
            bs.q_target = expm(detail::skew_input(b["q_target_exp"], cfg.n, "bvp.q_target_exp"));
        } else {
            throw ConfigError("bvp: 'q_target' or 'q_target_exp' required");
        }
        try {
            (void)Rotation(bs.q_target);
        } catch (const DomainError& e) {
            throw ConfigError(std::string("bvp.q_target: ") + e.what());
        }
        if (b.contains("tol")) bs.tol = number(b["tol"], "bvp.tol");
        if (b.contains("max_iter")) bs.max_iter = static_cast<int>(number(b["max_iter"], "bvp.max_iter"));
        cfg.bvp = std::move(bs);
    }
    return cfg;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("config '" + path + "': " + e.what());
    }
    try {
        return parse_config(doc);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// Output formats
// ---------------------------------------------------------------------------

/// 17 significant digits: lossless for doubles.
inline std::string format_number(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

class KeyValueReport {
public:
    void add(const std::string& key, const std::string& value) { lines_.emplace_back(key, value); }
    void add(const std::string& key, double value) { add(key, format_number(value)); }
    void add(const std::string& key, std::int64_t value) { add(key, std::to_string(value)); }
    void add_matrix(const std::string& key, const Mat& m) {
        for (Index i = 0; i < m.rows(); ++i) {
            std::string row;
            for (Index j = 0; j < m.cols(); ++j) {
                if (j) row += ' ';
                row += format_number(m(i, j));
            }
            add(key + "_row" + std::to_string(i), row);
        }
    }
    std::string str() const {
        std::string s;
        for (const auto& [k, v] : lines_) s += k + " = " + v + "\n";
        return s;
    }

private:
    std::vector<std::pair<std::string, std::string>> lines_;
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

inline std::string to_csv(const CsvTable& t) {
    std::string s;
    for (std::size_t i = 0; i < t.header.size(); ++i) s += (i ? "," : "") + t.header[i];
    s += "\n";
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) s += (i ? "," : "") + format_number(row[i]);
        s += "\n";
    }
    return s;
}

inline CsvTable parse_csv(std::istream& in) {
    CsvTable t;
    std::string line;
    if (!std::getline(in, line)) throw IoError("csv: empty input");
    std::stringstream hs(line);
    for (std::string cell; std::getline(hs, cell, ',');) t.header.push_back(cell);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream rs(line);
        for (std::string cell; std::getline(rs, cell, ',');) row.push_back(std::strtod(cell.c_str(), nullptr));
        if (row.size() != t.header.size()) throw IoError("csv: row width does not match header");
        t.rows.push_back(std::move(row));
    }
    return t;
}

namespace detail {

inline void append_matrix_header(std::vector<std::string>& h, const std::string& prefix, Index rows, Index cols) {
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) h.push_back(prefix + "_" + std::to_string(i + 1) + "_" + std::to_string(j + 1));
}

inline void append_matrix(std::vector<double>& row, const Mat& m) {
    for (Index i = 0; i < m.rows(); ++i)
        for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
}

template <class State, class StateColumns, class Defect>
CsvTable trajectory_table(const Trajectory<State>& traj, Index n, const std::vector<std::string>& state_header,
                          const StateColumns& state_columns, const Defect& defect) {
    CsvTable t;
    t.header.push_back("t");
    t.header.insert(t.header.end(), state_header.begin(), state_header.end());
    t.header.push_back("H");
    for (Index k = 1; k <= n; ++k) t.header.push_back("casimir_" + std::to_string(k));
    t.header.push_back("defect");
    for (std::size_t k = 0; k < traj.size(); ++k) {
        std::vector<double> row{traj.times[k]};
        state_columns(row, traj.states[k]);
        row.push_back(traj.audits.hamiltonian[k]);
        const Vec& c = traj.audits.casimir_spectrum[k];
        for (Index i = 0; i < c.size(); ++i) row.push_back(c(i));
        row.push_back(defect(k));
        t.rows.push_back(std::move(row));
    }
    return t;
}

}  // namespace detail

/// Euler runs: defect column is the skew defect of Pi.
inline CsvTable trajectory_table(const Trajectory<SkewMat>& traj, Index n) {
    std::vector<std::string> h;
    detail::append_matrix_header(h, "pi", n, n);
    return detail::trajectory_table(
        traj, n, h, [](std::vector<double>& row, const SkewMat& s) { detail::append_matrix(row, s.mat()); },
        [&](std::size_t k) { return skew_defect(traj.states[k].mat()); });
}

inline CsvTable trajectory_table(const Trajectory<PhasePoint>& traj, Index n) {
    std::vector<std::string> h;
    detail::append_matrix_header(h, "z", 2 * n, n);
    return detail::trajectory_table(
        traj, n, h, [](std::vector<double>& row, const PhasePoint& z) { detail::append_matrix(row, z.mat()); },
        [&](std::size_t k) { return traj.audits.orthogonality_defect[k]; });
}

inline CsvTable trajectory_table(const Trajectory<BodyState>& traj, Index n) {
    std::vector<std::string> h;
    detail::append_matrix_header(h, "q", n, n);
    detail::append_matrix_header(h, "pi", n, n);
    return detail::trajectory_table(
        traj, n, h,
        [](std::vector<double>& row, const BodyState& s) {
            detail::append_matrix(row, s.q);
            detail::append_matrix(row, s.pi.mat());
        },
        [&](std::size_t k) { return traj.audits.orthogonality_defect[k]; });
}

inline void write_file(const std::filesystem::path& path, const std::string& contents) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << contents;
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

namespace detail {

template <class Body>
int guarded(std::ostream& err, const Body& body) {
    try {
        return body();
    } catch (const BvpFailure& e) {
        err << "error: " << e.what() << " (best terminal error " << format_number(e.best_error()) << ")\n";
        return kNonConvergence;
    } catch (const DivergenceError& e) {
        err << "error: divergence at step " << e.step() << ": " << e.what() << "\n";
        return kDivergence;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << "\n";
        return kValidation;
    } catch (const DimensionError& e) {
        err << "error: " << e.what() << "\n";
        return kValidation;
    } catch (const NumericalFailure& e) {
        err << "error: " << e.what() << "\n";
        return kTolerance;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kFailure;
    }
}

inline double max_of(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, x);
    return m;
}

inline double max_abs_deviation(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x - v.front()));
    return m;
}

inline double casimir_drift(const std::vector<Vec>& spectra) {
    double m = 0.0;
    for (const auto& s : spectra) m = std::max(m, (s - spectra.front()).cwiseAbs().maxCoeff());
    return m;
}

inline void add_run_header(KeyValueReport& rep, const std::string& command, const RunConfig& cfg) {
    rep.add("command", command);
    rep.add("n", static_cast<std::int64_t>(cfg.n));
    rep.add("scheme", to_string(cfg.integrator.scheme));
    rep.add("steps", static_cast<std::int64_t>(cfg.integrator.steps()));
    rep.add("step", cfg.integrator.effective_step());
    rep.add("t_final", cfg.integrator.t_final);
    rep.add("seed", std::to_string(cfg.seed));
}

template <class State>
void add_audits(KeyValueReport& rep, const Trajectory<State>& traj) {
    const Audits& a = traj.audits;
    rep.add("hamiltonian_initial", a.hamiltonian.front());
    rep.add("hamiltonian_max_drift", max_abs_deviation(a.hamiltonian));
    rep.add("casimir_max_drift", casimir_drift(a.casimir_spectrum));
    if (!a.j_drift.empty()) rep.add("j_max_drift", max_of(a.j_drift));
    if (!a.orthogonality_defect.empty()) rep.add("orthogonality_defect_max", max_of(a.orthogonality_defect));
}

}  // namespace detail

inline int cmd_simulate(const std::string& kind, const std::string& config_path, const std::string& out_dir,
                        std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&]() -> int {
        if (kind != "euler" && kind != "symrep" && kind != "euler-poisson") {
            throw ConfigError("simulate: unknown kind '" + kind + "' (expected euler, symrep or euler-poisson)");
        }
        const RunConfig cfg = load_config(config_path);
        const InertiaSpec spec = cfg.spec();
        KeyValueReport rep;
        detail::add_run_header(rep, "simulate", cfg);
        rep.add("kind", kind);
        CsvTable table;
        if (kind == "euler") {
            const auto traj = integrate_euler(spec, cfg.momentum0(), cfg.integrator);
            detail::add_audits(rep, traj);
            table = trajectory_table(traj, cfg.n);
        } else if (kind == "symrep") {
            const auto traj = integrate_symrep(spec, solve_lift(cfg.rotation0(), cfg.momentum0()), cfg.integrator);
            detail::add_audits(rep, traj);
            table = trajectory_table(traj, cfg.n);
        } else {
            const auto traj =
                integrate_euler_poisson(spec, BodyState(cfg.rotation0(), cfg.momentum0()), cfg.integrator);
            detail::add_audits(rep, traj);
            table = trajectory_table(traj, cfg.n);
        }
        const std::filesystem::path dir(out_dir);
        write_file(dir / cfg.trajectory_file, to_csv(table));
        write_file(dir / cfg.report_file, rep.str());
        out << rep.str();
        return kOk;
    });
}

inline int cmd_verify_reduction(const std::string& config_path, const std::string& out_dir, std::ostream& out,
                                std::ostream& err) {
    return detail::guarded(err, [&]() -> int {
        const RunConfig cfg = load_config(config_path);
        const ReductionReport r = verify_reduction(cfg.spec(), cfg.rotation0(), cfg.momentum0(), cfg.integrator);
        const Tolerances& t = cfg.tolerances;
        const std::vector<std::pair<double, double>> checks{
            {r.e_equiv, t.e_equiv}, {r.level_set_defect, t.level_set},
            {r.energy_mismatch, t.energy}, {r.casimir_drift, t.casimir}};

        KeyValueReport rep;
        detail::add_run_header(rep, "verify-reduction", cfg);
        bool ok = true;
        const auto entries = r.entries();
        for (std::size_t i = 0; i < entries.size(); ++i) {
            const bool pass = checks[i].first <= checks[i].second;
            ok = ok && pass;
            rep.add(entries[i].first, entries[i].second);
            rep.add(entries[i].first + "_tolerance", checks[i].second);
            rep.add(entries[i].first + "_status", pass ? "pass" : "fail");
        }
        rep.add("status", ok ? "pass" : "fail");
        write_file(std::filesystem::path(out_dir) / cfg.report_file, rep.str());
        out << rep.str();
        return ok ? kOk : kTolerance;
    });
}

inline int cmd_lift(const std::string& config_path, const std::string& out_dir, std::ostream& out,
                    std::ostream& err) {
    return detail::guarded(err, [&]() -> int {
        const RunConfig cfg = load_config(config_path);
        const SkewMat pi0 = cfg.momentum0();
        const PhasePoint z0 = solve_lift(cfg.rotation0(), pi0);
        const LiftCertificate c = certify_lift(z0, pi0);
        KeyValueReport rep;
        rep.add("command", "lift");
        rep.add("n", static_cast<std::int64_t>(cfg.n));
        rep.add("pi0_spectral_norm", spectral_norm(pi0.mat()));
        rep.add_matrix("p0", z0.p());
        rep.add("p0_orthogonality_defect", c.p_orthogonality);
        rep.add("p0_determinant_defect", c.p_determinant);
        rep.add("momentum_residual", c.momentum_residual);
        rep.add("min_singular_value", c.min_singular_value);
        const bool ok = std::max({c.p_orthogonality, c.p_determinant, c.momentum_residual}) <= kLiftCertTol;
        rep.add("status", ok ? "pass" : "fail");
        write_file(std::filesystem::path(out_dir) / cfg.report_file, rep.str());
        out << rep.str();
        return ok ? kOk : kTolerance;
    });
}

inline int cmd_solve_bvp(const std::string& config_path, const std::string& out_dir, std::ostream& out,
                         std::ostream& err) {
    return detail::guarded(err, [&]() -> int {
        const RunConfig cfg = load_config(config_path);
        if (!cfg.bvp) throw ConfigError("solve-bvp: config has no 'bvp' section");
        const BvpProblem pb{cfg.spec(), cfg.rotation0(), Rotation(cfg.bvp->q_target), cfg.integrator.t_final,
                            cfg.integrator};
        const BvpSolution sol = shoot(pb, cfg.bvp->tol, cfg.bvp->max_iter, cfg.seed);
        KeyValueReport rep;
        detail::add_run_header(rep, "solve-bvp", cfg);
        rep.add_matrix("pi0", sol.pi0.mat());
        rep.add("terminal_error", sol.terminal_error);
        rep.add("cost", sol.cost);
        rep.add("iterations", static_cast<std::int64_t>(sol.iterations));
        rep.add("hamiltonian_initial", sol.trajectory.audits.hamiltonian.front());
        rep.add("reduced_derivative_residual", reduced_derivative_residual(pb.spec, sol.trajectory));
        rep.add("status", "converged");
        const std::filesystem::path dir(out_dir);
        write_file(dir / cfg.trajectory_file, to_csv(trajectory_table(sol.trajectory, cfg.n)));
        write_file(dir / cfg.report_file, rep.str());
        out << rep.str();
        return kOk;
    });
}

inline int cmd_check_invariants(std::uint64_t seed, int trials, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&]() -> int {
        if (trials < 1) throw ConfigError("check-invariants: trials must be >= 1");
        const auto results = run_property_battery(seed, trials);
        bool ok = true;
        for (const auto& r : results) {
            ok = ok && r.ok();
            out << r.name << " " << r.passed << "/" << r.trials << " worst=" << format_number(r.worst)
                << " tol=" << format_number(r.tolerance) << (r.ok() ? " PASS" : " FAIL") << "\n";
        }
        out << "status = " << (ok ? "pass" : "fail") << "\n";
        return ok ? kOk : kTolerance;
    });
}

}  // namespace symrb::app
