// Copyright 2026 The phaseloss Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "phaseloss/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "phaseloss/config.hpp"
#include "phaseloss/errors.hpp"
#include "phaseloss/fisher.hpp"
#include "phaseloss/io.hpp"
#include "phaseloss/optimizer.hpp"
#include "phaseloss/parallel.hpp"
#include "phaseloss/probes.hpp"
#include "phaseloss/validation.hpp"

namespace phaseloss::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char *kVersion = "0.3.0";

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string command;
    std::vector<int> n;
    std::vector<double> eta;
    std::vector<double> eta_grid;
    std::vector<std::string> probes;
    std::string objective = "joint";
    std::uint64_t seed = OptimizerSettings{}.seed;
    std::string out;
    std::string format = "csv";
    int multistart = OptimizerSettings{}.multistart;
    int max_iterations = OptimizerSettings{}.max_iterations;
    std::string loss_info = "measured";
    int threads = 0;
    int n_budget = ValidationSettings{}.n_budget;
    std::vector<std::string> checks;
    std::string config;
};

json echo(const Options &o) {
    json j;
    j["command"] = o.command;
    j["n"] = o.n;
    j["eta"] = o.eta;
    j["eta_grid"] = o.eta_grid;
    j["probe"] = o.probes;
    j["objective"] = o.objective;
    j["seed"] = o.seed;
    j["out"] = o.out;
    j["format"] = o.format;
    j["multistart"] = o.multistart;
    j["max_iterations"] = o.max_iterations;
    j["loss_info"] = o.loss_info;
    j["threads"] = o.threads;
    if (o.command == "validate") {
        j["n_budget"] = o.n_budget;
        j["check"] = o.checks;
    }
    if (!o.config.empty()) {
        j["config"] = o.config;
    }
    return j;
}

json tolerances_json() {
    const Tolerances &t = kTolerances;
    return {{"normalization", t.normalization},
            {"finite_difference", t.finite_difference},
            {"orthonormality", t.orthonormality},
            {"sld_eigen_cutoff", t.sld_eigen_cutoff},
            {"min_outcome_probability", t.min_outcome_probability},
            {"weight_truncation", t.weight_truncation},
            {"degenerate_variance", t.degenerate_variance},
            {"singular_determinant", t.singular_determinant},
            {"measurement_fd_step", t.measurement_fd_step},
            {"dense_photon_budget", t.dense_photon_budget}};
}

// ---------------------------------------------------------------------------
// Config file merge. Keys mirror long flag names with '_' or '-'; values on the
// command line win.

bool has_flag(const std::vector<std::string> &args, const std::string &flag) {
    return std::any_of(args.begin(), args.end(), [&](const std::string &a) {
        return a == flag || a.rfind(flag + "=", 0) == 0;
    });
}

std::string scalar_token(const json &v) {
    if (v.is_string()) {
        return v.get<std::string>();
    }
    if (v.is_number_integer() || v.is_number_unsigned()) {
        return v.dump();
    }
    if (v.is_number_float()) {
        return io::format_number(v.get<double>());
    }
    throw UsageError("config values must be strings, numbers or arrays of those");
}

std::vector<std::string> merge_config(std::vector<std::string> args,
                                      const std::vector<std::string> &commands) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            path = args[i + 1];
        } else if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
        }
    }
    if (path.empty()) {
        return args;
    }
    std::ifstream in(path);
    if (!in) {
        throw UsageError("cannot open config file " + path);
    }
    json cfg;
    try {
        cfg = json::parse(in);
    } catch (const json::parse_error &e) {
        throw UsageError("config file " + path + ": " + e.what());
    }
    if (!cfg.is_object()) {
        throw UsageError("config file " + path + " must hold a JSON object");
    }
    const bool has_command = std::any_of(args.begin(), args.end(), [&](const std::string &a) {
        return std::find(commands.begin(), commands.end(), a) != commands.end();
    });
    std::vector<std::string> extra;
    for (const auto &[key, value] : cfg.items()) {
        if (key == "command") {
            if (!has_command) {
                args.insert(args.begin(), scalar_token(value));
            }
            continue;
        }
        std::string flag = "--" + key;
        std::replace(flag.begin() + 2, flag.end(), '_', '-');
        if (flag == "--config" || has_flag(args, flag)) {
            continue;
        }
        if (value.is_array()) {
            // One flag per element keeps multi-valued options unambiguous.
            for (const auto &v : value) {
                extra.push_back(flag);
                extra.push_back(scalar_token(v));
            }
        } else {
            extra.push_back(flag);
            extra.push_back(scalar_token(value));
        }
    }
    args.insert(args.end(), extra.begin(), extra.end());
    return args;
}

// ---------------------------------------------------------------------------

std::vector<double> eta_values(const Options &o) {
    std::vector<double> etas = o.eta;
    if (!o.eta_grid.empty()) {
        const double start = o.eta_grid[0];
        const double stop = o.eta_grid[1];
        const double count = o.eta_grid[2];
        if (count < 1 || count != std::floor(count)) {
            throw UsageError("--eta-grid count must be a positive integer");
        }
        const int m = static_cast<int>(count);
        for (int i = 0; i < m; ++i) {
            etas.push_back(m == 1 ? start : start + (stop - start) * i / (m - 1));
        }
    }
    if (etas.empty()) {
        throw UsageError("one of --eta or --eta-grid is required");
    }
    for (double eta : etas) {
        if (!(eta > 0.0 && eta < 1.0)) {
            throw DomainError("eta = " + io::format_number(eta) +
                              " lies outside the open interval (0,1)");
        }
    }
    return etas;
}

Objective parse_objective(const std::string &s) {
    return s == "phase" ? Objective::phase_only : Objective::joint_delta;
}

std::string objective_label(Objective o) { return o == Objective::phase_only ? "phase" : "joint"; }

OptimizerSettings optimizer_settings(const Options &o, Objective objective) {
    OptimizerSettings s;
    s.objective = objective;
    s.seed = o.seed;
    s.multistart = o.multistart;
    s.max_iterations = o.max_iterations;
    s.quantum_loss_information = o.loss_info == "quantum";
    s.threads = o.threads;
    return s;
}

bool is_file_probe(const std::string &label) { return label.rfind("file:", 0) == 0; }

std::optional<Objective> optimizer_probe(const std::string &label, const Options &o) {
    if (label == "optimize") {
        return parse_objective(o.objective);
    }
    if (label == "joint_opt") {
        return Objective::joint_delta;
    }
    if (label == "phase_opt") {
        return Objective::phase_only;
    }
    return std::nullopt;
}

ProbeState library_probe(const std::string &label, int n) {
    if (label == "noon") {
        return noon(n);
    }
    if (label == "hb") {
        return holland_burnett(n);
    }
    if (label == "fock") {
        return fock_probe(n);
    }
    if (label == "uniform") {
        return uniform(n);
    }
    throw UsageError("unknown probe '" + label + "'");
}

void check_probe_label(const std::string &label) {
    static const std::vector<std::string> names = {"noon",     "hb",        "fock",     "uniform",
                                                   "optimize", "joint_opt", "phase_opt"};
    if (!is_file_probe(label) && std::find(names.begin(), names.end(), label) == names.end()) {
        throw UsageError("unknown probe '" + label + "'");
    }
}

/// File-name friendly probe label.
std::string slug(const std::string &label) {
    if (!is_file_probe(label)) {
        return label;
    }
    return "file_" + fs::path(label.substr(5)).stem().string();
}

std::string csv_field(std::string s) {
    std::replace(s.begin(), s.end(), ',', ';');
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
}

// ---------------------------------------------------------------------------

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

json table_json(const Table &t) {
    json arr = json::array();
    for (const auto &r : t.rows) {
        json obj = json::object();
        for (std::size_t i = 0; i < t.header.size(); ++i) {
            const std::string &f = r[i];
            double v = 0.0;
            bool numeric = false;
            try {
                v = io::parse_number(f);
                numeric = std::isfinite(v);
            } catch (const std::runtime_error &) {
            }
            if (numeric) {
                obj[t.header[i]] = v;
            } else {
                obj[t.header[i]] = f;
            }
        }
        arr.push_back(obj);
    }
    return arr;
}

class Session {
  public:
    Session(Options o, std::ostream &out, std::ostream &err)
        : opt_(std::move(o)), out_(out), err_(err), start_(std::chrono::steady_clock::now()) {}

    Options &options() { return opt_; }
    std::ostream &out() { return out_; }

    void warn(const std::string &msg) {
        warnings_.push_back(msg);
        err_ << "warning: " << msg << '\n';
    }

    bool to_files() const { return !opt_.out.empty(); }

    void prepare_out_dir() {
        if (!to_files()) {
            return;
        }
        std::error_code ec;
        fs::create_directories(opt_.out, ec);
        if (ec || !fs::is_directory(opt_.out)) {
            throw UsageError("output directory " + opt_.out + " is not writable");
        }
    }

    fs::path path(const std::string &name) {
        files_.push_back(name);
        return fs::path(opt_.out) / name;
    }

    /// Writes to `<out>/<stem>.<ext>` or to the output stream.
    void emit_table(const std::string &stem, const Table &t) {
        const bool as_json = opt_.format == "json";
        if (!to_files()) {
            if (as_json) {
                out_ << table_json(t).dump(2) << '\n';
            } else {
                io::write_csv(out_, t.header, t.rows);
            }
            return;
        }
        std::ofstream f(path(stem + (as_json ? ".json" : ".csv")));
        if (as_json) {
            f << table_json(t).dump(2) << '\n';
        } else {
            io::write_csv(f, t.header, t.rows);
        }
        if (!f) {
            throw std::runtime_error("failed writing " + stem);
        }
    }

    void emit_json(const std::string &name, const json &j) {
        std::ofstream f(path(name));
        f << j.dump(2) << '\n';
        if (!f) {
            throw std::runtime_error("failed writing " + name);
        }
    }

    void finish(const std::string &status) {
        const double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        if (to_files()) {
            json m;
            m["command"] = opt_.command;
            m["config"] = echo(opt_);
            m["seed"] = opt_.seed;
            m["tolerances"] = tolerances_json();
            m["wall_time_seconds"] = wall;
            m["warning_count"] = warnings_.size();
            m["warnings"] = warnings_;
            m["status"] = status;
            m["version"] = kVersion;
            m["files"] = files_;
            std::ofstream f(fs::path(opt_.out) / "manifest.json");
            f << m.dump(2) << '\n';
        }
        err_ << opt_.command << ": " << status << ", " << warnings_.size() << " warning"
             << (warnings_.size() == 1 ? "" : "s") << '\n';
    }

  private:
    Options opt_;
    std::ostream &out_;
    std::ostream &err_;
    std::chrono::steady_clock::time_point start_;
    std::vector<std::string> warnings_;
    std::vector<std::string> files_;
};

ProbeState load_probe_file(Session &s, const std::string &label) {
    io::WeightsFile file = io::read_weights(label.substr(5));
    for (const auto &w : file.warnings) {
        s.warn(w);
    }
    return make_probe(file.weights);
}

// ---------------------------------------------------------------------------

int cmd_qfi(Session &s) {
    Options &o = s.options();
    if (o.probes.empty()) {
        o.probes = {"noon"};
    }
    const bool all_files = std::all_of(o.probes.begin(), o.probes.end(), is_file_probe);
    if (o.n.empty() && !all_files) {
        throw UsageError("--n is required");
    }
    const std::vector<double> etas = eta_values(o);
    s.prepare_out_dir();

    struct Job {
        std::string label;
        int n;
        double eta;
        std::optional<ProbeState> probe;
    };
    std::vector<Job> jobs;
    for (const auto &label : o.probes) {
        check_probe_label(label);
        if (is_file_probe(label)) {
            const ProbeState p = load_probe_file(s, label);
            if (!o.n.empty() &&
                std::find(o.n.begin(), o.n.end(), p.photons()) == o.n.end()) {
                s.warn(label + " holds n = " + std::to_string(p.photons()) +
                       ", not in --n; using the file");
            }
            for (double eta : etas) {
                jobs.push_back({label, p.photons(), eta, p});
            }
            continue;
        }
        for (int n : o.n) {
            for (double eta : etas) {
                jobs.push_back({label, n, eta, std::nullopt});
            }
        }
    }

    Table t;
    t.header = {"probe",     "n",          "eta",      "I_phiphi", "I_phieta",
                "I_etaeta",  "I_etaeta_measured", "commutator_abs", "delta_phi",
                "delta_eta", "delta"};
    t.rows.resize(jobs.size());
    const bool nested = std::any_of(jobs.begin(), jobs.end(), [&](const Job &j) {
        return optimizer_probe(j.label, o).has_value();
    });
    parallel_for(jobs.size(), nested ? 1 : o.threads, [&](std::size_t i) {
        const Job &j = jobs[i];
        try {
            const ProbeState p = [&] {
                if (j.probe) {
                    return *j.probe;
                }
                if (auto objective = optimizer_probe(j.label, o)) {
                    return make_probe(optimize(j.n, j.eta, optimizer_settings(o, *objective)).weights);
                }
                return library_probe(j.label, j.n);
            }();
            const FisherMatrix q = qfi_matrix(p, j.eta);
            const FisherMatrix m = measured_fisher_phase_sld(p, j.eta);
            const PrecisionSummary d = combined_uncertainty(p, j.eta);
            const double comm = std::abs(commutator_expectation(p, j.eta));
            t.rows[i] = {j.label,
                         std::to_string(j.n),
                         io::format_number(j.eta),
                         io::format_number(q.phi_phi),
                         io::format_number(q.phi_eta),
                         io::format_number(q.eta_eta),
                         io::format_number(m.eta_eta),
                         io::format_number(comm),
                         io::format_number(d.delta_phi),
                         io::format_number(d.delta_eta),
                         io::format_number(d.delta_total)};
        } catch (const DomainError &e) {
            throw DomainError(j.label + ", n = " + std::to_string(j.n) +
                              ", eta = " + io::format_number(j.eta) + ": " + e.what());
        }
    });
    s.emit_table("qfi", t);
    s.finish("ok");
    return kExitOk;
}

Table tradeoff_table(const std::string &label, const std::vector<TradeoffRow> &rows) {
    Table t;
    t.header = {"eta",       "probe",     "I_phiphi", "I_etaeta_measured", "I_etaeta_quantum",
                "delta_phi", "delta_eta", "delta",    "status"};
    for (const auto &r : rows) {
        std::string status = r.converged ? "ok" : "not_converged";
        if (!r.note.empty()) {
            status = "failed: " + r.note;
        }
        t.rows.push_back({io::format_number(r.eta), label, io::format_number(r.phase_information),
                          io::format_number(r.measured_loss_information),
                          io::format_number(r.quantum_loss_information),
                          io::format_number(r.precision.delta_phi),
                          io::format_number(r.precision.delta_eta),
                          io::format_number(r.precision.delta_total), csv_field(status)});
    }
    return t;
}

Table weights_table(const std::vector<TradeoffRow> &rows, int n) {
    Table t;
    t.header = {"eta"};
    for (int k = 0; k <= n; ++k) {
        t.header.push_back("x_" + std::to_string(k));
    }
    for (const auto &r : rows) {
        if (r.weights.empty()) {
            continue;  // failed point; flagged in the main table
        }
        std::vector<std::string> line{io::format_number(r.eta)};
        for (int k = 0; k <= n; ++k) {
            line.push_back(io::format_number(r.weights[k]));
        }
        t.rows.push_back(line);
    }
    return t;
}

int cmd_tradeoff(Session &s) {
    Options &o = s.options();
    if (o.n.empty()) {
        throw UsageError("--n is required");
    }
    if (!s.to_files()) {
        throw UsageError("--out is required for tradeoff");
    }
    if (o.probes.empty()) {
        o.probes = {"noon", "hb", "phase_opt", "joint_opt"};
    }
    std::vector<double> etas = eta_values(o);
    std::sort(etas.begin(), etas.end());
    s.prepare_out_dir();

    for (int n : o.n) {
        for (const auto &label : o.probes) {
            check_probe_label(label);
            std::vector<TradeoffRow> rows;
            const auto objective = optimizer_probe(label, o);
            if (objective) {
                if (*objective == Objective::joint_delta && n < 2) {
                    s.warn("n = " + std::to_string(n) + ": joint optimization needs n >= 2, " +
                           label + " skipped");
                    continue;
                }
                rows = tradeoff_scan(n, etas, optimizer_settings(o, *objective));
            } else {
                std::optional<ProbeState> probe;
                try {
                    probe = is_file_probe(label) ? load_probe_file(s, label)
                                                 : library_probe(label, n);
                } catch (const DomainError &e) {
                    s.warn("n = " + std::to_string(n) + ", probe " + label + " skipped: " +
                           e.what());
                    continue;
                }
                if (probe->photons() != n) {
                    s.warn(label + " holds n = " + std::to_string(probe->photons()) +
                           ", skipped for n = " + std::to_string(n));
                    continue;
                }
                rows.resize(etas.size());
                parallel_for(etas.size(), o.threads, [&](std::size_t i) {
                    rows[i] = evaluate_probe_row(*probe, etas[i]);
                });
            }
            for (const auto &r : rows) {
                if (!r.converged || !r.note.empty()) {
                    s.warn("n = " + std::to_string(n) + ", " + label + ", eta = " +
                           io::format_number(r.eta) + ": " +
                           (r.note.empty() ? std::string("optimizer did not converge") : r.note));
                }
            }
            const std::string stem = "tradeoff_n" + std::to_string(n) + "_" + slug(label);
            s.emit_table(stem, tradeoff_table(label, rows));
            if (objective) {
                s.emit_table(stem + "_weights", weights_table(rows, n));
            }
        }
    }
    s.finish("ok");
    return kExitOk;
}

json summary_json(const OptimizationResult &r, const Options &o) {
    const FisherTerms t = fisher_terms(r.weights, LossKernel(r.n, r.eta));
    const PrecisionSummary d = precision_from(t.phase, t.loss_classical);
    auto num = [](double v) -> json {
        if (std::isfinite(v)) {
            return v;
        }
        return io::format_number(v);
    };
    json starts = json::array();
    for (const auto &st : r.starts) {
        starts.push_back({{"label", st.label},
                          {"initial_objective", num(st.initial_objective)},
                          {"final_objective", num(st.final_objective)},
                          {"iterations", st.iterations},
                          {"gradient_norm", num(st.gradient_norm)},
                          {"newton_decrement", num(st.newton_decrement)},
                          {"converged", st.converged},
                          {"feasible", st.feasible}});
    }
    return {{"n", r.n},
            {"eta", r.eta},
            {"objective", objective_label(r.objective)},
            {"loss_information", o.loss_info},
            {"objective_value", num(r.objective_value)},
            {"converged", r.converged},
            {"gradient_norm", num(r.gradient_norm)},
            {"newton_decrement", num(r.newton_decrement)},
            {"active_set", r.active_set},
            {"best_start", r.best_start},
            {"seed", o.seed},
            {"fisher",
             {{"I_phiphi", num(t.phase)},
              {"I_etaeta_measured", num(t.loss_classical)},
              {"I_etaeta_quantum", num(t.loss_quantum)},
              {"delta_phi", num(d.delta_phi)},
              {"delta_eta", num(d.delta_eta)},
              {"delta", num(d.delta_total)}}},
            {"starts", starts}};
}

int cmd_optimize(Session &s) {
    Options &o = s.options();
    if (o.n.empty()) {
        throw UsageError("--n is required");
    }
    if (!s.to_files()) {
        throw UsageError("--out is required for optimize");
    }
    const std::vector<double> etas = eta_values(o);
    const Objective objective = parse_objective(o.objective);
    s.prepare_out_dir();
    bool all_converged = true;
    for (int n : o.n) {
        for (double eta : etas) {
            const OptimizationResult r = optimize(n, eta, optimizer_settings(o, objective));
            const std::string stem = "weights_n" + std::to_string(n) + "_eta" +
                                     io::format_number(eta) + "_" + objective_label(objective);
            io::write_weights(s.path(stem + ".csv"), r.weights);
            s.emit_json(stem + ".json", summary_json(r, o));
            if (!r.converged) {
                all_converged = false;
                s.warn("n = " + std::to_string(n) + ", eta = " + io::format_number(eta) +
                       ": optimizer did not converge (Newton decrement " +
                       io::format_number(r.newton_decrement) + ")");
            }
            s.out() << stem << ".csv " << (r.converged ? "converged" : "not_converged")
                    << " objective=" << io::format_number(r.objective_value) << '\n';
        }
    }
    s.finish(all_converged ? "converged" : "partial");
    return all_converged ? kExitOk : kExitPartial;
}

int cmd_validate(Session &s) {
    Options &o = s.options();
    ValidationSettings vs;
    vs.n_budget = o.n_budget;
    vs.seed = o.seed;
    vs.checks = o.checks;
    vs.threads = o.threads;
    if (vs.n_budget > kTolerances.dense_photon_budget) {
        throw SizeError("--n-budget " + std::to_string(vs.n_budget) +
                        " exceeds the dense oracle limit of " +
                        std::to_string(kTolerances.dense_photon_budget));
    }
    std::vector<ValidationCheck> results;
    try {
        results = run_validation(vs);
    } catch (const std::invalid_argument &e) {
        throw UsageError(e.what());
    }
    s.prepare_out_dir();
    json report = json::array();
    bool ok = true;
    for (const auto &c : results) {
        ok = ok && c.pass;
        report.push_back({{"name", c.name},
                          {"error", std::isfinite(c.error) ? json(c.error)
                                                           : json(io::format_number(c.error))},
                          {"tolerance", c.tolerance},
                          {"pass", c.pass},
                          {"detail", c.detail}});
    }
    if (s.to_files()) {
        s.emit_json("validation.json", report);
    }
    if (o.format == "json" && !s.to_files()) {
        s.out() << report.dump(2) << '\n';
    } else {
        for (const auto &c : results) {
            s.out() << (c.pass ? "PASS " : "FAIL ") << c.name
                    << " error=" << io::format_number(c.error)
                    << " tolerance=" << io::format_number(c.tolerance) << "  " << c.detail << '\n';
        }
    }
    s.finish(ok ? "pass" : "fail");
    return ok ? kExitOk : kExitFailure;
}

void add_shared(CLI::App *cmd, Options &o) {
    cmd->add_option("--n", o.n, "photon number(s)")->delimiter(',')->check(CLI::PositiveNumber);
    cmd->add_option("--eta", o.eta, "transmissivity value(s)")->delimiter(',');
    cmd->add_option("--eta-grid", o.eta_grid, "start stop count")->expected(3);
    cmd->add_option("--probe", o.probes,
                    "noon|hb|fock|uniform|file:PATH|optimize|joint_opt|phase_opt")
        ->delimiter(',');
    cmd->add_option("--objective", o.objective, "optimizer objective")
        ->check(CLI::IsMember({"joint", "phase"}));
    cmd->add_option("--seed", o.seed, "master seed");
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--format", o.format, "table format")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--multistart", o.multistart, "random restarts")->check(CLI::NonNegativeNumber);
    cmd->add_option("--max-iterations", o.max_iterations, "iteration cap per start")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--loss-info", o.loss_info, "loss information used by the joint objective")
        ->check(CLI::IsMember({"measured", "quantum"}));
    cmd->add_option("--threads", o.threads, "worker threads, 0 = all")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--config", o.config, "JSON config; flags override its values");
}

}  // namespace

int run(const std::vector<std::string> &raw_args, std::ostream &out, std::ostream &err) {
    Options o;
    CLI::App app{"Fisher information for joint phase and loss estimation", "phaseloss"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);
    CLI::App *qfi = app.add_subcommand("qfi", "Fisher table per (probe, n, eta)");
    CLI::App *tradeoff = app.add_subcommand("tradeoff", "precision trade-off over an eta grid");
    CLI::App *opt = app.add_subcommand("optimize", "optimal probe weights per (n, eta)");
    CLI::App *validate = app.add_subcommand("validate", "run the invariant and oracle checks");
    for (CLI::App *cmd : {qfi, tradeoff, opt, validate}) {
        add_shared(cmd, o);
    }
    validate->add_option("--n-budget", o.n_budget, "largest n for the dense oracle")
        ->check(CLI::PositiveNumber);
    validate->add_option("--check", o.checks, "restrict to named checks")->delimiter(',');

    std::vector<std::string> args;
    try {
        args = merge_config(raw_args, {"qfi", "tradeoff", "optimize", "validate"});
    } catch (const UsageError &e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    std::reverse(args.begin(), args.end());
    try {
        app.parse(std::move(args));
    } catch (const CLI::CallForHelp &) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForVersion &) {
        out << kVersion << '\n';
        return kExitOk;
    } catch (const CLI::ParseError &e) {
        err << "error: " << e.what() << '\n' << "run with --help for usage\n";
        return kExitUsage;
    }

    Options &opts = o;
    int (*handler)(Session &) = nullptr;
    if (qfi->parsed()) {
        opts.command = "qfi";
        handler = cmd_qfi;
    } else if (tradeoff->parsed()) {
        opts.command = "tradeoff";
        handler = cmd_tradeoff;
    } else if (opt->parsed()) {
        opts.command = "optimize";
        handler = cmd_optimize;
    } else {
        opts.command = "validate";
        handler = cmd_validate;
    }
    Session session(opts, out, err);
    try {
        return handler(session);
    } catch (const UsageError &e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
}

}  // namespace phaseloss::cli
