#include "cli.hpp"

#include <cmath>
#include <filesystem>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "fkg/config_io.hpp"
#include "fkg/errors.hpp"
#include "fkg/galerkin.hpp"
#include "fkg/postprocess.hpp"
#include "fkg/stepper.hpp"

namespace fkg::cli {

namespace fs = std::filesystem;

namespace {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Common {
    std::optional<int> preset;
    std::string config;
    std::optional<int> M;
    std::vector<std::string> sets;
    std::string out_dir = "out";
};

void add_source_options(CLI::App& cmd, Common& c) {
    auto* p = cmd.add_option("--preset", c.preset, "built-in example (1, 2 or 3)")->check(CLI::Range(1, 3));
    auto* f = cmd.add_option("--config", c.config, "JSON configuration file");
    p->excludes(f);
    cmd.add_option("--set", c.sets, "override a scalar, key=value (repeatable)");
}

ConfigSource load_source(const Common& c) {
    if (!c.preset && c.config.empty()) throw ConfigError({"one of --preset or --config is required"});
    ConfigSource src;
    if (c.preset) {
        src = preset_source(*c.preset);
    } else {
        if (!fs::exists(c.config)) throw IoError("config file not found: " + c.config);
        src = read_config_file(c.config);
    }
    std::vector<std::string> problems;
    for (const auto& kv : c.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            problems.push_back("--set expects key=value, got '" + kv + "'");
            continue;
        }
        try {
            apply_override(src, kv.substr(0, eq), kv.substr(eq + 1));
        } catch (const ConfigError& e) {
            problems.insert(problems.end(), e.problems().begin(), e.problems().end());
        }
    }
    if (c.M) src.scalars.M = *c.M;
    if (!problems.empty()) throw ConfigError(std::move(problems));
    return src;
}

ModelConfig load_config(const ConfigSource& src) {
    ModelConfig cfg = build_config(src);
    require_valid(cfg);
    return cfg;
}

std::vector<int> time_indices(const std::vector<double>& times, const GridSpec& g) {
    std::vector<int> idx;
    std::vector<std::string> problems;
    for (double t : times) {
        const double r = t / g.dt;
        const long i = std::lround(r);
        if (std::abs(r - static_cast<double>(i)) > 1e-6 || i < 0 || i > g.M()) {
            std::ostringstream s;
            s << "report time " << t << " is not a node of the time grid (dt=" << g.dt << ", T=" << g.t.back() << ")";
            problems.push_back(s.str());
            continue;
        }
        idx.push_back(static_cast<int>(i));
    }
    if (!problems.empty()) throw ConfigError(std::move(problems));
    return idx;
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
}

struct RunOutcome {
    SummaryRow summary;
    std::optional<NodeIndex> blowup;
    double blowup_norm = 0.0;
    std::optional<NodeIndex> overflow;
};

RunOutcome run_one(const ModelConfig& cfg, const std::vector<double>& times, const fs::path& dir) {
    const BasisSet basis = build_basis(cfg.N, cfg.ell);
    const GalerkinSystem sys = assemble_structure(basis);
    const GridSpec grid = make_grid(cfg);
    const auto idx = time_indices(times, grid);
    ensure_dir(dir);

    const SolveResult res = solve(cfg, basis, sys);
    const DensityField dens = reconstruct(res.field, basis, cfg, grid, idx);
    try {
        for (const auto& s : dens.slices) write_density_slice(s, dens.a, dens.x, dir);
        write_population(population_series(res.field, basis, cfg, grid), dir / "total_population.csv");
    } catch (const std::runtime_error& e) {
        throw IoError(e.what());
    }

    RunOutcome o;
    o.summary = {cfg.example_id, cfg.M, cfg.N, grid.dt, res.stability, res.blowup};
    o.blowup = res.blowup;
    o.blowup_norm = res.blowup_norm;
    o.overflow = dens.overflow;
    try {
        write_summary(std::span<const SummaryRow>(&o.summary, 1), dir / "summary.csv");
    } catch (const std::runtime_error& e) {
        throw IoError(e.what());
    }
    return o;
}

void print_report(std::ostream& out, const StabilityReport& r) {
    out << "  C = " << format_real(r.C) << "\n"
        << "  |S^-1|_F = " << format_real(r.S_inv_frob) << "\n"
        << "  P_sum = " << format_real(r.P_sum) << "\n"
        << "  dt |S^-1|_F P_sum = " << format_real(r.lhs) << " vs ln((C+1)/(C+1/2)) = " << format_real(r.threshold)
        << "\n"
        << "  dt_admissible = " << (r.dt_admissible ? "true" : "false") << " (margin " << format_real(r.margin())
        << ")\n";
    if (!std::isnan(r.max_norm_observed))
        out << "  max |V|_2 = " << format_real(r.max_norm_observed) << ", 2C = " << format_real(r.bound_2C)
            << (r.bound_holds ? " (within)" : " (exceeded)") << "\n";
    out << "  amplification = " << format_real(r.amplification) << "\n";
}

int report_outcome(std::ostream& out, std::ostream& err, const RunOutcome& o, const fs::path& dir) {
    out << "wrote " << dir.string() << " (M=" << o.summary.M << ", N=" << o.summary.N << ")\n";
    int code = kOk;
    if (o.blowup) {
        err << "blow-up: non-finite coefficients at node (i=" << o.blowup->i << ", j=" << o.blowup->j
            << "), ancestor |V|_2 = " << format_real(o.blowup_norm) << " [" << dir.string() << "]\n";
        code = kBlowUp;
    }
    if (o.overflow) {
        err << "blow-up: density overflow at node (i=" << o.overflow->i << ", j=" << o.overflow->j << ") ["
            << dir.string() << "]\n";
        code = kBlowUp;
    }
    return code;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Explicit Fourier-Klibanov solver for the age-structured Gompertz tumour model", "fkg"};
    app.require_subcommand(1);

    Common run_c;
    std::optional<int> run_N;
    std::vector<double> times = {2.5, 5.0, 7.5, 10.0};
    std::vector<int> sweep;
    auto* run = app.add_subcommand("run", "solve, reconstruct and export");
    add_source_options(*run, run_c);
    run->add_option("--M", run_c.M, "time steps");
    run->add_option("--N", run_N, "basis size");
    run->add_option("--out", run_c.out_dir, "output directory");
    run->add_option("--times", times, "report times")->delimiter(',');
    run->add_option("--sweep", sweep, "list of M values; each run goes to <out>/M<value>")->delimiter(',');

    Common ts_c;
    std::vector<int> ts_N = {2, 4, 6};
    std::string emax_grid = "paper41";
    auto* ts = app.add_subcommand("truncation-study", "relative max truncation error of the initial data");
    add_source_options(*ts, ts_c);
    ts->add_option("--N", ts_N, "basis sizes")->delimiter(',');
    ts->add_option("--out", ts_c.out_dir, "output directory");
    ts->add_option("--emax-grid", emax_grid, "age grid: paper41 or dt")->check(CLI::IsMember({"paper41", "dt"}));

    Common sr_c;
    std::optional<int> sr_N;
    auto* sr = app.add_subcommand("stability-report", "solve and report the stability diagnostics");
    add_source_options(*sr, sr_c);
    sr->add_option("--M", sr_c.M, "time steps");
    sr->add_option("--N", sr_N, "basis size");
    sr->add_option("--out", sr_c.out_dir, "output directory");

    Common va_c;
    std::optional<int> va_N;
    auto* va = app.add_subcommand("validate", "check a configuration and the dt condition without solving");
    add_source_options(*va, va_c);
    va->add_option("--M", va_c.M, "time steps");
    va->add_option("--N", va_N, "basis size");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kInvalid;
    }

    try {
        if (run->parsed()) {
            ConfigSource src = load_source(run_c);
            if (run_N) src.scalars.N = *run_N;
            const fs::path dir = run_c.out_dir;
            if (sweep.empty()) {
                const ModelConfig cfg = load_config(src);
                return report_outcome(out, err, run_one(cfg, times, dir), dir);
            }
            std::vector<ModelConfig> cfgs;
            for (int M : sweep) {
                ConfigSource s = src;
                s.scalars.M = M;
                cfgs.push_back(load_config(s));
            }
            ensure_dir(dir);
            std::vector<std::future<RunOutcome>> jobs;
            for (const auto& cfg : cfgs)
                jobs.push_back(std::async(std::launch::async, [&cfg, &times, &dir] {
                    return run_one(cfg, times, dir / ("M" + std::to_string(cfg.M)));
                }));
            std::vector<SummaryRow> rows;
            int code = kOk;
            for (std::size_t k = 0; k < jobs.size(); ++k) {
                const RunOutcome o = jobs[k].get();
                rows.push_back(o.summary);
                code = std::max(code, report_outcome(out, err, o, dir / ("M" + std::to_string(cfgs[k].M))));
            }
            try {
                write_summary(rows, dir / "summary.csv");
            } catch (const std::runtime_error& e) {
                throw IoError(e.what());
            }
            return code;
        }
        if (ts->parsed()) {
            const ModelConfig cfg = load_config(load_source(ts_c));
            for (int N : ts_N)
                if (N < 1 || N > BasisSet::kMaxSize)
                    throw ConfigError({"N=" + std::to_string(N) + " outside the supported range 1..12"});
            const auto rows = truncation_study(cfg, ts_N, parse_emax_grid(emax_grid));
            const fs::path dir = ts_c.out_dir;
            ensure_dir(dir);
            try {
                write_truncation_study(rows, dir / "truncation_study.csv");
            } catch (const std::runtime_error& e) {
                throw IoError(e.what());
            }
            for (const auto& r : rows)
                out << "example " << r.example << "  N=" << r.N << "  E_max=" << format_real(r.E_max_percent) << "%\n";
            return kOk;
        }
        if (sr->parsed()) {
            ConfigSource src = load_source(sr_c);
            if (sr_N) src.scalars.N = *sr_N;
            const ModelConfig cfg = load_config(src);
            const BasisSet basis = build_basis(cfg.N, cfg.ell);
            const GalerkinSystem sys = assemble_structure(basis);
            const SolveResult res = solve(cfg, basis, sys);
            const fs::path dir = sr_c.out_dir;
            ensure_dir(dir);
            const SummaryRow row{cfg.example_id, cfg.M, cfg.N, res.grid.dt, res.stability, res.blowup};
            try {
                write_summary(std::span<const SummaryRow>(&row, 1), dir / "summary.csv");
            } catch (const std::runtime_error& e) {
                throw IoError(e.what());
            }
            out << "stability report (" << cfg.label << ", M=" << cfg.M << ", N=" << cfg.N << ")\n";
            print_report(out, res.stability);
            if (res.blowup) {
                err << "blow-up: non-finite coefficients at node (i=" << res.blowup->i << ", j=" << res.blowup->j
                    << "), ancestor |V|_2 = " << format_real(res.blowup_norm) << "\n";
                return kBlowUp;
            }
            return kOk;
        }
        if (va->parsed()) {
            ConfigSource src = load_source(va_c);
            if (va_N) src.scalars.N = *va_N;
            const ModelConfig cfg = build_config(src);
            const auto problems = validate(cfg);
            if (!problems.empty()) {
                for (const auto& p : problems) err << "invalid: " << p << "\n";
                return kInvalid;
            }
            out << "configuration ok (" << cfg.label << ")\n";
            const BasisSet basis = build_basis(cfg.N, cfg.ell);
            const GalerkinSystem sys = assemble_structure(basis);
            print_report(out, stability_precheck(cfg, basis, sys));
            return kOk;
        }
    } catch (const ConfigError& e) {
        for (const auto& p : e.problems()) err << "invalid: " << p << "\n";
        return kInvalid;
    } catch (const IoError& e) {
        err << "i/o error: " << e.what() << "\n";
        return kIo;
    } catch (const BlowUpError& e) {
        err << "blow-up: " << e.what() << "\n";
        return kBlowUp;
    } catch (const std::invalid_argument& e) {
        err << "invalid: " << e.what() << "\n";
        return kInvalid;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kInvalid;
    }
    return kOk;
}

int main_entry(int argc, char** argv) {
    std::vector<std::string> args;
    for (int k = 1; k < argc; ++k) args.emplace_back(argv[k]);
    return run_cli(args, std::cout, std::cerr);
}

}  // namespace fkg::cli
