#include "sqdati/runner.hpp"

#include "sqdati/dati.hpp"
#include "sqdati/errors.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace sqdati {

namespace {

namespace fs = std::filesystem;

struct RunContext {
    ExperimentConfig cfg;
    LaserParams lp;
    SqueezeParams sq;
};

RunContext make_context(const ExperimentConfig& cfg) {
    validate_config(cfg);
    RunContext ctx;
    ctx.cfg = cfg;
    ctx.lp = cfg.laser;
    ctx.sq = cfg.use_epsilon ? squeeze_from_epsilon(cfg.epsilon, cfg.theta, ctx.lp)
                             : make_squeeze(cfg.r, cfg.theta, ctx.lp);
    return ctx;
}

std::string num(double v) {
    std::ostringstream os;
    os.precision(15);
    os << v;
    return os.str();
}

void write_meta_header(std::ostream& os, const RunContext& ctx) {
    os << "# kind = " << ctx.cfg.kind << "\n"
       << "# E0_au = " << num(ctx.lp.E0) << "\n"
       << "# omega_au = " << num(ctx.lp.omega) << "\n"
       << "# g_au = " << num(ctx.lp.g) << "\n"
       << "# Ip_au = " << num(ctx.lp.Ip) << "\n"
       << "# n_cyc = " << ctx.lp.n_cyc << "\n"
       << "# r = " << num(ctx.sq.r) << "\n"
       << "# theta = " << num(ctx.sq.theta) << "\n"
       << "# epsilon_au = " << num(ctx.sq.epsilon) << "\n"
       << "# cutoff = " << ctx.cfg.cutoff << "\n";
}

// One table: '#' metadata header, CSV column header, then rows.
void write_table(const RunContext& ctx, const std::string& filename,
                 const std::vector<std::string>& columns,
                 const std::vector<std::vector<double>>& rows) {
    const fs::path dir(ctx.cfg.out_dir);
    fs::create_directories(dir);
    std::ofstream os(dir / filename);
    if (!os) throw ComputeError("cannot open output file: " + (dir / filename).string());
    write_meta_header(os, ctx);
    for (size_t c = 0; c < columns.size(); ++c) os << (c ? "," : "") << columns[c];
    os << "\n";
    for (const auto& row : rows) {
        for (size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << num(row[c]);
        os << "\n";
    }
}

void write_sidecar(const RunContext& ctx, double wall_s) {
    const fs::path dir(ctx.cfg.out_dir);
    fs::create_directories(dir);
    std::ofstream os(dir / (ctx.cfg.kind + ".meta"));
    os << "# code_version = 1.0.0\n"
       << "# wall_time_s = " << num(wall_s) << "\n"
       << canonical_config_text(ctx.cfg);
}

std::vector<double> default_period_grid(const LaserParams& lp, int n) {
    std::vector<double> g(n);
    const double period = 2.0 * M_PI / lp.omega;
    for (int i = 0; i < n; ++i) g[i] = period * i / n;
    return g;
}

std::vector<std::vector<double>> run_purity(const RunContext& ctx) {
    const std::vector<double> t1s =
        ctx.cfg.t1_grid.empty() ? default_period_grid(ctx.lp, 200) : ctx.cfg.t1_grid;
    SqueezeParams ph = ctx.sq, am = ctx.sq;
    ph.theta = 0.0;
    am.theta = M_PI;
    std::vector<std::vector<double>> rows;
    for (const double t1 : t1s)
        rows.push_back({t1, ionization_purity(t1, ph, ctx.lp),
                        ionization_purity(t1, am, ctx.lp)});
    return rows;
}

std::vector<std::vector<double>> run_displacement(const RunContext& ctx) {
    const std::vector<double> t1s =
        ctx.cfg.t1_grid.empty() ? default_period_grid(ctx.lp, 100) : ctx.cfg.t1_grid;
    const double v = ctx.cfg.v_f_grid.empty() ? 0.0 : ctx.cfg.v_f_grid.front();
    const double t = ctx.lp.t_meas();
    std::vector<std::vector<double>> rows;
    for (const double t1 : t1s) {
        const cplx d = delta_displacement(v, t1, t, ctx.sq, ctx.lp);
        const cplx mf = meanfield_displacement(v, t1, t, ctx.lp);
        rows.push_back({t1, d.real(), d.imag(), mf.real(), mf.imag()});
    }
    return rows;
}

std::vector<std::vector<double>> run_ionization_times(const RunContext& ctx) {
    const SqueezeKind kind =
        (std::cos(ctx.sq.theta) < 0.0) ? SqueezeKind::amplitude : SqueezeKind::phase;
    std::vector<std::vector<double>> rows;
    for (const double eps : ctx.cfg.epsilon_grid) {
        LaserParams lp = ctx.lp;
        const SqueezeParams sq = squeeze_from_epsilon(eps, ctx.sq.theta, lp);
        for (const double v_f : ctx.cfg.v_f_grid) {
            for (const SaddleSolution& s : solve_saddles(v_f, lp, sq, kind))
                rows.push_back({eps, v_f, std::real(s.vars.t1), std::imag(s.vars.t1),
                                double(s.seed_id)});
        }
    }
    return rows;
}

std::vector<std::vector<double>> run_negativity(const RunContext& ctx, int cutoff,
                                                double step) {
    const ScanTable tab = negativity_scan(ctx.cfg.v_f_grid, ctx.lp, ctx.sq, cutoff,
                                          ctx.cfg.threads, step);
    std::vector<std::vector<double>> rows;
    for (size_t i = 0; i < tab.rows.size(); ++i)
        rows.push_back({tab.rows[i], tab.cells(static_cast<long>(i), 0)});
    return rows;
}

std::vector<std::vector<double>> run_entropy(const RunContext& ctx, int cutoff) {
    const ScanTable tab = entropy_scan(ctx.cfg.epsilon_grid, ctx.cfg.ncyc_grid, ctx.lp,
                                       cutoff, ctx.cfg.threads);
    std::vector<std::vector<double>> rows;
    for (size_t i = 0; i < tab.rows.size(); ++i)
        for (size_t j = 0; j < tab.cols.size(); ++j)
            rows.push_back({tab.rows[i], tab.cols[j],
                            tab.cells(static_cast<long>(i), static_cast<long>(j))});
    return rows;
}

std::vector<std::vector<double>> run_wigner_dump(const RunContext& ctx, int cutoff) {
    const SqueezeKind kind =
        (std::cos(ctx.sq.theta) < 0.0) ? SqueezeKind::amplitude : SqueezeKind::phase;
    const double v_f = ctx.cfg.v_f_grid.front();
    double reach = 0.0;
    for (const SaddleSolution& s : solve_saddles(v_f, ctx.lp, ctx.sq, kind))
        reach = std::max(reach, std::abs(s.alpha_total));
    const FockVector psi = assemble_phi_d(v_f, ctx.lp, ctx.sq, kind, cutoff);
    const double ext = std::sqrt(2.0) * reach + 6.0;
    PhaseSpaceGrid grid{-ext, ext, -ext, ext, ctx.cfg.wigner_step};
    const WignerMap w = wigner_map(psi, grid);
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < w.values.rows(); ++i)
        for (int j = 0; j < w.values.cols(); ++j)
            rows.push_back({grid.x_min + i * grid.step, grid.p_min + j * grid.step,
                            w.values(i, j)});
    return rows;
}

std::vector<std::string> columns_for(const std::string& kind) {
    if (kind == "purity-scan") return {"t1_au", "purity_phase", "purity_amplitude"};
    if (kind == "displacement-compare")
        return {"t1_au", "delta_re_au", "delta_im_au", "meanfield_re_au",
                "meanfield_im_au"};
    if (kind == "ionization-times")
        return {"epsilon_au", "v_f_au", "re_t_ion_au", "im_t_ion_au", "branch_id"};
    if (kind == "negativity-scan") return {"v_f_au", "N"};
    if (kind == "entropy-scan") return {"epsilon_au", "n_cyc", "S_lin"};
    return {"x", "p", "W"};
}

std::vector<std::vector<double>> compute_rows(const RunContext& ctx, int cutoff,
                                              double wigner_step, int gh_order) {
    if (ctx.cfg.kind == "purity-scan") {
        auto rows = run_purity(ctx);
        if (gh_order != 64) {
            rows.clear();
            const std::vector<double> t1s = ctx.cfg.t1_grid.empty()
                                                ? default_period_grid(ctx.lp, 200)
                                                : ctx.cfg.t1_grid;
            SqueezeParams ph = ctx.sq, am = ctx.sq;
            ph.theta = 0.0;
            am.theta = M_PI;
            for (const double t1 : t1s)
                rows.push_back({t1, ionization_purity(t1, ph, ctx.lp, gh_order),
                                ionization_purity(t1, am, ctx.lp, gh_order)});
        }
        return rows;
    }
    if (ctx.cfg.kind == "displacement-compare") return run_displacement(ctx);
    if (ctx.cfg.kind == "ionization-times") return run_ionization_times(ctx);
    if (ctx.cfg.kind == "negativity-scan") return run_negativity(ctx, cutoff, wigner_step);
    if (ctx.cfg.kind == "entropy-scan") return run_entropy(ctx, cutoff);
    return run_wigner_dump(ctx, cutoff);
}

} // namespace

void run_experiment(const ExperimentConfig& cfg) {
    const RunContext ctx = make_context(cfg);
    const auto start = std::chrono::steady_clock::now();
    const auto rows = compute_rows(ctx, cfg.cutoff, cfg.wigner_step, 64);
    write_table(ctx, cfg.kind + ".csv", columns_for(cfg.kind), rows);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_sidecar(ctx, wall);
}

void convergence_report(const ExperimentConfig& cfg) {
    const RunContext ctx = make_context(cfg);

    const auto base = compute_rows(ctx, cfg.cutoff, cfg.wigner_step, 64);
    const auto refined =
        compute_rows(ctx, cfg.cutoff + 100, 0.5 * cfg.wigner_step, 128);
    if (base.size() != refined.size())
        throw ComputeError("convergence_report: baseline/refined size mismatch");

    // 5 evenly spaced subsample rows; last column is the observable.
    std::vector<size_t> picks;
    const size_t n = base.size();
    for (int k = 0; k < 5 && n > 0; ++k)
        picks.push_back(std::min(n - 1, k * std::max<size_t>(1, n / 5)));

    const fs::path dir(cfg.out_dir);
    fs::create_directories(dir);
    std::ofstream os(dir / (cfg.kind + ".check"));
    write_meta_header(os, ctx);
    os << "row,baseline,refined,abs_deviation\n";
    os.precision(15);
    double max_dev = 0.0;
    for (const size_t i : picks) {
        const double b = base[i].back();
        const double r = refined[i].back();
        const double d = std::abs(b - r);
        max_dev = std::max(max_dev, d);
        os << i << "," << num(b) << "," << num(r) << "," << num(d) << "\n";
    }
    os << "# max_abs_deviation = " << num(max_dev) << "\n";
}

} // namespace sqdati
