#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "cspec/acceptance.hpp"
#include "cspec/analysis.hpp"
#include "cspec/field_lab.hpp"
#include "cspec/harness.hpp"
#include "cspec/inviscid_mode.hpp"
#include "cspec/viscous_mode.hpp"
#include "cspec/zero_mode.hpp"
#include "json.hpp"

using namespace cspec;
using ojson = nlohmann::ordered_json;

namespace {

constexpr int kExitFlags = 2;
constexpr int kExitIntegrator = 3;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct FlagError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Common {
    int k = 3;
    double eta = 21.0;
    double mach = 1.0;
    double nu = 0.0;
    double lambda = 0.0;
    double t_end = 100.0;
    double rtol = 1e-8;
    double beta = 50.0;
    double delta_beta = 1.0 / 12.0;
    double s = 0.0;
    std::string preset;
    std::string out;
    std::string format = "csv";
    std::string jobs;
    std::uint64_t seed = 1;

    int resolved_jobs() const {
        try {
            return resolve_jobs(jobs);
        } catch (const std::invalid_argument& e) {
            throw FlagError(e.what());
        }
    }
    IntegratorOptions integrator() const {
        if (!(rtol > 0.0 && rtol < 1.0)) throw FlagError("--rtol must be in (0, 1)");
        IntegratorOptions o;
        o.rtol = rtol;
        o.atol = std::min(1e-12, rtol * 1e-4);
        return o;
    }
    WeightParams weights() const {
        if (!WeightParams::admissible(beta, delta_beta)) throw FlagError("--beta/--delta-beta are not admissible");
        return WeightParams(beta, delta_beta);
    }
};

void add_common(CLI::App* app, Common& c, bool mode_flags = true) {
    if (mode_flags) {
        app->add_option("--k", c.k, "streamwise wavenumber");
        app->add_option("--eta", c.eta, "moving-frame vertical frequency");
    }
    app->add_option("--mach", c.mach, "Mach number");
    app->add_option("--nu", c.nu, "shear viscosity");
    app->add_option("--lambda", c.lambda, "bulk viscosity");
    app->add_option("--t-end", c.t_end, "final time");
    app->add_option("--rtol", c.rtol, "integrator relative tolerance");
    app->add_option("--beta", c.beta, "window length parameter of the multiplier w");
    app->add_option("--delta-beta", c.delta_beta, "companion parameter of beta");
    app->add_option("--s", c.s, "Sobolev index");
    app->add_option("--preset", c.preset, "named initial data");
    app->add_option("--out", c.out, "output path (default stdout)");
    app->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    app->add_option("--jobs", c.jobs, "worker threads: integer or auto (falls back to CSPEC_JOBS)");
    app->add_option("--seed", c.seed, "seed for random presets");
}

void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream f(path);
    if (!f) throw FlagError("cannot open '" + path + "' for writing");
    f << text;
}

std::string read_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw FlagError("cannot read '" + path + "'");
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

std::string csv_row(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        s += fmt17(v[i]);
    }
    return s + "\n";
}

std::string csv_header(const std::vector<std::string>& cols) {
    std::string s;
    for (std::size_t i = 0; i < cols.size(); ++i) s += (i ? "," : "") + cols[i];
    return s + "\n";
}

ojson num(double v) { return std::isfinite(v) ? ojson(v) : ojson(fmt17(v)); }

ojson table_json(const std::vector<std::string>& cols, const std::vector<std::vector<double>>& rows) {
    ojson t;
    t["columns"] = cols;
    auto& r = t["rows"] = ojson::array();
    for (const auto& row : rows) {
        ojson a = ojson::array();
        for (double v : row) a.push_back(num(v));
        r.push_back(std::move(a));
    }
    return t;
}

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::vector<double> sample_grid(double t_end, int n) {
    if (t_end == 0.0) return {};
    if (n < 2) throw FlagError("--samples must be >= 2");
    return linspace(0.0, t_end, std::size_t(n));
}

// ---- mode-run ---------------------------------------------------------------------------

struct ModeRunFlags {
    Common c;
    double R_in = 0.0, A_in = 0.0, xi_in = 0.0;
    bool r_set = false, a_set = false, xi_set = false;
    int samples = 1001;
};

struct Fit {
    std::string name;
    double t_lo = 0, t_hi = 0;
    bool ok = false;
    double slope = kNaN, residual = kNaN;
    std::size_t n = 0;
    std::string note;
};

Fit try_fit(const std::string& name, const Series& s, double lo, double hi) {
    Fit f;
    f.name = name;
    f.t_lo = lo;
    f.t_hi = hi;
    if (!(hi > lo && lo > 0.0)) {
        f.note = "empty window";
        return f;
    }
    try {
        const LineFit lf = fit_loglog(s, lo, hi);
        f.ok = true;
        f.slope = lf.slope;
        f.residual = lf.residual;
        f.n = lf.n;
    } catch (const std::invalid_argument& e) {
        f.note = e.what();
    }
    return f;
}

int cmd_mode_run(ModeRunFlags& m) {
    Common& c = m.c;
    InitialData d{0.0, 0.0, 0.0};
    int k = c.k;
    double eta = c.eta;
    if (!c.preset.empty()) {
        SpectralField fld;
        try {
            fld = assemble_preset(c.preset);
        } catch (const std::invalid_argument& e) {
            throw FlagError(e.what());
        }
        if (fld.modes.empty()) throw FlagError("preset '" + c.preset + "' holds no mode");
        const FieldMode& fm = fld.modes.back();
        k = fm.k;
        eta = fld.eta(fm);
        d = {fm.rho, fm.alpha, fm.omega};
    }
    if (m.r_set) d.R = m.R_in;
    if (m.a_set) d.A = m.A_in;
    const cplx xi = m.xi_set ? cplx(m.xi_in) : d.R + d.Omega;
    d.Omega = xi - d.R;
    if (!(c.t_end >= 0.0)) throw FlagError("--t-end must be >= 0");

    Frequency f;
    FluidParams fp;
    try {
        f = Frequency(k, eta);
        fp = FluidParams(c.mach, c.nu, c.lambda);
    } catch (const std::invalid_argument& e) {
        throw FlagError(e.what());
    }
    const WeightParams wp = c.weights();
    const double M = fp.mach;
    const bool inviscid = fp.inviscid();
    const double gamma = default_gamma(fp);
    WeightOptions wo;
    wo.s = c.s;
    wo.wp = wp;

    const std::vector<std::string> cols = {"t", "abs_R", "abs_A", "abs_Omega", "abs_Z", "E", "Ew"};
    std::vector<std::vector<double>> rows;
    auto sample = [&](double t, cplx R, cplx A, cplx Om) {
        const SymState z = to_sym(R, A, t, f, M);
        double E = kNaN, Ew = kNaN;
        if (inviscid) {
            E = energy_lemma31(z, t, f, M);
        } else {
            const GoodState g = to_good(ViscousState{R, A, Om}, fp);
            if (gamma > 0.0 && gamma <= 0.25)
                E = energy_E(weighted_triple(g, t, f, fp, WeightScheme::P_WEIGHT, wo), t, f, fp, gamma);
            if (fp.shear_visc > 0.0) Ew = energy_Ew(weighted_triple(g, t, f, fp, WeightScheme::W_WEIGHT, wo), t, f, fp);
        }
        rows.push_back({t, std::abs(R), std::abs(A), std::abs(Om), z.norm(), E, Ew});
    };

    const double tc = f.critical_time();
    PeakTracker growth;
    Series a_local;
    auto step = [&](double t, cplx R, cplx A, cplx Om) {
        growth.push(t, growth_quantity(t, R, A, Om, f, M));
        if (tc > 0.0 && t >= tc / 3.0 && t <= 3.0 * tc) {
            a_local.t.push_back(t);
            a_local.y.push_back(std::abs(A));
        }
    };

    PointResult pr;
    if (c.t_end > 0.0) {
        PointOptions po;
        po.integrator = c.integrator();
        pr = run_point({k, eta, c.mach, c.nu, c.lambda, c.t_end, 0}, d, po, sample_grid(c.t_end, m.samples), sample,
                       step);
        if (!pr.ok) {
            std::cerr << "mode-run: " << pr.error << "\n";
            return pr.error_kind == PointError::INTEGRATOR ? kExitIntegrator : kExitFlags;
        }
    }

    std::vector<Fit> fits;
    if (c.t_end > 0.0) {
        fits.push_back(try_fit("growth_envelope", growth.peaks(), c.t_end / 10.0, c.t_end));
        if (tc > 0.0) {
            fits.push_back(try_fit("abs_A_before_critical", a_local, tc / 3.0, std::min(tc, c.t_end)));
            fits.push_back(try_fit("abs_A_after_critical", a_local, tc, std::min(3.0 * tc, c.t_end)));
        }
    }

    if (c.format == "csv") {
        std::string text = csv_header(cols);
        for (const auto& r : rows) text += csv_row(r);
        emit(c.out, text);
        for (const auto& fit : fits) {
            std::cerr << "# fit " << fit.name << " [" << fmt17(fit.t_lo) << ", " << fmt17(fit.t_hi) << "]: ";
            if (fit.ok)
                std::cerr << "slope " << fit.slope << " residual " << fit.residual << " n " << fit.n << "\n";
            else
                std::cerr << fit.note << "\n";
        }
        return 0;
    }
    ojson j;
    j["schema"] = "cspec-mode/1";
    j["params"] = {{"k", k}, {"eta", eta}, {"mach", c.mach}, {"nu", c.nu}, {"lambda", c.lambda}, {"t_end", c.t_end},
                   {"rtol", c.rtol}, {"regime", fp.regime_label()}};
    j["initial"] = {{"R", {d.R.real(), d.R.imag()}}, {"A", {d.A.real(), d.A.imag()}},
                    {"Omega", {d.Omega.real(), d.Omega.imag()}}};
    j["series"] = table_json(cols, rows);
    auto& fj = j["fits"] = ojson::array();
    for (const auto& fit : fits) {
        ojson x;
        x["name"] = fit.name;
        x["t_lo"] = fit.t_lo;
        x["t_hi"] = fit.t_hi;
        x["ok"] = fit.ok;
        if (fit.ok) {
            x["slope"] = fit.slope;
            x["residual"] = fit.residual;
            x["n"] = fit.n;
        } else {
            x["note"] = fit.note;
        }
        fj.push_back(std::move(x));
    }
    if (c.t_end > 0.0)
        j["summary"] = {{"transient_max", num(pr.transient_max)}, {"t_at_max", num(pr.t_at_max)},
                        {"data_size", num(pr.data_size)}, {"steps", pr.stats.accepted}};
    emit(c.out, j.dump(2) + "\n");
    return 0;
}

// ---- field-run --------------------------------------------------------------------------

struct FieldRunFlags {
    Common c;
    int samples = 201;
    std::string field_in, field_out;
    int k_max = 8;
    double eta_max = 64.0, d_eta = 0.5;
};

int cmd_field_run(FieldRunFlags& m) {
    Common& c = m.c;
    GridSpec grid{m.k_max, m.eta_max, m.d_eta};
    SpectralField fld;
    try {
        grid.validate();
        if (!m.field_in.empty()) {
            fld = field_from_json(read_file(m.field_in));
        } else {
            const std::string preset = c.preset.empty() ? "fig1_forced" : c.preset;
            if (preset == "random_band") {
                RandomBand band;
                band.seed = c.seed;
                fld = assemble_random_band(grid, band);
            } else if (preset == "packet") {
                fld = assemble_smooth_packet(grid, SmoothPacket{});
            } else {
                fld = assemble_preset(preset, grid);
            }
        }
    } catch (const std::invalid_argument& e) {
        throw FlagError(e.what());
    }
    FluidParams fp;
    try {
        fp = FluidParams(c.mach, c.nu, c.lambda);
    } catch (const std::invalid_argument& e) {
        throw FlagError(e.what());
    }
    if (!(c.t_end >= 0.0)) throw FlagError("--t-end must be >= 0");
    FieldRunOptions opt;
    opt.integrator = c.integrator();
    opt.jobs = c.resolved_jobs();
    opt.keep_snapshots = !m.field_out.empty();
    const auto ts = sample_grid(c.t_end, m.samples);
    FieldRun run;
    if (!ts.empty()) {
        try {
            run = run_field(fld, fp, c.t_end, ts, opt);
        } catch (const IntegratorError& e) {
            std::cerr << "field-run: " << e.what() << "\n";
            return kExitIntegrator;
        }
    }
    const std::vector<std::string> cols = {"t", "Q_norm", "Px_norm", "Py_norm", "rho_norm", "velocity", "E0"};
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < run.times.size(); ++i) {
        const auto& n = run.norms[i];
        rows.push_back({run.times[i], n.Q_norm, n.Px_norm, n.Py_norm, n.rho_norm, n.velocity(), run.energy_E0[i]});
    }
    if (!m.field_out.empty() && !run.snapshots.empty()) emit(m.field_out, field_to_json(run.snapshots.back()));
    if (c.format == "csv") {
        std::string text = csv_header(cols);
        for (const auto& r : rows) text += csv_row(r);
        emit(c.out, text);
        return 0;
    }
    ojson j;
    j["schema"] = "cspec-fieldrun/1";
    j["params"] = {{"mach", c.mach}, {"nu", c.nu}, {"lambda", c.lambda}, {"t_end", c.t_end}, {"modes", fld.modes.size()},
                   {"regime", fp.regime_label()}};
    j["series"] = table_json(cols, rows);
    emit(c.out, j.dump(2) + "\n");
    return 0;
}

// ---- zero-mode --------------------------------------------------------------------------

struct ZeroFlags {
    Common c;
    std::string profile = "extremal";
    double eta_c = 2.0, d_eta = 0.02, eta_max = 0.0;
    int samples = 61;
};

int cmd_zero_mode(ZeroFlags& m) {
    Common& c = m.c;
    if (!(m.eta_c > 0.0 && m.d_eta > 0.0)) throw FlagError("--eta-c and --d-eta must be > 0");
    const double eta_max = m.eta_max > 0.0 ? m.eta_max : 4.0 * m.eta_c;
    ZeroField zf;
    if (m.profile == "extremal")
        zf = zero_profile_extremal(1.0, m.eta_c, m.d_eta, eta_max);
    else
        zf = zero_profile_smooth(1.0, m.eta_c, m.d_eta, eta_max);
    FluidParams fp;
    try {
        fp = FluidParams(c.mach, c.nu, c.lambda);
    } catch (const std::invalid_argument& e) {
        throw FlagError(e.what());
    }
    if (!(c.t_end >= 0.0)) throw FlagError("--t-end must be >= 0");
    std::vector<double> ts;
    if (c.t_end > 0.0) {
        if (m.samples < 3) throw FlagError("--samples must be >= 3");
        ts = logspace(std::min(1.0, c.t_end / 10.0), c.t_end, std::size_t(m.samples - 1));
        ts.insert(ts.begin(), 0.0);
    }
    ZeroAggregate agg;
    if (!ts.empty()) {
        try {
            agg = evolve_zero_field(zf, fp, c.t_end, c.integrator(), ts, {0, 1, 2}, c.resolved_jobs());
        } catch (const IntegratorError& e) {
            std::cerr << "zero-mode: " << e.what() << "\n";
            return kExitIntegrator;
        }
    }
    const std::vector<std::string> cols = {"t", "E0", "E1", "E2"};
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < agg.times.size(); ++i)
        rows.push_back({agg.times[i], agg.at(i, 0), agg.at(i, 1), agg.at(i, 2)});
    ojson fits = ojson::array();
    if (!fp.inviscid() && !rows.empty()) {
        for (std::size_t l = 1; l <= 2; ++l) {
            Series s;
            for (std::size_t i = 0; i < rows.size(); ++i) {
                s.t.push_back(rows[i][0]);
                s.y.push_back(rows[i][l + 1]);
            }
            try {
                const AlgebraicFit a = fit_one_plus_ct(s, 0.0, c.t_end, 1e-6, 1e4);
                fits.push_back({{"ell", l}, {"exponent", a.exponent}, {"c", a.c}, {"residual", a.residual}});
                if (c.format == "csv")
                    std::cerr << "# fit E" << l << " ~ (1+ct)^q: q " << a.exponent << " c " << a.c << " residual "
                              << a.residual << "\n";
            } catch (const std::invalid_argument& e) {
                std::cerr << "# fit E" << l << ": " << e.what() << "\n";
            }
        }
    }
    if (c.format == "csv") {
        std::string text = csv_header(cols);
        for (const auto& r : rows) text += csv_row(r);
        emit(c.out, text);
        return 0;
    }
    ojson j;
    j["schema"] = "cspec-zero/1";
    j["params"] = {{"profile", m.profile}, {"eta_c", m.eta_c}, {"d_eta", m.d_eta}, {"eta_max", eta_max},
                   {"mach", c.mach}, {"nu", c.nu}, {"lambda", c.lambda}, {"t_end", c.t_end}};
    j["series"] = table_json(cols, rows);
    j["fits"] = fits;
    emit(c.out, j.dump(2) + "\n");
    return 0;
}

// ---- sweep ------------------------------------------------------------------------------

struct SweepFlags {
    Common c;
    std::string spec_path, summary_path;
};

int cmd_sweep(SweepFlags& m) {
    SweepSpec spec;
    try {
        spec = sweep_from_json(read_file(m.spec_path));
        (void)spec.points();
    } catch (const std::invalid_argument& e) {
        throw FlagError(e.what());
    }
    const SweepResult res = run_sweep(spec, m.c.resolved_jobs());
    if (m.c.format == "csv") {
        emit(m.c.out, sweep_csv(res));
        const std::string summary = sweep_summary_json(res);
        if (m.summary_path.empty())
            std::cerr << summary;
        else
            emit(m.summary_path, summary);
    } else {
        ojson j = ojson::parse(sweep_summary_json(res));
        std::vector<std::string> cols = {"k", "eta", "mach", "nu", "lambda", "horizon", "data",
                                         "transient_max", "t_at_max", "data_size"};
        std::vector<std::vector<double>> rows;
        ojson status = ojson::array();
        for (const auto& r : res.rows) {
            const RunPoint& p = r.point;
            rows.push_back({double(p.k), p.eta, p.mach, p.nu, p.lambda, p.horizon, double(p.data), r.transient_max,
                            r.t_at_max, r.data_size});
            status.push_back(r.ok ? "ok" : "aborted: " + r.error);
        }
        j["table"] = table_json(cols, rows);
        j["table"]["status"] = status;
        emit(m.c.out, j.dump(2) + "\n");
    }
    return res.failed ? 1 : 0;
}

// ---- audit-multipliers ------------------------------------------------------------------

struct AuditFlags {
    Common c;
    bool grid = false;
    int points = 10000;
};

int cmd_audit(AuditFlags& m) {
    Common& c = m.c;
    if (!(c.nu > 0.0)) throw FlagError("audit-multipliers needs --nu > 0");
    if (m.points < 2) throw FlagError("--points must be >= 2");
    const WeightParams wp = c.weights();
    std::vector<Frequency> modes;
    try {
        if (m.grid) {
            for (int k = 1; k <= 5; ++k)
                for (int j = 0; j < 20; ++j) modes.emplace_back(k, -40.0 + 80.0 * j / 19.0);
        } else {
            modes.emplace_back(c.k, c.eta);
        }
    } catch (const std::invalid_argument& e) {
        throw FlagError(e.what());
    }
    const std::vector<std::string> cols = {"k", "eta", "nu", "inequality", "min_slack", "t_at_min", "first_violation"};
    std::string csv = csv_header(cols);
    ojson rows = ojson::array();
    bool violated = false;
    for (const auto& f : modes) {
        const double T = std::max(f.eta / f.k, 0.0) + 2.0 * wp.beta / std::cbrt(c.nu);
        const double t_end = m.grid ? T : (c.t_end > 0.0 ? c.t_end : T);
        const MultiplierReport rep = check_multiplier_inequalities(f, c.nu, wp, linspace(0.0, t_end, m.points));
        for (std::size_t i = 0; i < kNumMultiplierIneqs; ++i) {
            const IneqSlack& s = rep.slack[i];
            const double fv = s.first_violation ? *s.first_violation : kNaN;
            violated |= bool(s.first_violation);
            const char* label = ineq_label(MultiplierIneq(i));
            csv += std::to_string(f.k) + "," + fmt17(f.eta) + "," + fmt17(c.nu) + ",\"" + label + "\"," +
                   fmt17(s.min_slack) + "," + fmt17(s.t_at_min) + "," + fmt17(fv) + "\n";
            rows.push_back({{"k", f.k}, {"eta", f.eta}, {"nu", c.nu}, {"inequality", label},
                            {"min_slack", num(s.min_slack)}, {"t_at_min", num(s.t_at_min)},
                            {"first_violation", num(fv)}});
        }
    }
    if (c.format == "csv") {
        emit(c.out, csv);
    } else {
        ojson j;
        j["schema"] = "cspec-audit/1";
        j["beta"] = wp.beta;
        j["delta_beta"] = wp.delta_beta;
        j["all_hold"] = !violated;
        j["rows"] = rows;
        emit(c.out, j.dump(2) + "\n");
    }
    return violated ? 1 : 0;
}

// ---- verify -----------------------------------------------------------------------------

struct VerifyFlags {
    Common c;
    std::string level = "quick";
    std::vector<int> only;
    double w_exponent = 0.75;
};

int cmd_verify(VerifyFlags& m) {
    AcceptanceOptions opt;
    opt.level = m.level == "full" ? Level::FULL : Level::QUICK;
    opt.jobs = m.c.resolved_jobs();
    opt.weight.w_exponent = m.w_exponent;
    for (int id : m.only)
        if (!(id >= 1 && id <= int(criterion_ids().size())))
            throw FlagError("--only: unknown criterion " + std::to_string(id));
    std::vector<CriterionResult> results;
    for (int id : m.only.empty() ? criterion_ids() : m.only) {
        results.push_back(run_criterion(id, opt));
        std::cerr << summary_line(results.back()) << std::endl;
    }
    emit(m.c.out, report_json(results, opt.level, utc_timestamp()));
    for (const auto& r : results)
        if (!r.pass()) return 1;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cspec: linearized compressible Couette flow experiments"};
    app.require_subcommand(1);

    ModeRunFlags mode;
    auto* mode_cmd = app.add_subcommand("mode-run", "evolve one Fourier mode");
    add_common(mode_cmd, mode.c);
    mode_cmd->add_option("--R-in", mode.R_in, "initial density coefficient")->each([&](const std::string&) { mode.r_set = true; });
    mode_cmd->add_option("--A-in", mode.A_in, "initial divergence coefficient")->each([&](const std::string&) { mode.a_set = true; });
    mode_cmd->add_option("--xi-in", mode.xi_in, "initial R + Omega")->each([&](const std::string&) { mode.xi_set = true; });
    mode_cmd->add_option("--samples", mode.samples, "uniform output samples on [0, t_end]");

    FieldRunFlags field;
    auto* field_cmd = app.add_subcommand("field-run", "evolve a spectral field and report Helmholtz norms");
    add_common(field_cmd, field.c, false);
    field_cmd->add_option("--samples", field.samples, "uniform output samples on [0, t_end]");
    field_cmd->add_option("--field-in", field.field_in, "initial field document");
    field_cmd->add_option("--field-out", field.field_out, "write the final field here");
    field_cmd->add_option("--k-max", field.k_max, "grid: largest |k|");
    field_cmd->add_option("--eta-max", field.eta_max, "grid: largest |eta|");
    field_cmd->add_option("--d-eta", field.d_eta, "grid: eta spacing");

    ZeroFlags zero;
    auto* zero_cmd = app.add_subcommand("zero-mode", "aggregate zero-mode energies E^0, E^1, E^2");
    add_common(zero_cmd, zero.c, false);
    zero_cmd->add_option("--profile", zero.profile, "extremal or smooth")->check(CLI::IsMember({"extremal", "smooth"}));
    zero_cmd->add_option("--eta-c", zero.eta_c, "profile width");
    zero_cmd->add_option("--d-eta", zero.d_eta, "eta spacing");
    zero_cmd->add_option("--eta-max", zero.eta_max, "truncation (default 4 eta_c)");
    zero_cmd->add_option("--samples", zero.samples, "log-spaced output samples plus t = 0");

    SweepFlags sweep;
    auto* sweep_cmd = app.add_subcommand("sweep", "parameter sweep from a JSON spec");
    add_common(sweep_cmd, sweep.c, false);
    sweep_cmd->add_option("--spec", sweep.spec_path, "sweep spec file")->required();
    sweep_cmd->add_option("--summary", sweep.summary_path, "summary JSON path (default stderr)");

    AuditFlags audit;
    auto* audit_cmd = app.add_subcommand("audit-multipliers", "check the multiplier inequalities on a time grid");
    add_common(audit_cmd, audit.c);
    audit_cmd->add_flag("--grid", audit.grid, "audit k in 1..5 x 20 eta in [-40, 40] instead of one mode");
    audit_cmd->add_option("--points", audit.points, "time grid size");

    VerifyFlags verify;
    auto* verify_cmd = app.add_subcommand("verify", "run the acceptance suite");
    add_common(verify_cmd, verify.c, false);
    verify_cmd->add_option("--level", verify.level, "quick or full")->check(CLI::IsMember({"quick", "full"}));
    verify_cmd->add_option("--only", verify.only, "criterion ids");
    verify_cmd->add_option("--w-exponent", verify.w_exponent, "exponent of w in the E^w weights (mutation knob)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitFlags;
    }

    try {
        if (*mode_cmd) return cmd_mode_run(mode);
        if (*field_cmd) return cmd_field_run(field);
        if (*zero_cmd) return cmd_zero_mode(zero);
        if (*sweep_cmd) return cmd_sweep(sweep);
        if (*audit_cmd) return cmd_audit(audit);
        if (*verify_cmd) return cmd_verify(verify);
    } catch (const FlagError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFlags;
    } catch (const IntegratorError& e) {
        std::cerr << "integrator failure: " << e.what() << "\n";
        return kExitIntegrator;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitFlags;
}
