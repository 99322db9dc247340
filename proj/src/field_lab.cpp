#include "cspec/field_lab.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <stdexcept>

#include <json.hpp>

#include "cspec/inviscid_mode.hpp"
#include "cspec/parallel.hpp"
#include "cspec/viscous_mode.hpp"
#include "cspec/zero_mode.hpp"

namespace cspec {

long GridSpec::j_max() const { return long(std::floor(eta_max / d_eta + 1e-9)); }

void GridSpec::validate() const {
    if (k_max < 1) throw std::invalid_argument("GridSpec: k_max must be >= 1");
    if (!(d_eta > 0.0) || !std::isfinite(d_eta)) throw std::invalid_argument("GridSpec: d_eta must be > 0");
    if (!(eta_max >= 0.0) || !std::isfinite(eta_max)) throw std::invalid_argument("GridSpec: eta_max must be >= 0");
}

bool GridSpec::contains(int k, long j) const {
    if (k == 0 && j == 0) return false;
    return std::abs(k) <= k_max && std::labs(j) <= j_max();
}

long GridSpec::index_of(double eta) const {
    const double r = eta / d_eta;
    const double j = std::round(r);
    if (std::abs(r - j) > 1e-9) throw std::invalid_argument("GridSpec: eta is not a multiple of d_eta");
    return long(j);
}

const FieldMode* SpectralField::find(int k, long j) const {
    auto it = std::lower_bound(modes.begin(), modes.end(), std::make_pair(k, j), [](const FieldMode& m, auto key) {
        return std::make_pair(m.k, m.j) < key;
    });
    if (it != modes.end() && it->k == k && it->j == j) return &*it;
    return nullptr;
}

namespace {

bool close(cplx a, cplx b) { return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)}); }

void sort_modes(SpectralField& f) {
    std::sort(f.modes.begin(), f.modes.end(),
              [](const FieldMode& a, const FieldMode& b) { return std::make_pair(a.k, a.j) < std::make_pair(b.k, b.j); });
}

// Representative of a conjugate pair: k > 0, or k = 0 with j > 0.
bool representative(int k, long j) { return k > 0 || (k == 0 && j > 0); }

}  // namespace

SpectralField assemble(const GridSpec& grid, const std::vector<ModeSpec>& specs, bool conjugate_symmetric) {
    grid.validate();
    std::map<std::pair<int, long>, FieldMode> acc;
    for (const auto& s : specs) {
        const long j = grid.index_of(s.eta);
        if (!grid.contains(s.k, j)) throw std::invalid_argument("assemble: mode (k, eta) is off the grid");
        const FieldMode m{s.k, j, s.rho, s.alpha, s.omega};
        auto [it, fresh] = acc.emplace(std::make_pair(s.k, j), m);
        if (!fresh) throw std::invalid_argument("assemble: duplicate mode");
    }
    if (conjugate_symmetric) {
        std::vector<FieldMode> add;
        for (const auto& [key, m] : acc) {
            const FieldMode c{-m.k, -m.j, std::conj(m.rho), std::conj(m.alpha), std::conj(m.omega)};
            auto it = acc.find({c.k, c.j});
            if (it == acc.end()) {
                add.push_back(c);
            } else if (!close(it->second.rho, c.rho) || !close(it->second.alpha, c.alpha) ||
                       !close(it->second.omega, c.omega)) {
                throw std::invalid_argument("assemble: supplied conjugate partner is inconsistent");
            }
        }
        for (const auto& c : add) acc.emplace(std::make_pair(c.k, c.j), c);
    }
    SpectralField f;
    f.grid = grid;
    for (auto& [key, m] : acc) f.modes.push_back(m);
    return f;
}

std::vector<std::string> preset_names() { return {"fig1_forced", "fig1_transient", "zero"}; }

SpectralField assemble_preset(const std::string& name, const GridSpec& grid) {
    if (name == "fig1_forced") return assemble(grid, {{3, 21.0, 0.0, 0.0, 5.0}});
    if (name == "fig1_transient") return assemble(grid, {{3, 21.0, 20.0, 50.0, 5.0 - 20.0}});
    if (name == "zero") return assemble(grid, {});
    throw std::invalid_argument("assemble_preset: unknown preset '" + name + "'");
}

SpectralField assemble_random_band(const GridSpec& grid, const RandomBand& band) {
    grid.validate();
    if (band.k_lo < 1 || band.k_hi < band.k_lo || band.k_hi > grid.k_max)
        throw std::invalid_argument("random_band: need 1 <= k_lo <= k_hi <= k_max");
    std::mt19937_64 rng(band.seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    auto draw = [&] {
        const double re = nd(rng);
        return cplx(re, nd(rng)) * band.amplitude;
    };
    const long jlo = long(std::ceil(band.eta_lo / grid.d_eta - 1e-9));
    const long jhi = long(std::floor(band.eta_hi / grid.d_eta + 1e-9));
    std::vector<ModeSpec> specs;
    for (int k = band.k_lo; k <= band.k_hi; ++k)
        for (long j = jlo; j <= jhi; ++j) {
            if (!grid.contains(k, j)) continue;
            ModeSpec s{k, j * grid.d_eta, draw(), draw(), 0.0};
            s.omega = band.xi_zero ? -s.rho : draw();
            specs.push_back(s);
        }
    return assemble(grid, specs);
}

SpectralField assemble_smooth_packet(const GridSpec& grid, const SmoothPacket& pk) {
    grid.validate();
    if (pk.k_lo < 1 || pk.k_hi < pk.k_lo || pk.k_hi > grid.k_max)
        throw std::invalid_argument("smooth_packet: need 1 <= k_lo <= k_hi <= k_max");
    if (!(pk.width > 0.0)) throw std::invalid_argument("smooth_packet: width must be > 0");
    std::vector<ModeSpec> specs;
    const long jm = grid.j_max();
    for (int k = pk.k_lo; k <= pk.k_hi; ++k)
        for (long j = -jm; j <= jm; ++j) {
            const double eta = j * grid.d_eta;
            const double g = std::exp(-std::pow((eta - pk.eta0) / pk.width, 2));
            if (g < 1e-300) continue;
            specs.push_back({k, eta, g * pk.rho, g * pk.alpha, g * pk.omega});
        }
    return assemble(grid, specs);
}

double HelmholtzNorms::velocity() const { return std::sqrt(Q_norm * Q_norm + Px_norm * Px_norm + Py_norm * Py_norm); }

HelmholtzNorms helmholtz_norms(const SpectralField& field, double t) {
    double q = 0, px = 0, py = 0, r = 0, pxx = 0, pxr = 0, pyx = 0, pyr = 0;
    const double de = field.grid.d_eta;
    for (const auto& m : field.modes) {
        const double eta = field.eta(m);
        const double sh = eta - m.k * t;
        const double pp = double(m.k) * m.k + sh * sh;
        const double cx = sh / pp, cy = m.k / pp;
        const cplx xi = m.rho + m.omega;
        q += std::norm(m.alpha) / pp;
        px += cx * cx * std::norm(m.omega);
        py += cy * cy * std::norm(m.omega);
        r += std::norm(m.rho);
        pxx += cx * cx * std::norm(xi);
        pxr += cx * cx * std::norm(m.rho);
        pyx += cy * cy * std::norm(xi);
        pyr += cy * cy * std::norm(m.rho);
    }
    auto nrm = [de](double s) { return std::sqrt(de * s); };
    return {nrm(q), nrm(px), nrm(py), nrm(r), nrm(pxx), nrm(pxr), nrm(pyx), nrm(pyr)};
}

double sobolev_norm(const SpectralField& field, const NormSpec& spec, Quantity qty) {
    const double t = field.time;
    double acc = 0.0;
    for (const auto& m : field.modes) {
        const double eta = field.eta(m);
        const double k = m.k;
        const double phys = spec.frame == NormFrame::MOVING ? eta - k * t : eta;
        double w = 1.0;
        switch (spec.kind) {
            case NormKind::L2: break;
            case NormKind::ISO: w = std::pow(1.0 + k * k + phys * phys, spec.s); break;
            case NormKind::ANISO: w = std::pow(1.0 + k * k, spec.s1) * std::pow(1.0 + phys * phys, spec.s2); break;
        }
        const double pp = k * k + (eta - k * t) * (eta - k * t);
        double v = 0.0;
        switch (qty) {
            case Quantity::RHO: v = std::norm(m.rho); break;
            case Quantity::ALPHA: v = std::norm(m.alpha); break;
            case Quantity::OMEGA: v = std::norm(m.omega); break;
            case Quantity::Q_IRROT: v = std::norm(m.alpha) / pp; break;
            case Quantity::P_SOLENOIDAL: v = std::norm(m.omega) / pp; break;
        }
        acc += w * v;
    }
    return std::sqrt(field.grid.d_eta * acc);
}

double conjugate_defect(const SpectralField& field) {
    double d = 0.0;
    for (const auto& m : field.modes) {
        const FieldMode* c = field.find(-m.k, -m.j);
        if (!c) {
            d = std::max({d, std::abs(m.rho), std::abs(m.alpha), std::abs(m.omega)});
            continue;
        }
        d = std::max({d, std::abs(m.rho - std::conj(c->rho)), std::abs(m.alpha - std::conj(c->alpha)),
                      std::abs(m.omega - std::conj(c->omega))});
    }
    return d;
}

namespace {

struct ModeSeries {
    std::vector<FieldMode> at;  // one per sample time
    StepStats stats;
};

ModeSeries evolve_mode(const FieldMode& m, double d_eta, const FluidParams& fp, double horizon,
                       const std::vector<double>& times, const IntegratorOptions& opt) {
    ModeSeries out;
    out.at.reserve(times.size());
    const double eta = m.j * d_eta;
    if (m.k == 0) {
        const auto hist = solve_zero({m.rho, m.alpha, m.omega, eta}, fp, horizon, opt, times);
        for (const auto& h : hist) out.at.push_back({0, m.j, h.state.rho0, h.state.alpha0, h.state.omega0});
        return out;
    }
    const Frequency f(m.k, eta);
    if (fp.inviscid()) {
        const InviscidInit init{m.rho, m.alpha, m.omega};
        auto res = solve_mode_stream(init, f, fp.mach, horizon, opt, times, [&](const ModeSample& s) {
            out.at.push_back({m.k, m.j, s.R, s.A, s.Omega});
        });
        out.stats = res.stats;
        return out;
    }
    auto res = solve_viscous_stream({m.rho, m.alpha, m.omega}, f, fp, horizon, opt, times,
                                    [&](const ViscousSample& s) {
                                        out.at.push_back({m.k, m.j, s.v.R_hat, s.v.A_hat, s.v.Omega_hat});
                                    });
    out.stats = res.stats;
    return out;
}

}  // namespace

FieldRun run_field(const SpectralField& field, const FluidParams& fp, double horizon,
                   const std::vector<double>& sample_times, const FieldRunOptions& opt) {
    if (!(horizon >= 0.0)) throw std::invalid_argument("run_field: horizon must be >= 0");
    if (field.time != 0.0) throw std::invalid_argument("run_field: initial field must be at t = 0");
    for (double t : sample_times)
        if (t < 0.0 || t > horizon) throw std::invalid_argument("run_field: sample times must lie in [0, horizon]");
    if (!std::is_sorted(sample_times.begin(), sample_times.end()))
        throw std::invalid_argument("run_field: sample times must be sorted");

    // Evolve representatives; partners without a representative are evolved themselves.
    std::vector<std::size_t> work;
    for (std::size_t i = 0; i < field.modes.size(); ++i) {
        const auto& m = field.modes[i];
        if (representative(m.k, m.j) || !field.find(-m.k, -m.j)) work.push_back(i);
    }
    std::vector<ModeSeries> series(work.size());
    const double de = field.grid.d_eta;
    parallel_for(work.size(), opt.jobs, [&](std::size_t w) {
        series[w] = evolve_mode(field.modes[work[w]], de, fp, horizon, sample_times, opt.integrator);
    });

    FieldRun run;
    run.times = sample_times;
    run.regime = fp.regime_label();
    for (const auto& s : series) {
        run.stats.accepted += s.stats.accepted;
        run.stats.rejected += s.stats.rejected;
        run.stats.max_err = std::max(run.stats.max_err, s.stats.max_err);
    }
    const std::size_t nt = sample_times.size();
    run.norms.reserve(nt);
    run.energy_E0.assign(nt, 0.0);
    for (std::size_t ti = 0; ti < nt; ++ti) {
        SpectralField snap;
        snap.grid = field.grid;
        snap.time = sample_times[ti];
        snap.modes.reserve(field.modes.size());
        for (std::size_t w = 0; w < work.size(); ++w) {
            const FieldMode& m = series[w].at[ti];
            snap.modes.push_back(m);
            const FieldMode& orig = field.modes[work[w]];
            if (representative(orig.k, orig.j) && field.find(-orig.k, -orig.j))
                snap.modes.push_back({-m.k, -m.j, std::conj(m.rho), std::conj(m.alpha), std::conj(m.omega)});
        }
        sort_modes(snap);
        run.norms.push_back(helmholtz_norms(snap, snap.time));
        for (const auto& m : snap.modes)
            if (m.k == 0) run.energy_E0[ti] += de * energy_El({m.rho, m.alpha, m.omega, m.j * de}, 0, fp);
        if (opt.keep_snapshots) run.snapshots.push_back(std::move(snap));
    }
    return run;
}

std::string field_to_json(const SpectralField& field) {
    nlohmann::ordered_json j;
    j["schema"] = "cspec-field/1";
    j["grid"] = {{"k_max", field.grid.k_max}, {"eta_max", field.grid.eta_max}, {"d_eta", field.grid.d_eta}};
    j["time"] = field.time;
    auto arr = nlohmann::ordered_json::array();
    for (const auto& m : field.modes)
        arr.push_back({{"k", m.k},
                       {"j", m.j},
                       {"rho_re", m.rho.real()},
                       {"rho_im", m.rho.imag()},
                       {"alpha_re", m.alpha.real()},
                       {"alpha_im", m.alpha.imag()},
                       {"omega_re", m.omega.real()},
                       {"omega_im", m.omega.imag()}});
    j["modes"] = std::move(arr);
    return j.dump(2);
}

namespace {

SpectralField parse_field(const nlohmann::json& j) {
    if (j.value("schema", "") != "cspec-field/1") throw std::invalid_argument("field_from_json: schema must be cspec-field/1");
    SpectralField f;
    f.grid.k_max = j.at("grid").at("k_max").get<int>();
    f.grid.eta_max = j.at("grid").at("eta_max").get<double>();
    f.grid.d_eta = j.at("grid").at("d_eta").get<double>();
    f.grid.validate();
    f.time = j.value("time", 0.0);
    for (const auto& m : j.at("modes")) {
        FieldMode fm;
        fm.k = m.at("k").get<int>();
        fm.j = m.at("j").get<long>();
        if (!f.grid.contains(fm.k, fm.j)) throw std::invalid_argument("field_from_json: mode off the grid");
        fm.rho = {m.at("rho_re").get<double>(), m.at("rho_im").get<double>()};
        fm.alpha = {m.at("alpha_re").get<double>(), m.at("alpha_im").get<double>()};
        fm.omega = {m.at("omega_re").get<double>(), m.at("omega_im").get<double>()};
        f.modes.push_back(fm);
    }
    sort_modes(f);
    for (std::size_t i = 1; i < f.modes.size(); ++i)
        if (f.modes[i].k == f.modes[i - 1].k && f.modes[i].j == f.modes[i - 1].j)
            throw std::invalid_argument("field_from_json: duplicate mode");
    return f;
}

}  // namespace

SpectralField field_from_json(const std::string& text) {
    try {
        return parse_field(nlohmann::json::parse(text));
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("field_from_json: ") + e.what());
    }
}

std::vector<PhysicalSample> physical_samples(const SpectralField& field, Quantity q, int nx, int ny, double y_half) {
    if (nx < 1 || ny < 1) throw std::invalid_argument("physical_samples: need nx, ny >= 1");
    const double t = field.time;
    const double two_pi = 2.0 * 3.14159265358979323846;
    std::vector<PhysicalSample> out;
    out.reserve(std::size_t(nx) * ny);
    for (int iy = 0; iy < ny; ++iy) {
        const double y = ny == 1 ? 0.0 : -y_half + 2.0 * y_half * iy / (ny - 1);
        for (int ix = 0; ix < nx; ++ix) {
            const double x = two_pi * ix / nx;
            cplx acc = 0.0;
            for (const auto& m : field.modes) {
                const double eta = field.eta(m);
                const double pp = double(m.k) * m.k + (eta - m.k * t) * (eta - m.k * t);
                cplx c;
                switch (q) {
                    case Quantity::RHO: c = m.rho; break;
                    case Quantity::ALPHA: c = m.alpha; break;
                    case Quantity::OMEGA: c = m.omega; break;
                    case Quantity::Q_IRROT: c = m.alpha / std::sqrt(pp); break;
                    case Quantity::P_SOLENOIDAL: c = m.omega / std::sqrt(pp); break;
                }
                acc += c * std::polar(1.0, m.k * (x - t * y) + eta * y);
            }
            out.push_back({x, y, field.grid.d_eta * acc.real()});
        }
    }
    return out;
}

}  // namespace cspec
