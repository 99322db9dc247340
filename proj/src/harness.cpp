#include "cspec/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "cspec/analysis.hpp"
#include "cspec/inviscid_mode.hpp"
#include "cspec/parallel.hpp"
#include "cspec/viscous_mode.hpp"
#include "json.hpp"

namespace cspec {

namespace {

int parse_jobs(const std::string& s, const char* what) {
    if (s == "auto") return std::max(1u, std::thread::hardware_concurrency());
    std::size_t used = 0;
    long v = 0;
    try {
        v = std::stol(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != s.size() || v < 1 || v > 4096)
        throw std::invalid_argument(std::string(what) + ": expected 'auto' or a positive integer, got '" + s + "'");
    return int(v);
}

}  // namespace

int resolve_jobs(const std::string& flag) {
    if (!flag.empty()) return parse_jobs(flag, "--jobs");
    if (const char* env = std::getenv("CSPEC_JOBS"); env && *env) return parse_jobs(env, "CSPEC_JOBS");
    return 1;
}

double data_size(const InitialData& d, const Frequency& f, double M) {
    return std::abs(d.A) + std::sqrt(p(0.0, f)) * std::abs(d.R) / M + std::abs(d.Omega);
}

double growth_quantity(double t, cplx R, cplx A, cplx Omega, const Frequency& f, double M) {
    const double pp = p(t, f);
    const double q = std::abs(A) / std::sqrt(pp);
    const double om = std::abs(Omega) / pp;
    const double px = std::abs(f.eta - f.k * t) * om;
    const double py = std::abs(double(f.k)) * om;
    return std::sqrt(q * q + px * px + py * py) + std::abs(R) / M;
}

PointResult run_point(const RunPoint& pt, const InitialData& d, const PointOptions& opt,
                      const std::vector<double>& sample_times, const PointObserver& on_sample,
                      const PointObserver& on_step) {
    PointResult res;
    res.point = pt;
    try {
        const Frequency f(pt.k, pt.eta);
        const FluidParams fp(pt.mach, pt.nu, pt.lambda);
        if (!(pt.horizon >= 0.0)) throw std::invalid_argument("run_point: horizon must be >= 0");
        const double M = fp.mach;
        res.data_size = data_size(d, f, M);
        if (!(res.data_size > 0.0)) throw std::invalid_argument("run_point: initial data vanish");

        double best = growth_quantity(0.0, d.R, d.A, d.Omega, f, M);
        res.t_at_max = 0.0;
        const double rate = std::cbrt(std::max(fp.shear_visc, fp.mu));
        auto step = [&](double t, cplx R, cplx A, cplx Om) {
            const double g = growth_quantity(t, R, A, Om, f, M);
            if (g > best) {
                best = g;
                res.t_at_max = t;
            }
            if (on_step) on_step(t, R, A, Om);
            return !(opt.early_stop && rate > 0.0 && t * rate > 1.0 && g < 1e-3 * best);
        };

        StreamResult sr;
        if (fp.inviscid()) {
            const InviscidInit init{d.R, d.A, d.Omega};
            const cplx xi = init.Xi_in();
            sr = solve_mode_stream(
                init, f, M, pt.horizon, opt.integrator, sample_times,
                [&](const ModeSample& s) {
                    if (on_sample) on_sample(s.t, s.R, s.A, s.Omega);
                },
                [&](double t, cplx R, cplx A) { return step(t, R, A, xi - R); });
        } else {
            sr = solve_viscous_stream(
                ViscousState{d.R, d.A, d.Omega}, f, fp, pt.horizon, opt.integrator, sample_times,
                [&](const ViscousSample& s) {
                    if (on_sample) on_sample(s.t, s.v.R_hat, s.v.A_hat, s.v.Omega_hat);
                },
                [&](double t, const ViscousState& v) { return step(t, v.R_hat, v.A_hat, v.Omega_hat); });
        }
        res.stats = sr.stats;
        res.stopped_early = sr.stopped_early;
        res.transient_max = best / res.data_size;
    } catch (const std::exception& e) {
        res.ok = false;
        res.error_kind = dynamic_cast<const IntegratorError*>(&e) ? PointError::INTEGRATOR : PointError::INVALID;
        res.error = e.what();
        res.transient_max = res.t_at_max = std::numeric_limits<double>::quiet_NaN();
    }
    return res;
}

namespace {

template <class T>
std::vector<T> or_default(const std::vector<T>& v, T def) {
    return v.empty() ? std::vector<T>{def} : v;
}

auto key(const RunPoint& p) { return std::make_tuple(p.k, p.eta, p.nu, p.mach, p.lambda, p.horizon, p.data); }

}  // namespace

std::vector<RunPoint> SweepSpec::points() const {
    const RunPoint def;
    const auto ks = or_default(k, def.k);
    const auto es = or_default(eta, def.eta), ms = or_default(mach, def.mach), ns = or_default(nu, def.nu),
               ls = or_default(lambda, def.lambda), hs = or_default(horizon, def.horizon);
    const std::size_t nd = std::max<std::size_t>(1, data.size());
    double total = double(ks.size()) * es.size() * ms.size() * ns.size() * ls.size() * hs.size() * nd;
    if (total > double(cap))
        throw std::invalid_argument("sweep: " + std::to_string(std::size_t(total)) + " points exceed the cap of " +
                                    std::to_string(cap));
    std::vector<RunPoint> pts;
    pts.reserve(std::size_t(total));
    for (int kk : ks)
        for (double e : es)
            for (double m : ms)
                for (double n : ns)
                    for (double l : ls)
                        for (double h : hs)
                            for (std::size_t di = 0; di < nd; ++di) pts.push_back({kk, e, m, n, l, h, di});
    std::sort(pts.begin(), pts.end(), [](const RunPoint& a, const RunPoint& b) { return key(a) < key(b); });
    pts.erase(std::unique(pts.begin(), pts.end(), [](const RunPoint& a, const RunPoint& b) { return key(a) == key(b); }),
              pts.end());
    return pts;
}

const InitialData& SweepSpec::data_at(std::size_t i) const {
    static const InitialData def{};
    if (data.empty()) return def;
    return data.at(i);
}

namespace {

using nlohmann::json;

template <class T>
std::vector<T> read_axis(const json& j, const char* name) {
    std::vector<T> out;
    if (!j.contains(name)) return out;
    const json& a = j.at(name);
    if (a.is_number()) return {a.get<T>()};
    if (!a.is_array()) throw std::invalid_argument(std::string("sweep spec: '") + name + "' must be a number or array");
    for (const auto& v : a) {
        if (!v.is_number()) throw std::invalid_argument(std::string("sweep spec: '") + name + "' holds a non-number");
        out.push_back(v.get<T>());
    }
    return out;
}

cplx read_cplx(const json& j, const char* name) {
    if (!j.contains(name)) return 0.0;
    const json& v = j.at(name);
    if (v.is_number()) return v.get<double>();
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
        return {v[0].get<double>(), v[1].get<double>()};
    throw std::invalid_argument(std::string("sweep spec: data field '") + name + "' must be x or [re, im]");
}

}  // namespace

SweepSpec sweep_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("sweep spec: ") + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument("sweep spec: top level must be an object");
    static const char* known[] = {"k", "eta", "mach", "nu", "lambda", "horizon", "data", "rtol", "cap"};
    for (const auto& [name, _] : j.items())
        if (std::find_if(std::begin(known), std::end(known), [&](const char* s) { return name == s; }) ==
            std::end(known))
            throw std::invalid_argument("sweep spec: unknown key '" + name + "'");
    SweepSpec s;
    s.k = read_axis<int>(j, "k");
    s.eta = read_axis<double>(j, "eta");
    s.mach = read_axis<double>(j, "mach");
    s.nu = read_axis<double>(j, "nu");
    s.lambda = read_axis<double>(j, "lambda");
    s.horizon = read_axis<double>(j, "horizon");
    if (j.contains("data")) {
        if (!j["data"].is_array()) throw std::invalid_argument("sweep spec: 'data' must be an array");
        for (const auto& d : j["data"]) {
            if (!d.is_object()) throw std::invalid_argument("sweep spec: data entries must be objects");
            s.data.push_back({read_cplx(d, "R"), read_cplx(d, "A"), read_cplx(d, "Omega")});
        }
    }
    if (j.contains("rtol")) s.rtol = j["rtol"].get<double>();
    if (j.contains("cap")) s.cap = j["cap"].get<std::size_t>();
    if (!(s.rtol > 0.0)) throw std::invalid_argument("sweep spec: rtol must be > 0");
    return s;
}

NuScaling nu_scaling(const std::vector<PointResult>& rows) {
    std::map<double, double> best;
    for (const auto& r : rows)
        if (r.ok && r.point.nu > 0.0) best[r.point.nu] = std::max(best[r.point.nu], r.transient_max);
    NuScaling sc;
    Series s;
    for (const auto& [nu, m] : best) {
        sc.nu.push_back(nu);
        sc.max_transient.push_back(m);
        s.t.push_back(nu);
        s.y.push_back(m);
    }
    if (best.size() >= 2) {
        const LineFit lf = fit_loglog(s, 0.0, std::numeric_limits<double>::infinity(), 2);
        sc.available = true;
        sc.exponent = lf.slope;
        sc.residual = lf.residual;
    }
    return sc;
}

SweepResult run_sweep(const SweepSpec& spec, int jobs) {
    const auto pts = spec.points();
    for (const auto& pt : pts) (void)spec.data_at(pt.data);
    SweepResult res;
    res.rows.resize(pts.size());
    PointOptions opt;
    opt.integrator.rtol = spec.rtol;
    opt.early_stop = true;
    parallel_for(pts.size(), jobs, [&](std::size_t i) { res.rows[i] = run_point(pts[i], spec.data_at(pts[i].data), opt); });
    for (const auto& r : res.rows)
        if (!r.ok) ++res.failed;
    res.scaling = nu_scaling(res.rows);
    return res;
}

std::string fmt17(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string sweep_csv(const SweepResult& res) {
    std::ostringstream os;
    os << "k,eta,mach,nu,lambda,horizon,data,quantity,value,status\n";
    for (const auto& r : res.rows) {
        std::string status = "ok";
        if (!r.ok) {
            status = "aborted: " + r.error;
            std::replace(status.begin(), status.end(), ',', ';');
            std::replace(status.begin(), status.end(), '\n', ' ');
        }
        const RunPoint& p = r.point;
        const std::string head = std::to_string(p.k) + "," + fmt17(p.eta) + "," + fmt17(p.mach) + "," + fmt17(p.nu) +
                                 "," + fmt17(p.lambda) + "," + fmt17(p.horizon) + "," + std::to_string(p.data) + ",";
        os << head << "transient_max," << fmt17(r.transient_max) << "," << status << "\n";
        os << head << "t_at_max," << fmt17(r.t_at_max) << "," << status << "\n";
        os << head << "data_size," << fmt17(r.data_size) << "," << status << "\n";
    }
    return os.str();
}

std::string sweep_summary_json(const SweepResult& res) {
    nlohmann::ordered_json j;
    j["schema"] = "cspec-sweep/1";
    j["points"] = res.rows.size();
    j["failed"] = res.failed;
    auto& sc = j["nu_scaling"];
    sc["quantity"] = "transient_max";
    sc["available"] = res.scaling.available;
    sc["nu"] = res.scaling.nu;
    sc["max_transient"] = res.scaling.max_transient;
    if (res.scaling.available) {
        sc["exponent"] = res.scaling.exponent;
        sc["residual"] = res.scaling.residual;
    }
    return j.dump(2) + "\n";
}

}  // namespace cspec
