#include "idel/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "idel/rng.hpp"

namespace idel {

using nlohmann::json;

namespace {

struct Issues {
    std::vector<std::string> list;
    void add(const std::string& s) { list.push_back(s); }
    void raise_if_any() const {
        if (list.empty()) return;
        std::string all = "configuration invalid:";
        for (const auto& s : list) all += "\n  - " + s;
        throw validation_error(all);
    }
};

ScalarFn parse_scalar(const json& j, Issues& issues, const std::string& where) {
    if (!j.is_object() || !j.contains("kind")) {
        issues.add(where + ": expected an object with a \"kind\"");
        return ScalarFn::constant(0.0);
    }
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "constant") return ScalarFn::constant(j.value("value", 0.0));
    if (kind == "poly") {
        std::vector<double> coeffs = j.value("coeffs", std::vector<double>{});
        return ScalarFn::poly(std::move(coeffs));
    }
    if (kind == "exp_affine") {
        return ScalarFn::exp_affine(j.value("alpha", 1.0), j.value("beta", 0.0),
                                    j.value("offset", 0.0));
    }
    issues.add(where + ": unknown scalar-function kind \"" + kind + "\"");
    return ScalarFn::constant(0.0);
}

BoundaryFunctional parse_functional(const json& j, Issues& issues, const std::string& where) {
    if (!j.is_object() || !j.contains("kind")) {
        issues.add(where + ": expected an object with a \"kind\"");
        return BoundaryFunctional::zero();
    }
    const std::string kind = j.at("kind").get<std::string>();
    const double scale = j.value("scale", 1.0);
    if (kind == "zero") return BoundaryFunctional::zero();
    if (kind == "point_eval_end" || kind == "x(1)") {
        return BoundaryFunctional::point_eval_end(scale);
    }
    if (kind == "weighted_integral") {
        ScalarFn w = j.contains("weight") ? parse_scalar(j.at("weight"), issues, where + ".weight")
                                          : ScalarFn::constant(1.0);
        auto f = BoundaryFunctional::weighted_integral(std::move(w), j.value("times_d", false),
                                                       scale);
        f.d_index = j.value("d_index", 0);
        return f;
    }
    if (kind == "input_u" || kind == "u") {
        return BoundaryFunctional::input_u(j.value("u_index", 0), scale);
    }
    issues.add(where + ": unknown functional kind \"" + kind + "\"");
    return BoundaryFunctional::zero();
}

std::vector<double> parse_matrix(const json& j, int n, int cols, Issues& issues,
                                 const std::string& where) {
    std::vector<double> flat;
    if (!j.is_array() || static_cast<int>(j.size()) != n) {
        issues.add(where + ": expected " + std::to_string(n) + " rows");
        return std::vector<double>(static_cast<std::size_t>(n) * cols, 0.0);
    }
    for (const auto& row : j) {
        if (!row.is_array() || static_cast<int>(row.size()) != cols) {
            issues.add(where + ": expected rows of length " + std::to_string(cols));
            return std::vector<double>(static_cast<std::size_t>(n) * cols, 0.0);
        }
        for (const auto& v : row) flat.push_back(v.get<double>());
    }
    return flat;
}

ParsedSystem parse_system_json(const json& j) {
    Issues issues;
    if (!j.is_object() || !j.contains("type")) {
        issues.add("system: expected an object with a \"type\"");
        issues.raise_if_any();
    }
    const std::string type = j.at("type").get<std::string>();

    if (type == "linear_scalar_distributed") {
        const double r = j.value("r", 1.0);
        if (!(r > 0)) issues.add("system.r must be positive");
        ScalarFn q = j.contains("q") ? parse_scalar(j.at("q"), issues, "system.q")
                                     : ScalarFn::constant(0.0);
        issues.raise_if_any();
        return ParsedSystem{make_linear_scalar_distributed(std::move(q), r)};
    }

    if (type == "point_plus_kernel") {
        PointPlusKernel desc;
        desc.n = j.value("n", 1);
        const double r = j.value("r", 1.0);
        if (desc.n < 1) issues.add("system.n must be >= 1");
        if (!(r > 0)) issues.add("system.r must be positive");
        for (const auto& p : j.value("points", json::array())) {
            PointPlusKernel::PointTerm t;
            t.tau = p.value("tau", r);
            t.matrix = parse_matrix(p.value("matrix", json::array()), desc.n, desc.n, issues,
                                    "system.points.matrix");
            desc.points.push_back(std::move(t));
        }
        for (const auto& p : j.value("kernels", json::array())) {
            PointPlusKernel::KernelTerm t;
            t.fn = p.contains("fn") ? parse_scalar(p.at("fn"), issues, "system.kernels.fn")
                                    : ScalarFn::constant(0.0);
            t.matrix = parse_matrix(p.value("matrix", json::array()), desc.n, desc.n, issues,
                                    "system.kernels.matrix");
            desc.kernels.push_back(std::move(t));
        }
        if (j.contains("input_matrix")) {
            const auto& im = j.at("input_matrix");
            const int m2 = im.empty() ? 0 : static_cast<int>(im.at(0).size());
            desc.input_matrix = parse_matrix(im, desc.n, m2, issues, "system.input_matrix");
        }
        issues.raise_if_any();
        return ParsedSystem{make_point_plus_kernel(std::move(desc), r)};
    }

    if (type == "hyperbolic") {
        auto sys = std::make_shared<HyperbolicSystem>();
        sys->c = j.value("c", 1.0);
        if (!(sys->c > 0)) issues.add("system.c must be positive");
        if (j.contains("a")) {
            const auto& a = j.at("a");
            sys->a_fn.base = a.contains("base") ? parse_scalar(a.at("base"), issues, "system.a.base")
                                                : ScalarFn::constant(0.0);
            sys->a_fn.p_coeffs = a.value("p_coeffs", std::vector<double>{});
        }
        for (const auto& g : j.value("g", json::array())) {
            sys->g_fns.push_back(parse_scalar(g, issues, "system.g[]"));
        }
        for (const auto& k : j.value("K", json::array())) {
            sys->K_fns.push_back(parse_functional(k, issues, "system.K[]"));
        }
        if (sys->K_fns.empty()) issues.add("system.K must list at least one functional");
        if (sys->g_fns.size() != sys->K_fns.size()) {
            issues.add("system.g and system.K must have the same length");
        }
        sys->G_fn = j.contains("G") ? parse_functional(j.at("G"), issues, "system.G")
                                    : BoundaryFunctional::zero();
        sys->m1 = j.value("m1", 0);
        sys->m2 = j.value("m2", 0);
        sys->d_bound = j.value("d_bound", 1.0);
        if (sys->a_fn.p_coeffs.size() > static_cast<std::size_t>(sys->n_channels())) {
            issues.add("system.a.p_coeffs has more entries than p channels");
        }
        issues.raise_if_any();
        return ParsedSystem{sys};
    }

    issues.add("unknown system type \"" + type + "\"");
    issues.raise_if_any();
    return ParsedSystem{IdeSystem{}};
}

// --- signal and profile specs ---------------------------------------------

struct SignalSpec {
    enum class Kind { Zero, Constant, Step, Ramp, Random };
    Kind kind = Kind::Zero;
    double value = 0.0;  // constant / step height
    double at = 0.0;     // step time
    double slope = 0.0;  // ramp
    double amp = 0.0;    // random amplitude
};

SignalSpec parse_signal(const json& j, Issues& issues, const std::string& where) {
    SignalSpec s;
    if (j.is_null()) return s;
    if (!j.is_object() || !j.contains("kind")) {
        issues.add(where + ": expected an object with a \"kind\"");
        return s;
    }
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "zero") {
        s.kind = SignalSpec::Kind::Zero;
    } else if (kind == "constant") {
        s.kind = SignalSpec::Kind::Constant;
        s.value = j.value("value", 0.0);
    } else if (kind == "step") {
        s.kind = SignalSpec::Kind::Step;
        s.value = j.value("height", 1.0);
        s.at = j.value("at", 0.0);
    } else if (kind == "ramp") {
        s.kind = SignalSpec::Kind::Ramp;
        s.slope = j.value("slope", 1.0);
    } else if (kind == "random") {
        s.kind = SignalSpec::Kind::Random;
        s.amp = j.value("amp", 1.0);
    } else {
        issues.add(where + ": unknown signal kind \"" + kind + "\"");
    }
    return s;
}

// One scalar channel on a grid. Random cells come from the SplitMix64 stream
// (seed, channel), counter = local cell index: deterministic and
// reproducible from the documented generator alone.
std::vector<double> materialize_channel(const SignalSpec& s, const Grid& g,
                                        std::uint64_t seed, std::uint64_t channel) {
    std::vector<double> vals(static_cast<std::size_t>(g.count()), 0.0);
    SplitMix64 rng = SplitMix64::stream(seed, channel);
    for (std::int64_t k = 0; k < g.count(); ++k) {
        const double t = g.cell_mid(g.first_cell() + k);
        switch (s.kind) {
            case SignalSpec::Kind::Zero: vals[k] = 0.0; break;
            case SignalSpec::Kind::Constant: vals[k] = s.value; break;
            case SignalSpec::Kind::Step: vals[k] = t >= s.at ? s.value : 0.0; break;
            case SignalSpec::Kind::Ramp: vals[k] = s.slope * t; break;
            case SignalSpec::Kind::Random: vals[k] = rng.next_in(-s.amp, s.amp); break;
        }
    }
    return vals;
}

SampledFn materialize_signals(const std::vector<SignalSpec>& specs, const Grid& g,
                              std::uint64_t seed) {
    const int dim = std::max(1, static_cast<int>(specs.size()));
    std::vector<double> vals(static_cast<std::size_t>(g.count()) * dim, 0.0);
    for (std::size_t ch = 0; ch < specs.size(); ++ch) {
        const std::vector<double> col = materialize_channel(specs[ch], g, seed, ch);
        for (std::int64_t k = 0; k < g.count(); ++k) vals[k * dim + ch] = col[k];
    }
    return SampledFn(g, dim, std::move(vals));
}

SampledFn materialize_profile(const SignalSpec& s, int K, std::uint64_t seed) {
    const Grid zg = profile_grid(K);
    return SampledFn(zg, 1, materialize_channel(s, zg, seed, 0xF0));
}

std::vector<SignalSpec> parse_input_specs(const json& j, int m1, int m2, Issues& issues) {
    std::vector<SignalSpec> specs(static_cast<std::size_t>(std::max(1, m1 + m2)));
    if (j.is_null()) return specs;
    const json d = j.value("d", json());
    const json u = j.value("u", json());
    auto fill = [&](const json& src, int offset, int count, const char* name) {
        if (src.is_null()) return;
        if (src.is_array()) {
            if (static_cast<int>(src.size()) != count) {
                issues.add(std::string("input.") + name + ": expected " +
                           std::to_string(count) + " channel specs");
                return;
            }
            for (int i = 0; i < count; ++i) {
                specs[offset + i] = parse_signal(src.at(i), issues, std::string("input.") + name);
            }
        } else if (count >= 1) {
            specs[offset] = parse_signal(src, issues, std::string("input.") + name);
        }
    };
    fill(d, 0, m1, "d");
    fill(u, m1, m2, "u");
    return specs;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path);
    if (!f) throw domain_error("cannot open " + path + " for writing");
    f << text;
}

void write_boundary_csv(const SampledFn& pv_or_p, const SampledFn* v_sep,
                        const std::string& path) {
    // Either a combined (p..,v) function or two scalar traces.
    std::string out = "t_lo,t_hi,p,v\n";
    char buf[128];
    const Grid& g = pv_or_p.grid();
    for (std::int64_t k = 0; k < g.count(); ++k) {
        const std::int64_t gk = g.first_cell() + k;
        double p, v;
        if (v_sep) {
            p = pv_or_p.cell_local(k)[0];
            v = v_sep->cell_local(k)[0];
        } else {
            p = pv_or_p.cell_local(k)[0];
            v = pv_or_p.cell_local(k)[pv_or_p.dim() - 1];
        }
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", g.cell_lo(gk), g.cell_hi(gk),
                      p, v);
        out += buf;
    }
    write_text(path, out);
}

std::string snapshot_name(double t) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "profile_t%g.csv", t);
    return buf;
}

} // namespace

ScalarFn parse_scalar_fn(const std::string& text) {
    Issues issues;
    ScalarFn f = parse_scalar(json::parse(text), issues, "scalar_fn");
    issues.raise_if_any();
    return f;
}

IssCertificate parse_certificate(const std::string& text, double r) {
    const json j = json::parse(text);
    Issues issues;
    std::vector<double> weights = j.value("weights", std::vector<double>{});
    if (weights.empty()) issues.add("cert.weights must be a nonempty array");
    const double lambda = j.value("lambda", 0.0);
    GainFn gamma;
    if (j.contains("gamma")) {
        const auto& gj = j.at("gamma");
        const std::string kind = gj.value("kind", "zero");
        if (kind == "linear") {
            gamma = GainFn::linear(gj.value("gain", 0.0));
        } else if (kind != "zero") {
            issues.add("cert.gamma.kind must be \"zero\" or \"linear\"");
        }
    }
    issues.raise_if_any();
    std::optional<double> sigma;
    if (j.contains("sigma_rate")) sigma = j.at("sigma_rate").get<double>();
    return make_certificate(std::move(weights), lambda, gamma, r, sigma);
}

IdeSystem ParsedSystem::as_ide() const {
    if (const auto* ide = std::get_if<IdeSystem>(&value)) return *ide;
    return to_ide(std::get<std::shared_ptr<HyperbolicSystem>>(value));
}

ParsedSystem parse_system(const std::string& text) { return parse_system_json(json::parse(text)); }

void write_profile_csv(const SampledFn& profile, const std::string& path) {
    std::string out = "z_lo,z_hi,x\n";
    char buf[80];
    const Grid& g = profile.grid();
    for (std::int64_t k = 0; k < g.count(); ++k) {
        const std::int64_t gk = g.first_cell() + k;
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", g.cell_lo(gk), g.cell_hi(gk),
                      profile.cell_local(k)[0]);
        out += buf;
    }
    write_text(path, out);
}

EquivalenceReport equivalence_audit(const HyperbolicSystem& sys, const SampledFn& x0_coarse,
                                    const SampledFn& w_coarse, double T,
                                    const std::vector<double>& sample_times) {
    EquivalenceReport rep;
    SolveConfig cfg;
    auto discrepancy = [&](const SampledFn& x0, const SampledFn& w) {
        const PdeResult route_a = solve_pde(sys, x0, w, T, cfg, sample_times);
        const auto route_b = upwind_reference(sys, x0, w, T, sample_times);
        double worst = 0.0;
        for (std::size_t i = 0; i < route_a.snapshots.size() && i < route_b.size(); ++i) {
            worst = std::max(worst,
                             route_a.snapshots[i].second.sup_diff(route_b[i].second));
        }
        return worst;
    };
    rep.disc_coarse = discrepancy(x0_coarse, w_coarse);
    rep.disc_fine = discrepancy(x0_coarse.refined(2), w_coarse.refined(2));
    rep.ratio = rep.disc_fine > 0.0 ? rep.disc_coarse / rep.disc_fine
                                    : (rep.disc_coarse == 0.0 ? 2.0 : 1e99);
    return rep;
}

int run_scenario_json(const std::string& scenario_json, const std::string& out_dir) {
    json j;
    try {
        j = json::parse(scenario_json);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "scenario: JSON parse error: %s\n", e.what());
        return kExitValidation;
    }

    try {
        std::filesystem::create_directories(out_dir);
        Issues issues;
        const std::string kind = j.value("kind", "");
        const json num = j.value("numerics", json::object());
        const int K = num.value("K", 256);
        const double T = num.value("T", 1.0);
        const double tol = num.value("tol", 1e-12);
        const std::uint64_t seed = num.value("seed", 42ull);
        if (K < 2) issues.add("numerics.K must be >= 2");
        if (!(T > 0)) issues.add("numerics.T must be positive");
        if (!(tol > 0)) issues.add("numerics.tol must be positive");
        const json out_spec = j.value("output", json::object());
        std::vector<double> snaps = out_spec.value("snapshots", std::vector<double>{});

        SolveConfig cfg;
        cfg.tol = tol;
        cfg.horizon = T;

        if (kind == "simulate-ide") {
            if (!j.contains("system")) issues.add("simulate-ide: missing \"system\"");
            issues.raise_if_any();
            IdeSystem sys = parse_system_json(j.at("system")).as_ide();
            const double h = sys.r / K;
            if (std::abs(sys.r / h - std::llround(sys.r / h)) > 1e-9) {
                issues.add("numerics.K must make the delay an integer number of cells");
            }
            const double steps_T = T / h;
            if (std::abs(steps_T - std::llround(steps_T)) > 1e-6) {
                int K_ok = 0;
                for (int cand = 2; cand <= 1 << 20; ++cand) {
                    const double steps = T * cand / sys.r;
                    if (std::abs(steps - std::llround(steps)) < 1e-9) {
                        K_ok = cand;
                        break;
                    }
                }
                issues.add("numerics.T must be a multiple of the step r/K (smallest valid K: " +
                           (K_ok ? std::to_string(K_ok) : std::string("none found")) + ")");
            }
            issues.raise_if_any();
            const Grid hg(h, -K, K);
            const SampledFn x0 = [&] {
                SignalSpec xs = parse_signal(j.value("x0", json()), issues, "x0");
                issues.raise_if_any();
                std::vector<SignalSpec> per(static_cast<std::size_t>(sys.n), xs);
                return materialize_signals(per, hg, seed ^ 0x11);
            }();
            const Grid ig(h, -K, K + std::llround(T / h));
            const SampledFn input = materialize_signals(
                parse_input_specs(j.value("input", json()), sys.m1, sys.m2, issues), ig, seed);
            issues.raise_if_any();
            const Trajectory traj = solve(sys, x0, input, cfg);
            traj.solution.write_csv(out_dir + "/solution.csv");
            write_text(out_dir + "/solver_diag.log", diag_lines(traj));
            json rep{{"t_max_reached", traj.t_max_reached},
                     {"escaped", traj.escaped},
                     {"last_norm", traj.last_norm},
                     {"max_contraction_factor", traj.max_factor},
                     {"max_sweeps", traj.max_sweeps}};
            write_text(out_dir + "/report.json", rep.dump(2) + "\n");
            return traj.escaped ? kExitEscape : kExitOk;
        }

        if (kind == "simulate-pde") {
            if (!j.contains("system")) issues.add("simulate-pde: missing \"system\"");
            issues.raise_if_any();
            ParsedSystem ps = parse_system_json(j.at("system"));
            if (!ps.is_pde()) {
                issues.add("simulate-pde requires a hyperbolic system");
                issues.raise_if_any();
            }
            const HyperbolicSystem& sys = ps.pde();
            const double h = 1.0 / (sys.c * K);
            const double steps_T = T / h;
            if (std::abs(steps_T - std::llround(steps_T)) > 1e-6) {
                issues.add("numerics.T must be a multiple of the unit-CFL step 1/(cK)");
            }
            SignalSpec xs = parse_signal(j.value("x0", json()), issues, "x0");
            const auto specs = parse_input_specs(j.value("input", json()), sys.m1, sys.m2, issues);
            issues.raise_if_any();
            const SampledFn x0 = materialize_profile(xs, K, seed ^ 0x22);
            const Grid ig(h, -K, K + std::llround(T / h));
            const SampledFn w = materialize_signals(specs, ig, seed);
            PdeResult res = solve_pde(sys, x0, w, T, cfg, snaps);
            for (const auto& [ts, prof] : res.snapshots) {
                write_profile_csv(prof, out_dir + "/" + snapshot_name(ts));
            }
            write_boundary_csv(res.closure.solution, nullptr, out_dir + "/closure.csv");
            write_text(out_dir + "/solver_diag.log", diag_lines(res.closure));
            // sup-norm trace at a coarse stride
            {
                std::string csv = "t,sup\n";
                char buf[64];
                const std::int64_t stride = std::max<std::int64_t>(1, K / 8);
                const Grid& tg = res.closure.solution.grid();
                for (std::int64_t m = 0; m * stride * h <= res.closure.t_max_reached - h;
                     ++m) {
                    const double t = static_cast<double>(m) * stride * h;
                    if (t > res.closure.t_max_reached - h + 1e-12) break;
                    const SampledFn prof = reconstruct(sys, res.closure.solution, x0, t);
                    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", t, prof.sup_norm());
                    csv += buf;
                }
                (void)tg;
                write_text(out_dir + "/supnorm.csv", csv);
            }
            json rep{{"t_max_reached", res.closure.t_max_reached},
                     {"escaped", res.closure.escaped},
                     {"max_contraction_factor", res.closure.max_factor}};
            write_text(out_dir + "/report.json", rep.dump(2) + "\n");
            return res.closure.escaped ? kExitEscape : kExitOk;
        }

        if (kind == "convert") {
            if (!j.contains("system")) issues.add("convert: missing \"system\"");
            issues.raise_if_any();
            ParsedSystem ps = parse_system_json(j.at("system"));
            if (!ps.is_pde()) {
                issues.add("convert requires a hyperbolic system");
                issues.raise_if_any();
            }
            const IdeSystem ide = ps.as_ide();
            json ladder = json::array();
            for (double R : {0.5, 1.0, 2.0, 4.0, 8.0}) {
                ladder.push_back({{"R", R},
                                  {"N", ide.moduli.N(R)},
                                  {"M", ide.moduli.M(R)},
                                  {"a", ide.moduli.a(R)},
                                  {"b", ide.moduli.has_b ? ide.moduli.b(R) : -1.0}});
            }
            json rep{{"n", ide.n},         {"r", ide.r},           {"m1", ide.m1},
                     {"m2", ide.m2},       {"moduli", ladder},     {"has_b", ide.moduli.has_b}};
            write_text(out_dir + "/converted.json", rep.dump(2) + "\n");
            return kExitOk;
        }

        if (kind == "check-razumikhin") {
            if (!j.contains("system")) issues.add("check-razumikhin: missing \"system\"");
            if (!j.contains("cert")) issues.add("check-razumikhin: missing \"cert\"");
            issues.raise_if_any();
            const IdeSystem sys = parse_system_json(j.at("system")).as_ide();
            const IssCertificate cert = parse_certificate(j.at("cert").dump(), sys.r);
            const int samples = j.value("samples", 10000);
            const RazumikhinReport rep = check_razumikhin(sys, cert, samples, seed);
            json out{{"samples", rep.samples},
                     {"violations", rep.violations},
                     {"worst_margin", rep.worst_margin},
                     {"effective_lambda", rep.effective_lambda},
                     {"witness", rep.witness},
                     {"passed", rep.passed()}};
            write_text(out_dir + "/report.json", out.dump(2) + "\n");
            return rep.passed() ? kExitOk : kExitViolation;
        }

        if (kind == "feedback-demo") {
            const double g = j.value("g", 1.0);
            const std::string ckind = j.value("controller", "kernel");
            ControllerKind kindc = ControllerKind::KernelIntegral;
            if (ckind == "two-point") kindc = ControllerKind::DelayedTwoPoint;
            else if (ckind == "ide") kindc = ControllerKind::IdeCoordinates;
            else if (ckind != "kernel") issues.add("controller must be kernel|two-point|ide");
            SignalSpec xs = parse_signal(j.value("x0", json()), issues, "x0");
            SignalSpec ws = parse_signal(j.value("w", json()), issues, "w");
            issues.raise_if_any();
            const SampledFn x0 = materialize_profile(xs, K, seed ^ 0x33);
            const double h = 1.0 / K;
            const Grid wg(h, 0, std::llround(T / h));
            const SampledFn w(wg, 1, materialize_channel(ws, wg, seed, 0xE0));
            if (snaps.empty()) {
                for (double t : {0.0, 0.5, 1.0, 1.5, 2.0, 2.5}) {
                    if (t <= T) snaps.push_back(t);
                }
                snaps.push_back(T);
            }
            const ClosedLoopResult res = closed_loop(g, x0, kindc, w, T, snaps);
            for (const auto& [ts, prof] : res.snapshots) {
                write_profile_csv(prof, out_dir + "/" + snapshot_name(ts));
            }
            write_boundary_csv(res.p, &res.v, out_dir + "/boundary.csv");
            res.u.write_csv(out_dir + "/control.csv");
            json rep{{"g", g},
                     {"controller", ckind},
                     {"controller_disagreement", res.controller_disagreement},
                     {"sup_after_settle", res.sup_after(2.0 + 2.0 * h)}};
            write_text(out_dir + "/report.json", rep.dump(2) + "\n");
            return kExitOk;
        }

        if (kind == "equivalence-audit") {
            if (!j.contains("system")) issues.add("equivalence-audit: missing \"system\"");
            issues.raise_if_any();
            ParsedSystem ps = parse_system_json(j.at("system"));
            if (!ps.is_pde()) {
                issues.add("equivalence-audit requires a hyperbolic system");
                issues.raise_if_any();
            }
            const HyperbolicSystem& sys = ps.pde();
            SignalSpec xs = parse_signal(j.value("x0", json()), issues, "x0");
            const auto specs = parse_input_specs(j.value("input", json()), sys.m1, sys.m2, issues);
            issues.raise_if_any();
            const SampledFn x0 = materialize_profile(xs, K, seed ^ 0x22);
            const double h = 1.0 / (sys.c * K);
            const Grid ig(h, -K, K + std::llround(T / h));
            const SampledFn w = materialize_signals(specs, ig, seed);
            std::vector<double> times = snaps;
            if (times.empty()) {
                for (double t = 0.5; t <= T + 1e-9; t += 0.5) times.push_back(t);
            }
            const EquivalenceReport rep = equivalence_audit(sys, x0, w, T, times);
            json out{{"disc_coarse", rep.disc_coarse},
                     {"disc_fine", rep.disc_fine},
                     {"ratio", rep.ratio},
                     {"first_order", rep.first_order()}};
            write_text(out_dir + "/report.json", out.dump(2) + "\n");
            return rep.first_order() ? kExitOk : kExitViolation;
        }

        issues.add("unknown scenario kind \"" + kind + "\"");
        issues.raise_if_any();
        return kExitValidation;
    } catch (const validation_error& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return kExitValidation;
    } catch (const escape_error& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return kExitEscape;
    } catch (const certificate_error& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return kExitViolation;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "scenario failed: %s\n", e.what());
        return kExitValidation;
    }
}

} // namespace idel
