#include "idel.h"

#include <cstring>
#include <new>
#include <string>

#include <json.hpp>

#include "idel/ide_solver.hpp"
#include "idel/scenario.hpp"
#include "idel/stability.hpp"

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

idel_status classify(const std::exception& e) {
    set_error(e.what());
    if (dynamic_cast<const idel::validation_error*>(&e)) return IDEL_EVALIDATION;
    if (dynamic_cast<const idel::escape_error*>(&e)) return IDEL_EESCAPE;
    if (dynamic_cast<const idel::certificate_error*>(&e)) return IDEL_ECERT;
    if (dynamic_cast<const idel::alignment_error*>(&e)) return IDEL_EINVAL;
    if (dynamic_cast<const idel::domain_error*>(&e)) return IDEL_EINVAL;
    if (dynamic_cast<const idel::data_error*>(&e)) return IDEL_EINVAL;
    if (dynamic_cast<const idel::contraction_error*>(&e)) return IDEL_EESCAPE;
    return IDEL_EINTERNAL;
}

char* dup_string(const std::string& s) {
    char* out = new (std::nothrow) char[s.size() + 1];
    if (out) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

} // namespace

struct idel_fn {
    idel::SampledFn fn;
};
struct idel_system {
    idel::IdeSystem sys;
};
struct idel_trajectory {
    idel::Trajectory traj;
    idel_fn solution_view;
};

extern "C" {

const char* idel_version(void) { return "0.1.0"; }

const char* idel_last_error(void) { return g_last_error.c_str(); }

idel_status idel_fn_create(double t_start, double step, long long count, int dim,
                           const double* values, idel_fn** out) {
    if (!out || !values || count < 0 || dim < 1) {
        set_error("idel_fn_create: bad arguments");
        return IDEL_EINVAL;
    }
    try {
        idel::Grid probe(step, 0, 0);
        const std::int64_t first = probe.index_of(t_start);
        std::vector<double> vals(values, values + count * dim);
        *out = new idel_fn{idel::SampledFn(idel::Grid(step, first, count), dim, std::move(vals))};
        return IDEL_OK;
    } catch (const std::exception& e) {
        return classify(e);
    }
}

idel_status idel_fn_constant(double t_start, double t_end, double step, int dim,
                             const double* value, idel_fn** out) {
    if (!out || !value || dim < 1) {
        set_error("idel_fn_constant: bad arguments");
        return IDEL_EINVAL;
    }
    try {
        const idel::Grid g = idel::Grid::over(t_start, t_end, step);
        *out = new idel_fn{
            idel::SampledFn::constant(g, std::span<const double>(value, dim))};
        return IDEL_OK;
    } catch (const std::exception& e) {
        return classify(e);
    }
}

void idel_fn_free(idel_fn* fn) { delete fn; }

long long idel_fn_count(const idel_fn* fn) { return fn ? fn->fn.grid().count() : 0; }
int idel_fn_dim(const idel_fn* fn) { return fn ? fn->fn.dim() : 0; }
double idel_fn_t_start(const idel_fn* fn) { return fn ? fn->fn.grid().t_start() : 0.0; }
double idel_fn_step(const idel_fn* fn) { return fn ? fn->fn.grid().step() : 0.0; }

idel_status idel_fn_values(const idel_fn* fn, double* buf, long long cap) {
    if (!fn || !buf) {
        set_error("idel_fn_values: bad arguments");
        return IDEL_EINVAL;
    }
    const auto vals = fn->fn.values();
    if (cap < static_cast<long long>(vals.size())) {
        set_error("idel_fn_values: buffer too small");
        return IDEL_EINVAL;
    }
    std::memcpy(buf, vals.data(), vals.size() * sizeof(double));
    return IDEL_OK;
}

double idel_fn_sup_norm(const idel_fn* fn) { return fn ? fn->fn.sup_norm() : 0.0; }

idel_status idel_fn_integrate(const idel_fn* fn, double a, double b, double* out) {
    if (!fn || !out) {
        set_error("idel_fn_integrate: bad arguments");
        return IDEL_EINVAL;
    }
    try {
        const std::vector<double> v = fn->fn.integrate(a, b);
        std::memcpy(out, v.data(), v.size() * sizeof(double));
        return IDEL_OK;
    } catch (const std::exception& e) {
        return classify(e);
    }
}

idel_status idel_fn_write_csv(const idel_fn* fn, const char* path) {
    if (!fn || !path) {
        set_error("idel_fn_write_csv: bad arguments");
        return IDEL_EINVAL;
    }
    try {
        fn->fn.write_csv(path);
        return IDEL_OK;
    } catch (const std::exception& e) {
        set_error(e.what());
        return IDEL_EIO;
    }
}

idel_status idel_system_parse(const char* json_text, idel_system** out) {
    if (!json_text || !out) {
        set_error("idel_system_parse: bad arguments");
        return IDEL_EINVAL;
    }
    try {
        *out = new idel_system{idel::parse_system(json_text).as_ide()};
        return IDEL_OK;
    } catch (const std::exception& e) {
        return classify(e);
    }
}

void idel_system_free(idel_system* sys) { delete sys; }

int idel_system_dim(const idel_system* sys) { return sys ? sys->sys.n : 0; }
double idel_system_delay(const idel_system* sys) { return sys ? sys->sys.r : 0.0; }
int idel_system_input_dim(const idel_system* sys) { return sys ? sys->sys.input_dim() : 0; }

idel_status idel_eval_rhs(const idel_system* sys, const idel_fn* history,
                          const idel_fn* input, double* out) {
    if (!sys || !history || !input || !out) {
        set_error("idel_eval_rhs: bad arguments");
        return IDEL_EINVAL;
    }
    try {
        const std::vector<double> v = idel::eval_rhs(sys->sys, history->fn, input->fn);
        std::memcpy(out, v.data(), v.size() * sizeof(double));
        return IDEL_OK;
    } catch (const std::exception& e) {
        return classify(e);
    }
}

idel_status idel_solve(const idel_system* sys, const idel_fn* x0, const idel_fn* input,
                       double horizon, double tol, idel_trajectory** out) {
    if (!sys || !x0 || !input || !out) {
        set_error("idel_solve: bad arguments");
        return IDEL_EINVAL;
    }
    try {
        idel::SolveConfig cfg;
        cfg.horizon = horizon;
        if (tol > 0) cfg.tol = tol;
        idel::Trajectory traj = idel::solve(sys->sys, x0->fn, input->fn, cfg);
        const bool escaped = traj.escaped;
        idel_fn view{traj.solution};
        *out = new idel_trajectory{std::move(traj), std::move(view)};
        if (escaped) {
            set_error("solution exceeded the blow-up threshold");
            return IDEL_EESCAPE;
        }
        return IDEL_OK;
    } catch (const std::exception& e) {
        return classify(e);
    }
}

void idel_trajectory_free(idel_trajectory* traj) { delete traj; }

const idel_fn* idel_trajectory_solution(const idel_trajectory* traj) {
    return traj ? &traj->solution_view : nullptr;
}
double idel_trajectory_t_max(const idel_trajectory* traj) {
    return traj ? traj->traj.t_max_reached : 0.0;
}
int idel_trajectory_escaped(const idel_trajectory* traj) {
    return traj && traj->traj.escaped ? 1 : 0;
}
double idel_trajectory_max_contraction(const idel_trajectory* traj) {
    return traj ? traj->traj.max_factor : 0.0;
}

idel_status idel_trajectory_diag(const idel_trajectory* traj, char** text) {
    if (!traj || !text) {
        set_error("idel_trajectory_diag: bad arguments");
        return IDEL_EINVAL;
    }
    *text = dup_string(idel::diag_lines(traj->traj));
    return *text ? IDEL_OK : IDEL_EINTERNAL;
}

idel_status idel_check_razumikhin(const idel_system* sys, const char* cert_json,
                                  int samples, unsigned long long seed, char** report_json) {
    if (!sys || !cert_json || !report_json || samples < 1) {
        set_error("idel_check_razumikhin: bad arguments");
        return IDEL_EINVAL;
    }
    try {
        const idel::IssCertificate cert = idel::parse_certificate(cert_json, sys->sys.r);
        const idel::RazumikhinReport rep =
            idel::check_razumikhin(sys->sys, cert, samples, seed);
        nlohmann::json out{{"samples", rep.samples},
                           {"violations", rep.violations},
                           {"worst_margin", rep.worst_margin},
                           {"effective_lambda", rep.effective_lambda},
                           {"witness", rep.witness},
                           {"passed", rep.passed()}};
        *report_json = dup_string(out.dump(2));
        if (!*report_json) return IDEL_EINTERNAL;
        if (!rep.passed()) {
            set_error("Razumikhin inequality falsified: " + rep.witness);
            return IDEL_ECERT;
        }
        return IDEL_OK;
    } catch (const std::exception& e) {
        return classify(e);
    }
}

int idel_run_scenario(const char* scenario_json, const char* out_dir) {
    if (!scenario_json || !out_dir) {
        set_error("idel_run_scenario: bad arguments");
        return idel::kExitValidation;
    }
    return idel::run_scenario_json(scenario_json, out_dir);
}

void idel_string_free(char* text) { delete[] text; }

} // extern "C"
