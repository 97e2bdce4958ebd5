#include "ness/tolerances.hpp"

namespace ness {

namespace {

double env_or(const char* name, double fallback) {
    const char* v = std::getenv(name);
    if (!v || !*v) return fallback;
    char* end = nullptr;
    double parsed = std::strtod(v, &end);
    return (end && *end == '\0' && parsed > 0.0) ? parsed : fallback;
}

Tolerances load() {
    Tolerances t;
    t.lyapunov_residual = env_or("NESS_TOL_LYAPUNOV_RESIDUAL", t.lyapunov_residual);
    t.quadrature_abs = env_or("NESS_TOL_QUADRATURE_ABS", t.quadrature_abs);
    t.circle_classify = env_or("NESS_TOL_CIRCLE_CLASSIFY", t.circle_classify);
    t.root_merge = env_or("NESS_TOL_ROOT_MERGE", t.root_merge);
    t.kappa_cluster = env_or("NESS_TOL_KAPPA_CLUSTER", t.kappa_cluster);
    t.critical_residual = env_or("NESS_TOL_CRITICAL_RESIDUAL", t.critical_residual);
    t.trim_rel = env_or("NESS_TOL_TRIM_REL", t.trim_rel);
    t.psd_slack = env_or("NESS_TOL_PSD_SLACK", t.psd_slack);
    t.ode_rel = env_or("NESS_TOL_ODE_REL", t.ode_rel);
    t.rank_rel = env_or("NESS_TOL_RANK_REL", t.rank_rel);
    return t;
}

} // namespace

const Tolerances& Tolerances::get() {
    static const Tolerances instance = load();
    return instance;
}

} // namespace ness
