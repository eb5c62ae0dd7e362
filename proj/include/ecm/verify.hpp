#ifndef ECM_VERIFY_HPP
#define ECM_VERIFY_HPP

// The full chain for one dominant weight lambda: admissibility gate,
// trigonometric root, continuation, direct spectral check, Jack limit and
// perturbative cross-check, collected into one JSON verdict.

#include <cmath>
#include <optional>
#include <string>

#include "ecm/critical.hpp"
#include "ecm/io.hpp"
#include "ecm/jack.hpp"
#include "ecm/master.hpp"
#include "ecm/perturb.hpp"
#include "ecm/states.hpp"
#include "ecm/weights.hpp"

namespace ecm
{

/// The tau-derivative the eigenvalue formula uses in `auto` mode.  Partial
/// (fixed t) reproduces the Rayleigh quotients; the total derivative along
/// the branch is off by O(p).
inline constexpr DtauMode resolved_dtau_mode = DtauMode::partial;

enum class ModeChoice { partial, total, automatic };

inline DtauMode resolve(ModeChoice m)
{
    switch (m) {
    case ModeChoice::partial: return DtauMode::partial;
    case ModeChoice::total: return DtauMode::total;
    case ModeChoice::automatic: break;
    }
    return resolved_dtau_mode;
}

inline const char* to_string(DtauMode m) { return m == DtauMode::partial ? "partial" : "total"; }

struct VerifyOptions
{
    double p = 1e-2;
    double limit_p = 1e-5;
    int grid = 24;
    double fd_h = 1e-3;
    double margin = 0.1;
    ModeChoice mode = ModeChoice::automatic;
    int order = 2;            // perturbation order; < 0 skips the cross-check
    ContinuationOptions continuation{};
    SearchOptions search{};
    double residual_tol = 1e-4;
    double eigenvalue_tol = 1e-4;
    double limit_tol = 1e-3;
    double proportionality_tol = 1e-9;
};

struct VerifyResult
{
    json report;
    bool pass = false;
    std::optional<ContinuationPath> path;
};

inline double rel_diff(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

inline VerifyResult verify_chain(int N, int l, const Weight& lambda, const VerifyOptions& opt = {})
{
    const RootSystem rs(N, l);
    const Weight xi_dom = lambda_to_xi(lambda, l);
    if (!admissible(xi_dom, rs))
        throw Error(ErrorCode::domain, "lambda + (l+1) rho is not admissible");

    VerifyResult out;
    json& r = out.report;
    r["schema"] = schema_version;
    r["command"] = "verify";
    r["N"] = N;
    r["l"] = l;
    r["lambda"] = lambda.coords();
    r["xi"] = xi_dom.dynkin();
    r["p"] = opt.p;

    const auto found = find_admissible_critical_point(xi_dom, rs, opt.search);
    const MasterFunction mf(rs, found.xi);
    r["critical"] = {{"sigma", found.sigma}, {"xi", found.xi.dynkin()}, {"method", found.method},
                     {"report", to_json(found.report)}};

    const auto bj = jack_proportionality(mf, found.report.point);
    r["jack_limit"] = {{"lambda", jack_label(found.xi, l).to_string()},
                       {"ratio_mean", to_json(bj.mean)},
                       {"ratio_spread", bj.spread}};

    const auto path = continue_nome(mf, found.report.point, opt.p, opt.continuation);
    const Nome nome = Nome::from_p(opt.p);
    const auto& t = path.end().t;
    double worst = 0.0;
    bool nondeg = true;
    for (const auto& pt : path.points) {
        worst = std::max(worst, pt.grad_norm);
        nondeg = nondeg && std::abs(pt.hess_det) > 0.0;
    }
    r["continuation"] = {{"steps", path.points.size()}, {"max_grad_norm", worst}, {"nondegenerate", nondeg},
                         {"t", to_json(t)}};

    const DtauMode mode = resolve(opt.mode);
    auto state = elliptic_state(mf, t, nome, mode);
    const auto chk = residual_check(state, l, opt.grid, opt.fd_h, opt.margin);
    const cplx e_partial = eigenvalue_elliptic(mf, t, nome, DtauMode::partial);
    const cplx e_total = eigenvalue_elliptic(mf, t, nome, DtauMode::total);
    const double d_partial = rel_diff(e_partial, chk.rayleigh);
    const double d_total = rel_diff(e_total, chk.rayleigh);
    std::string matching = "none";
    if (std::min(d_partial, d_total) < opt.eigenvalue_tol)
        matching = d_partial <= d_total ? "partial" : "total";
    r["spectral"] = {{"grid", opt.grid},
                     {"fd_h", opt.fd_h},
                     {"points", chk.points},
                     {"rayleigh", to_json(chk.rayleigh)},
                     {"rel_residual", chk.rel_residual},
                     {"eigenvalue", to_json(state.eigenvalue)},
                     {"mode", to_string(mode)},
                     {"eigenvalue_partial", to_json(e_partial)},
                     {"eigenvalue_total", to_json(e_total)},
                     {"rel_diff_partial", d_partial},
                     {"rel_diff_total", d_total},
                     {"matching_mode", matching}};

    const auto limit_path = continue_nome(mf, found.report.point, opt.limit_p, opt.continuation);
    const cplx e_limit = eigenvalue_elliptic(mf, limit_path.end().t, Nome::from_p(opt.limit_p), mode);
    const auto target = target_eigenvalue(lambda, N, l);
    const double g_with = rel_diff(e_limit, target.with_constant);
    const double g_without = rel_diff(e_limit, target.without_constant);
    std::string variant = "none";
    if (std::min(g_with, g_without) < opt.limit_tol)
        variant = g_without <= g_with ? "without_constant" : "with_constant";
    r["limit"] = {{"p", opt.limit_p},
                  {"eigenvalue", to_json(e_limit)},
                  {"target_with_constant", target.with_constant},
                  {"target_without_constant", target.without_constant},
                  {"rel_gap_with_constant", g_with},
                  {"rel_gap_without_constant", g_without},
                  {"matching_variant", variant}};

    if (opt.order >= 0) {
        const auto series = rs_series(jack_label(found.xi, l), l, opt.order);
        const double partial_sum = series.partial_sum(opt.p);
        r["perturbation"] = {{"K", opt.order},
                             {"E", series.E},
                             {"basis_size", series.basis.size()},
                             {"crosscheck",
                              {{"p", opt.p},
                               {"E_BA", state.eigenvalue.real()},
                               {"partial_sum", partial_sum},
                               {"gap", state.eigenvalue.real() - partial_sum}}}};
    }

    const bool pass = chk.rel_residual < opt.residual_tol && rel_diff(state.eigenvalue, chk.rayleigh) < opt.eigenvalue_tol &&
                      variant != "none" && bj.spread < opt.proportionality_tol && nondeg;
    r["tolerances"] = {{"residual", opt.residual_tol},
                       {"eigenvalue", opt.eigenvalue_tol},
                       {"limit", opt.limit_tol},
                       {"proportionality", opt.proportionality_tol}};
    r["verdict"] = pass ? "PASS" : "FAIL";
    out.pass = pass;
    out.path = path;
    return out;
}

} // namespace ecm

#endif
