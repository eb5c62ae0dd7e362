// cm: command-line driver for the elliptic Calogero-Moser Bethe Ansatz library.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ecm/critical.hpp"
#include "ecm/elliptic.hpp"
#include "ecm/error.hpp"
#include "ecm/io.hpp"
#include "ecm/jack.hpp"
#include "ecm/perturb.hpp"
#include "ecm/states.hpp"
#include "ecm/verify.hpp"

namespace
{

using namespace ecm;

struct Config
{
    int N = 2;
    int l = 1;
    std::string xi;
    std::string lambda;
    std::string alpha = "1/2";
    double x = 0.3;
    double p = 1e-2;
    int steps = 10;
    double tol = newton_tolerance;
    int grid = 24;
    double fd_h = 1e-3;
    int order = 2;
    std::string mode = "auto";
    std::string out;
    unsigned long long seed = 1;
};

std::vector<std::string> split(const std::string& s)
{
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty())
            parts.push_back(item);
    return parts;
}

std::vector<double> parse_labels(const std::string& s, int expected, const char* flag)
{
    std::vector<double> v;
    for (const auto& item : split(s))
        v.push_back(to_double(parse_rational(item)));
    if (int(v.size()) != expected)
        throw Error(ErrorCode::domain, std::string(flag) + " needs " + std::to_string(expected) + " comma-separated values");
    return v;
}

ModeChoice parse_mode(const std::string& m)
{
    if (m == "partial")
        return ModeChoice::partial;
    if (m == "total")
        return ModeChoice::total;
    return ModeChoice::automatic;
}

void emit(const Config& c, const json& j)
{
    const std::string text = dump(j) + "\n";
    if (c.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream os(c.out);
    if (!os)
        throw Error(ErrorCode::resource, "cannot open " + c.out);
    os << text;
}

json header(const char* command)
{
    json j;
    j["schema"] = schema_version;
    j["command"] = command;
    return j;
}

NewtonOptions newton(const Config& c) { return {c.tol, 100}; }

ContinuationOptions continuation(const Config& c)
{
    ContinuationOptions o;
    o.linear_steps = c.steps;
    o.newton = newton(c);
    return o;
}

int cmd_theta(const Config& c)
{
    const Nome nome = Nome::from_p(c.p);
    json j = header("theta");
    j["x"] = c.x;
    j["p"] = c.p;
    const auto t1 = theta1(c.x, nome);
    const auto t = theta(c.x, nome);
    j["theta1"] = {{"value", to_json(t1.value)}, {"d_x", to_json(t1.d_x)}, {"d_tau", to_json(t1.d_tau)}};
    j["theta"] = {{"value", to_json(t.value)}, {"d_x", to_json(t.d_x)}, {"d_tau", to_json(t.d_tau)}};
    j["wp"] = to_json(wp(c.x, nome));
    j["eta_printed"] = to_json(eta_const(nome, EtaConvention::printed));
    j["eta_quasi_period"] = to_json(eta_const(nome, EtaConvention::quasi_period));
    j["wp_shifted"] = to_json(wp_shifted(c.x, nome));
    emit(c, j);
    return 0;
}

int cmd_critical(const Config& c)
{
    const RootSystem rs(c.N, c.l);
    const auto labels = parse_labels(c.xi, c.N - 1, "--xi");
    const Weight xi = Weight::from_dynkin(labels);
    json j = header("critical");
    j["N"] = c.N;
    j["l"] = c.l;
    j["xi"] = labels;
    if (c.N == 2) {
        const auto cf = closed_form_N2(labels[0], c.l);
        j["closed_form"] = {{"sigma", cf.sigma},
                            {"sigma_from_roots", to_json(cf.sigma_from_roots)},
                            {"delta", to_json(cf.delta)},
                            {"delta_formula", to_json(cf.delta_formula)},
                            {"hess", to_json(cf.hess)},
                            {"hess_formula", to_json(cf.hess_formula)},
                            {"report", to_json(cf.report)}};
    } else if (c.N == 3 && c.l == 1) {
        const auto cf = closed_form_N3_l1(labels[0], labels[1]);
        j["closed_form"] = {{"T3", to_json(cf.points[0][2])},
                            {"T1_T2", to_json(std::vector<cplx>{cf.points[0][0], cf.points[0][1]})},
                            {"product", to_json(cf.product)},
                            {"product_formula", to_json(cf.product_formula)},
                            {"shifted_product", to_json(cf.shifted_product)},
                            {"shifted_product_formula", to_json(cf.shifted_product_formula)},
                            {"discriminant", to_json(cf.discriminant)},
                            {"discriminant_formula", to_json(cf.discriminant_formula)},
                            {"discriminant_printed", to_json(cf.discriminant_printed)},
                            {"hess", to_json(cf.hess)},
                            {"hess_formula", to_json(cf.hess_formula)},
                            {"report", to_json(cf.report)}};
    } else {
        const MasterFunction mf(rs, xi);
        SearchOptions so;
        so.rng_seed = c.seed;
        std::optional<CriticalReport> best;
        for (const auto& seed : detail::random_trig_seeds(mf.m(), so.random_seeds, so.rng_seed)) {
            try {
                best = newton_trig(mf, seed, newton(c));
                break;
            } catch (const Error&) {
            }
        }
        if (!best)
            throw Error(ErrorCode::convergence, "no Newton seed converged");
        j["newton"] = to_json(*best);
    }
    if (admissible(xi, rs) && xi.in_P_plus()) {
        SearchOptions so;
        so.rng_seed = c.seed;
        const auto found = find_admissible_critical_point(xi, rs, so);
        j["admissible_search"] = {{"sigma", found.sigma}, {"xi", found.xi.dynkin()}, {"method", found.method},
                                  {"report", to_json(found.report)}};
    }
    emit(c, j);
    return 0;
}

SearchResult search(const Config& c, const RootSystem& rs, const Weight& xi)
{
    SearchOptions so;
    so.rng_seed = c.seed;
    return find_admissible_critical_point(dominant(xi), rs, so);
}

int cmd_continue(const Config& c)
{
    const RootSystem rs(c.N, c.l);
    const Weight xi = Weight::from_dynkin(parse_labels(c.xi, c.N - 1, "--xi"));
    const auto found = search(c, rs, xi);
    const MasterFunction mf(rs, found.xi);
    const auto path = continue_nome(mf, found.report.point, c.p, continuation(c));
    std::vector<json> rows;
    for (const auto& pt : path.points) {
        json row = to_json(pt);
        if (pt.p != 0.0)
            row["eigenvalue"] = to_json(eigenvalue_elliptic(mf, pt.t, Nome::from_p(pt.p), resolve(parse_mode(c.mode))));
        rows.push_back(std::move(row));
    }
    if (c.out.empty()) {
        write_jsonl(std::cout, rows);
    } else {
        std::ofstream os(c.out);
        if (!os)
            throw Error(ErrorCode::resource, "cannot open " + c.out);
        write_jsonl(os, rows);
    }
    return 0;
}

int cmd_state(const Config& c)
{
    const RootSystem rs(c.N, c.l);
    const Weight xi = Weight::from_dynkin(parse_labels(c.xi, c.N - 1, "--xi"));
    const auto found = search(c, rs, xi);
    const MasterFunction mf(rs, found.xi);
    const auto path = continue_nome(mf, found.report.point, c.p, continuation(c));
    const Nome nome = Nome::from_p(c.p);
    const auto state = elliptic_state(mf, path.end().t, nome, resolve(parse_mode(c.mode)));
    const auto chk = residual_check(state, c.l, c.grid, c.fd_h);
    const auto l2 = l2_estimate(state.evaluator, state.xi);
    json j = header("state");
    j["N"] = c.N;
    j["l"] = c.l;
    j["xi"] = found.xi.dynkin();
    j["p"] = c.p;
    j["t"] = to_json(state.point);
    j["eigenvalue"] = to_json(state.eigenvalue);
    j["rayleigh"] = to_json(chk.rayleigh);
    j["rel_residual"] = chk.rel_residual;
    j["l2_estimates"] = l2;
    if (!c.out.empty()) {
        write_grid_csv(c.out, normalize_at_base_point(state.evaluator, c.N), interior_grid(c.N, c.grid, 0.1));
        j["grid_csv"] = c.out;
    }
    std::cout << dump(j) << "\n";
    return 0;
}

int cmd_jack(const Config& c)
{
    std::vector<Rational> parts;
    for (const auto& item : split(c.lambda))
        parts.push_back(parse_rational(item));
    if (int(parts.size()) != c.N)
        throw Error(ErrorCode::domain, "--lambda needs N partition parts");
    const auto alpha = parse_rational(c.alpha);
    const auto jack = jack_expand(Partition(parts), alpha);
    json j = header("jack");
    j["N"] = c.N;
    j["alpha"] = to_string(alpha);
    j["lambda"] = jack.lead().to_string();
    json coeffs = json::object();
    for (auto it = jack.coeffs().rbegin(); it != jack.coeffs().rend(); ++it)
        coeffs[it->first.to_string()] = to_string(it->second);
    j["coefficients"] = coeffs;
    emit(c, j);
    return 0;
}

int cmd_perturb(const Config& c)
{
    const Weight lambda = Weight::from_dynkin(parse_labels(c.lambda, c.N - 1, "--lambda"));
    const Partition part = partition_from_dynkin(lambda.dynkin());
    const auto series = rs_series(part, c.l, c.order);
    json j = header("perturb");
    j["lambda"] = part.to_string();
    j["K"] = c.order;
    j["E"] = series.E;
    std::vector<std::string> basis;
    for (const auto& b : series.basis)
        basis.push_back(b.to_string());
    j["basis"] = basis;
    if (c.p != 0.0) {
        const RootSystem rs(c.N, c.l);
        const auto found = search(c, rs, lambda_to_xi(lambda, c.l));
        const MasterFunction mf(rs, found.xi);
        const auto path = continue_nome(mf, found.report.point, c.p, continuation(c));
        const double e_ba = eigenvalue_elliptic(mf, path.end().t, Nome::from_p(c.p), resolve(parse_mode(c.mode))).real();
        j["crosscheck"] = {{"p", c.p},
                           {"E_BA", e_ba},
                           {"partial_sum", series.partial_sum(c.p)},
                           {"gap", e_ba - series.partial_sum(c.p)}};
    }
    emit(c, j);
    return 0;
}

int cmd_verify(const Config& c)
{
    const Weight lambda = Weight::from_dynkin(parse_labels(c.lambda, c.N - 1, "--lambda"));
    VerifyOptions o;
    o.p = c.p;
    o.grid = c.grid;
    o.fd_h = c.fd_h;
    o.order = c.order;
    o.mode = parse_mode(c.mode);
    o.continuation = continuation(c);
    o.search.rng_seed = c.seed;
    const auto res = verify_chain(c.N, c.l, lambda, o);
    emit(c, res.report);
    return res.pass ? 0 : 1;
}

int exit_code(ErrorCode code) { return 10 + int(code); }

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Bethe Ansatz eigenstates of the elliptic Calogero-Moser model"};
    app.require_subcommand(1);
    Config c;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--N", c.N, "number of particles")->check(CLI::Range(2, 6));
        sub->add_option("--l", c.l, "coupling l")->check(CLI::PositiveNumber);
        sub->add_option("--p", c.p, "nome p");
        sub->add_option("--steps", c.steps, "linear continuation steps")->check(CLI::PositiveNumber);
        sub->add_option("--tol", c.tol, "Newton residual tolerance")->check(CLI::PositiveNumber);
        sub->add_option("--grid", c.grid, "grid points per axis")->check(CLI::PositiveNumber);
        sub->add_option("--fd-h", c.fd_h, "finite-difference step")->check(CLI::PositiveNumber);
        sub->add_option("--order", c.order, "perturbation order K")->check(CLI::Range(0, max_perturbation_order));
        sub->add_option("--mode", c.mode, "tau-derivative mode")
            ->check(CLI::IsMember({"partial", "total", "auto"}));
        sub->add_option("--out", c.out, "output file");
        sub->add_option("--seed", c.seed, "RNG seed for the root search");
    };

    auto* theta_cmd = app.add_subcommand("theta", "theta functions and wp at one point");
    common(theta_cmd);
    theta_cmd->add_option("--x", c.x, "argument x");

    auto* critical_cmd = app.add_subcommand("critical", "trigonometric Bethe roots");
    common(critical_cmd);
    critical_cmd->add_option("--xi,--m", c.xi, "Dynkin labels of xi, comma-separated")->required();

    auto* continue_cmd = app.add_subcommand("continue", "continue a root in the nome (JSON lines)");
    common(continue_cmd);
    continue_cmd->add_option("--xi,--m", c.xi, "Dynkin labels of xi")->required();

    auto* state_cmd = app.add_subcommand("state", "assemble a Bethe state and check it against H");
    common(state_cmd);
    state_cmd->add_option("--xi,--m", c.xi, "Dynkin labels of xi")->required();

    auto* jack_cmd = app.add_subcommand("jack", "Jack polynomial in the monomial basis");
    common(jack_cmd);
    jack_cmd->add_option("--lambda", c.lambda, "partition parts, comma-separated")->required();
    jack_cmd->add_option("--alpha", c.alpha, "Jack parameter (rational)");

    auto* perturb_cmd = app.add_subcommand("perturb", "Rayleigh-Schroedinger series in p");
    common(perturb_cmd);
    perturb_cmd->add_option("--lambda", c.lambda, "Dynkin labels of lambda")->required();

    auto* verify_cmd = app.add_subcommand("verify", "full chain for one lambda");
    common(verify_cmd);
    verify_cmd->add_option("--lambda", c.lambda, "Dynkin labels of lambda")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*theta_cmd)
            return cmd_theta(c);
        if (*critical_cmd)
            return cmd_critical(c);
        if (*continue_cmd)
            return cmd_continue(c);
        if (*state_cmd)
            return cmd_state(c);
        if (*jack_cmd)
            return cmd_jack(c);
        if (*perturb_cmd)
            return cmd_perturb(c);
        if (*verify_cmd)
            return cmd_verify(c);
    } catch (const Error& e) {
        json j = header("error");
        j["error"] = {{"code", std::string(to_string(e.code()))}, {"message", e.what()}};
        std::cerr << dump(j) << "\n";
        return exit_code(e.code());
    }
    return 0;
}
