#ifndef ECM_CRITICAL_HPP
#define ECM_CRITICAL_HPP

// Trigonometric Bethe roots (closed forms for N = 2 and for N = 3, l = 1;
// seeded Newton otherwise) and their continuation in the nome.

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <functional>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ecm/elliptic.hpp"
#include "ecm/error.hpp"
#include "ecm/master.hpp"
#include "ecm/states.hpp"
#include "ecm/weights.hpp"

namespace ecm
{

/// |det H| must exceed this times the Hadamard bound (product of row norms).
inline constexpr double degeneracy_threshold = 1e-9;

inline bool non_degenerate(const Eigen::MatrixXcd& h)
{
    double bound = 1.0;
    for (Eigen::Index i = 0; i < h.rows(); ++i)
        bound *= h.row(i).norm();
    return std::abs(h.determinant()) > degeneracy_threshold * bound;
}

namespace detail
{

inline void sort_roots(std::vector<cplx>& v)
{
    std::sort(v.begin(), v.end(), [](cplx a, cplx b) {
        if (std::abs(a.real() - b.real()) > 1e-12)
            return a.real() < b.real();
        return a.imag() < b.imag();
    });
}

/// Roots of z^n + c[0] z^{n-1} + ... + c[n-1] from the companion matrix.
inline std::vector<cplx> monic_roots(const std::vector<cplx>& c)
{
    const int n = int(c.size());
    if (n == 0)
        return {};
    Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        comp(0, i) = -c[i];
    for (int i = 1; i < n; ++i)
        comp(i, i - 1) = 1.0;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
    if (es.info() != Eigen::Success)
        throw Error(ErrorCode::convergence, "companion eigenvalue solver failed");
    std::vector<cplx> r(es.eigenvalues().data(), es.eigenvalues().data() + n);
    sort_roots(r);
    return r;
}

inline std::vector<cplx> elementary_symmetric(const std::vector<cplx>& v)
{
    std::vector<cplx> e(v.size() + 1, 0.0);
    e[0] = 1.0;
    for (const auto& x : v)
        for (std::size_t i = v.size(); i >= 1; --i)
            e[i] += e[i - 1] * x;
    return e;
}

inline cplx discriminant(const std::vector<cplx>& v)
{
    cplx d = 1.0;
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = i + 1; j < v.size(); ++j)
            d *= (v[i] - v[j]) * (v[i] - v[j]);
    return d;
}

inline double binomial(int n, int k)
{
    double b = 1.0;
    for (int i = 1; i <= k; ++i)
        b = b * (n - k + i) / i;
    return b;
}

} // namespace detail

struct N2ClosedForm
{
    std::vector<double> sigma;           // sigma_1..sigma_l from the product formula
    std::vector<cplx> sigma_from_roots;  // elementary symmetric functions of the polished roots
    cplx delta = 0.0, delta_formula = 0.0;
    cplx hess = 0.0, hess_formula = 0.0;
    CriticalReport report;
};

/// N = 2: the Bethe roots are the zeros of sum_i (-1)^i sigma_i z^{l-i} with
/// sigma_i = C(l,i) prod_{j<=i} (-m+1+l-j)/(-m-j).
inline N2ClosedForm closed_form_N2(double m1, int l)
{
    if (l < 1)
        throw Error(ErrorCode::domain, "closed_form_N2: l >= 1 required");
    for (int j = 1; j <= l; ++j)
        if (std::abs(-m1 + 1 + l - j) < lattice_tolerance || std::abs(-m1 - j) < lattice_tolerance)
            throw Error(ErrorCode::domain, "closed_form_N2: degenerate m1 = " + std::to_string(m1));
    N2ClosedForm out;
    std::vector<cplx> coeffs;
    double prod = 1.0;
    for (int i = 1; i <= l; ++i) {
        prod *= (-m1 + 1 + l - i) / (-m1 - i);
        out.sigma.push_back(detail::binomial(l, i) * prod);
        coeffs.push_back((i % 2 ? -1.0 : 1.0) * out.sigma.back());
    }
    const MasterFunction mf(RootSystem(2, l), Weight::from_dynkin({m1}));
    auto rep = newton_trig(mf, detail::monic_roots(coeffs));
    detail::sort_roots(rep.point);
    out.report = mf.report_tri(rep.point);
    out.report.iterations = rep.iterations;
    const auto e = detail::elementary_symmetric(out.report.point);
    out.sigma_from_roots.assign(e.begin() + 1, e.end());
    out.delta = detail::discriminant(out.report.point);
    out.hess = out.report.hessian_det;

    cplx d = 1.0, h = detail::factorial(l);
    for (int j = 0; j < l; ++j) {
        d *= std::pow(double(j + 1), j + 1) * std::pow(-m1 + 1 + j, j) * std::pow(-2.0 * l + j, j) /
             std::pow(-m1 - j - 1, 2 * l - j - 2);
        h *= std::pow(-m1 - j - 1, 3) / ((-m1 + 1 + j) * (-2.0 * l + j));
    }
    out.delta_formula = d;
    out.hess_formula = h;
    return out;
}

struct N3ClosedForm
{
    std::vector<std::vector<cplx>> points; // (T1, T2, T3) and (T2, T1, T3)
    cplx product = 0.0, product_formula = 0.0;                 // T1 T2
    cplx shifted_product = 0.0, shifted_product_formula = 0.0; // (1 - T1)(1 - T2)
    cplx discriminant = 0.0, discriminant_formula = 0.0;       // prod_{i<j} (Ti - Tj)^2
    cplx discriminant_printed = 0.0;                           // the same with leading constant 2
    cplx hess = 0.0, hess_formula = 0.0;
    CriticalReport report; // for the first ordering
};

/// N = 3, l = 1.
inline N3ClosedForm closed_form_N3_l1(double m1, double m2)
{
    for (double v : {m1, m2, m1 + m2})
        for (double bad : {0.0, 1.0, -1.0})
            if (std::abs(v - bad) < lattice_tolerance)
                throw Error(ErrorCode::domain, "closed_form_N3_l1: m1, m2, m1+m2 must avoid {0, 1, -1}");
    N3ClosedForm out;
    const double s = m1 + m2;
    const cplx T3 = (s - 1) * (m2 - 1) / ((s + 1) * (m2 + 1));
    const double a = (s + 1) * (m1 + 1), b = 2 * (-m1 * m1 - m1 * m2 + 2), c = (s - 1) * (m1 - 1);
    const cplx root = std::sqrt(cplx(b * b - 4 * a * c));
    std::vector<cplx> pair = {(-b - root) / (2 * a), (-b + root) / (2 * a)};
    detail::sort_roots(pair);
    out.points = {{pair[0], pair[1], T3}, {pair[1], pair[0], T3}};

    const MasterFunction mf(RootSystem(3, 1), Weight::from_dynkin({m1, m2}));
    out.report = mf.report_tri(out.points[0]);
    const auto& T = out.points[0];
    out.product = T[0] * T[1];
    out.product_formula = (s - 1) * (m1 - 1) / ((s + 1) * (m1 + 1));
    out.shifted_product = (1.0 - T[0]) * (1.0 - T[1]);
    out.shifted_product_formula = 6.0 / ((s + 1) * (m1 + 1));
    out.discriminant = detail::discriminant(T);
    // elimination of T1, T2, T3 gives the leading constant -16
    out.discriminant_printed = 2 * (s - 1) * (s - 1) * std::pow(2 * m1 * m1 + 2 * m1 * m2 - m2 * m2 - 3, 3) /
                               (std::pow(m1 + 1, 4) * std::pow(m2 + 1, 4) * std::pow(s + 1, 6));
    out.discriminant_formula = -8.0 * out.discriminant_printed;
    out.hess = out.report.in_F ? out.report.hessian_det : cplx(0.0);
    out.hess_formula = std::pow(m1 + 1, 3) * std::pow(m2 + 1, 3) * std::pow(s + 1, 5) /
                       (6.0 * (m1 - 1) * (m2 - 1) * std::pow(s - 1, 3));
    return out;
}

struct SearchOptions
{
    int random_seeds = 200;
    unsigned long long rng_seed = 1;
    int nonvanishing_samples = 6;
};

struct SearchResult
{
    std::vector<int> sigma; // xi = (xi~_{sigma(0)}, ..., xi~_{sigma(N-1)})
    Weight xi;
    CriticalReport report;
    std::string method; // "closed-form" or "newton"
};

namespace detail
{

// identity, then the reversal, then the remaining permutations in lexicographic order
inline std::vector<std::vector<int>> search_order(int N)
{
    std::vector<int> id(N);
    std::iota(id.begin(), id.end(), 0);
    std::vector<int> rev(id.rbegin(), id.rend());
    std::vector<std::vector<int>> out = {id};
    if (rev != id)
        out.push_back(rev);
    auto p = id;
    while (std::next_permutation(p.begin(), p.end()))
        if (p != rev)
            out.push_back(p);
    return out;
}

inline std::vector<std::vector<cplx>> random_trig_seeds(int m, int count, unsigned long long seed)
{
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> logr(std::log(0.05), std::log(5.0));
    std::uniform_real_distribution<double> arg(-pi, pi);
    std::bernoulli_distribution coin(0.5);
    std::vector<std::vector<cplx>> out;
    for (int s = 0; s < count; ++s) {
        const bool real = s < count / 2;
        std::vector<cplx> v(m);
        for (auto& z : v) {
            do {
                const double r = std::exp(logr(gen));
                z = real ? cplx(coin(gen) ? r : -r, 0.0) : std::polar(r, arg(gen));
            } while (std::abs(z - 1.0) < 0.05);
        }
        out.push_back(std::move(v));
    }
    return out;
}

inline bool symmetrized_nonvanishing(const MasterFunction& mf, const std::vector<cplx>& T, int samples,
                                     unsigned long long seed)
{
    const auto& rs = mf.roots();
    Evaluator omega;
    try {
        omega = omega_tri(mf, T);
    } catch (const Error&) {
        return false;
    }
    const Evaluator sym = symmetrize(omega, rs.N, rs.l);
    double num = 0.0, den = 0.0;
    for (const auto& x : random_torus_points(rs.N, samples, seed)) {
        num = std::max(num, std::abs(sym(x)));
        den = std::max(den, std::abs(omega(x)));
    }
    return den > 0.0 && num > 1e-8 * den;
}

} // namespace detail

/// Searches the Weyl orbit of a dominant admissible weight for a non-degenerate
/// trigonometric Bethe root with non-vanishing symmetrized Bethe vector.
inline SearchResult find_admissible_critical_point(const Weight& xi_dominant, const RootSystem& rs,
                                                   const SearchOptions& opt = {})
{
    if (!admissible(xi_dominant, rs))
        throw Error(ErrorCode::domain, "weight is not admissible");
    const auto idx = build_indexing(rs.N, rs.l);
    for (const auto& perm : detail::search_order(rs.N)) {
        const Weight xi = xi_dominant.permuted(perm);
        const MasterFunction mf(rs, xi, idx);
        auto accept = [&](const std::vector<cplx>& T) {
            if (!mf.membership_tri(T) || norm2(mf.log_phi_tri_grad(T)) >= newton_tolerance)
                return false;
            return non_degenerate(mf.hessian_tri(T)) &&
                   detail::symmetrized_nonvanishing(mf, T, opt.nonvanishing_samples, opt.rng_seed);
        };
        std::vector<std::vector<cplx>> candidates;
        std::string method = "closed-form";
        try {
            if (rs.N == 2)
                candidates.push_back(closed_form_N2(xi.dynkin()[0], rs.l).report.point);
            else if (rs.N == 3 && rs.l == 1)
                candidates = closed_form_N3_l1(xi.dynkin()[0], xi.dynkin()[1]).points;
        } catch (const Error&) {
            candidates.clear();
        }
        for (const auto& T : candidates)
            if (accept(T))
                return {perm, xi, mf.report_tri(T), method};
        for (const auto& seed : detail::random_trig_seeds(mf.m(), opt.random_seeds, opt.rng_seed)) {
            try {
                const auto rep = newton_trig(mf, seed);
                if (accept(rep.point)) {
                    auto r = mf.report_tri(rep.point);
                    r.iterations = rep.iterations;
                    return {perm, xi, r, "newton"};
                }
            } catch (const Error&) {
            }
        }
    }
    throw Error(ErrorCode::convergence, "search exhausted without an admissible critical point (inconclusive)");
}

struct PathPoint
{
    cplx p;
    std::vector<cplx> t;
    double grad_norm;
    cplx hess_det;
};

struct ContinuationOptions
{
    int linear_steps = 10;
    double first_step = 1e-6;
    double min_step = 1e-12;
    double p_max = 0.3;
    NewtonOptions newton{};
};

struct ContinuationPath
{
    cplx target_p;
    std::vector<PathPoint> points;

    const PathPoint& end() const { return points.back(); }
};

/// The nome values visited before step halving: p = 1e-6, 1e-5, ... while
/// more than a decade below the target, then `linear_steps` equal steps.
inline std::vector<cplx> continuation_schedule(cplx target, const ContinuationOptions& opt = {})
{
    std::vector<cplx> out;
    const double r = std::abs(target);
    if (r == 0.0)
        return out;
    const cplx dir = target / r;
    double start = 0.0;
    for (double q = opt.first_step; q * 10.0 < r; q *= 10.0) {
        out.push_back(q * dir);
        start = q;
    }
    for (int k = 1; k <= opt.linear_steps; ++k)
        out.push_back((start + (r - start) * k / opt.linear_steps) * dir);
    return out;
}

/// Follows a trigonometric Bethe root to the nome `target_p`.
inline ContinuationPath continue_nome(const MasterFunction& mf, const std::vector<cplx>& T, cplx target_p,
                                      const ContinuationOptions& opt = {})
{
    if (!(std::abs(target_p) < opt.p_max))
        throw Error(ErrorCode::domain, "target nome beyond p_max");
    if (!mf.membership_tri(T))
        throw Error(ErrorCode::membership, "continuation seed outside F_{N,l}");
    if (!non_degenerate(mf.hessian_tri(T)))
        throw Error(ErrorCode::degeneracy, "continuation seed is a degenerate critical point");

    ContinuationPath path;
    path.target_p = target_p;
    const Nome trig = Nome::trigonometric();
    auto t0 = trig_to_elliptic(T);
    const auto seed_rep = newton_tau(mf, t0, trig, opt.newton);
    path.points.push_back({0.0, seed_rep.point, seed_rep.grad_norm, seed_rep.hessian_det});

    for (const cplx p_next : continuation_schedule(target_p, opt)) {
        while (true) {
            const auto& last = path.points.back();
            cplx p_try = p_next;
            std::optional<CriticalReport> rep;
            while (!rep) {
                // linear predictor from the last two accepted points
                std::vector<cplx> guess = last.t;
                if (path.points.size() >= 2) {
                    const auto& prev = path.points[path.points.size() - 2];
                    const cplx ratio = (p_try - last.p) / (last.p - prev.p);
                    for (std::size_t k = 0; k < guess.size(); ++k)
                        guess[k] += ratio * (last.t[k] - prev.t[k]);
                }
                const Nome nome = Nome::from_p(p_try);
                try {
                    rep = newton_tau(mf, guess, nome, opt.newton);
                } catch (const Error& e) {
                    if (e.code() != ErrorCode::convergence && e.code() != ErrorCode::membership &&
                        e.code() != ErrorCode::degeneracy)
                        throw;
                    const cplx half = last.p + 0.5 * (p_try - last.p);
                    if (std::abs(half - last.p) < opt.min_step)
                        throw Error(ErrorCode::convergence,
                                    "continuation failed near p = " + std::to_string(std::abs(last.p)) +
                                        " (last good point kept)");
                    p_try = half;
                }
            }
            const Nome nome = Nome::from_p(p_try);
            if (!non_degenerate(mf.hessian_tau(rep->point, nome)))
                throw Error(ErrorCode::degeneracy, "Hessian degenerates along the continuation path");
            path.points.push_back({p_try, rep->point, rep->grad_norm, rep->hessian_det});
            if (p_try == p_next)
                break;
        }
    }
    return path;
}

/// ||t(p) - t(0)|| for every point on the path.
inline std::vector<double> path_displacements(const ContinuationPath& path)
{
    std::vector<double> d;
    for (const auto& pt : path.points) {
        double s = 0.0;
        for (std::size_t k = 0; k < pt.t.size(); ++k)
            s += std::norm(pt.t[k] - path.points.front().t[k]);
        d.push_back(std::sqrt(s));
    }
    return d;
}

} // namespace ecm

#endif
