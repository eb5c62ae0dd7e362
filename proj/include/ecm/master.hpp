#ifndef ECM_MASTER_HPP
#define ECM_MASTER_HPP

// The master functions whose critical points are the Bethe roots.
//
//   log Phi_tri(T) = sum_k a_k log T_k - lN sum_{c(k)=0} log(1 - T_k)
//                    + sum_{i<j} C_ij log(T_i - T_j),
//   log Phi_tau(t) = 2 pi i sum_k (xi, alpha_{c(k)}) t_k + S(t; tau),
//   S(t; tau)      = sum_{i<j} C_ij log theta(t_i - t_j) - lN sum_{c(k)=0} log theta(t_k),
//
// with a_k = -(xi - rho, alpha_{c(k)}) and C_ij = (alpha_{c(i)}, alpha_{c(j)})
// (2 for equal colours, -1 for adjacent ones, 0 otherwise).  Only derivatives
// of logarithms are ever formed, so no branch of log is chosen.

#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <string>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ecm/elliptic.hpp"
#include "ecm/error.hpp"
#include "ecm/weights.hpp"

namespace ecm
{

/// Magnitude below which a factor of Phi counts as vanishing.
inline constexpr double membership_tolerance = 1e-9;

/// Residual below which a point is accepted as a Bethe root.
inline constexpr double newton_tolerance = 1e-12;

enum class DtauMode { partial, total };

struct CriticalReport
{
    std::vector<cplx> point;        // T (trigonometric) or t (elliptic)
    std::optional<cplx> p;          // set for elliptic points
    double grad_norm = 0.0;
    cplx hessian_det = 0.0;         // det of the Hessian of -log Phi
    bool in_F = false;
    int iterations = 0;

    bool elliptic() const noexcept { return p.has_value(); }
};

inline double norm2(std::span<const cplx> v)
{
    double s = 0.0;
    for (const auto& z : v)
        s += std::norm(z);
    return std::sqrt(s);
}

class MasterFunction
{
public:
    MasterFunction(RootSystem rs, Weight xi) : MasterFunction(rs, std::move(xi), build_indexing(rs.N, rs.l)) {}

    MasterFunction(RootSystem rs, Weight xi, BetheIndexing idx)
        : rs_(rs), xi_(std::move(xi)), idx_(std::move(idx))
    {
        if (xi_.N() != rs_.N || idx_.N != rs_.N || idx_.l != rs_.l)
            throw Error(ErrorCode::domain, "master function: inconsistent N or l");
        const int m = idx_.m;
        coupling_.assign(std::size_t(m) * m, 0);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                if (i == j)
                    continue;
                const int d = std::abs(idx_.color[i] - idx_.color[j]);
                coupling_[std::size_t(i) * m + j] = d == 0 ? 2 : (d == 1 ? -1 : 0);
            }
        for (int k = 0; k < m; ++k) {
            const double label = xi_.dynkin()[idx_.color[k]];
            linear_.push_back(label);
            trig_exponent_.push_back(-(label - 1.0)); // (rho, alpha_i) = 1
        }
    }

    const RootSystem& roots() const noexcept { return rs_; }
    const Weight& xi() const noexcept { return xi_; }
    const BetheIndexing& indexing() const noexcept { return idx_; }
    int m() const noexcept { return idx_.m; }
    int coupling(int i, int j) const { return coupling_[std::size_t(i) * m() + j]; }
    double trig_exponent(int k) const { return trig_exponent_.at(k); }
    int boundary_exponent() const noexcept { return rs_.l * rs_.N; }
    bool first_colour(int k) const { return idx_.color[k] == 0; }

    // ---- trigonometric ------------------------------------------------------

    bool membership_tri(std::span<const cplx> T) const
    {
        check_size(T);
        for (int k = 0; k < m(); ++k) {
            if (!std::isfinite(std::abs(T[k])))
                return false;
            if (trig_exponent_[k] != 0.0 && std::abs(T[k]) <= membership_tolerance)
                return false;
            if (first_colour(k) && std::abs(1.0 - T[k]) <= membership_tolerance)
                return false;
            for (int j = k + 1; j < m(); ++j)
                if (coupling(k, j) != 0 && std::abs(T[k] - T[j]) <= membership_tolerance)
                    return false;
        }
        return true;
    }

    std::vector<cplx> log_phi_tri_grad(std::span<const cplx> T) const
    {
        require(membership_tri(T), "point is outside F_{N,l}");
        std::vector<cplx> g(m());
        for (int i = 0; i < m(); ++i) {
            cplx s = trig_exponent_[i] / T[i];
            if (first_colour(i))
                s += double(boundary_exponent()) / (1.0 - T[i]);
            for (int j = 0; j < m(); ++j)
                if (j != i && coupling(i, j) != 0)
                    s += double(coupling(i, j)) / (T[i] - T[j]);
            g[i] = s;
        }
        return g;
    }

    /// Hessian of -log Phi_tri.
    Eigen::MatrixXcd hessian_tri(std::span<const cplx> T) const
    {
        require(membership_tri(T), "point is outside F_{N,l}");
        Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(m(), m());
        for (int i = 0; i < m(); ++i) {
            cplx d = trig_exponent_[i] / (T[i] * T[i]);
            if (first_colour(i))
                d -= double(boundary_exponent()) / ((1.0 - T[i]) * (1.0 - T[i]));
            for (int j = 0; j < m(); ++j) {
                if (j == i || coupling(i, j) == 0)
                    continue;
                const cplx inv2 = 1.0 / ((T[i] - T[j]) * (T[i] - T[j]));
                d += double(coupling(i, j)) * inv2;
                h(i, j) = -double(coupling(i, j)) * inv2;
            }
            h(i, i) = d;
        }
        return h;
    }

    CriticalReport report_tri(std::span<const cplx> T) const
    {
        CriticalReport r;
        r.point.assign(T.begin(), T.end());
        r.in_F = membership_tri(T);
        if (r.in_F) {
            r.grad_norm = norm2(log_phi_tri_grad(T));
            r.hessian_det = hessian_tri(T).determinant();
        } else {
            r.grad_norm = std::numeric_limits<double>::infinity();
        }
        return r;
    }

    // ---- elliptic -----------------------------------------------------------

    bool membership_tau(std::span<const cplx> t, const Nome& nome) const
    {
        check_size(t);
        for (int k = 0; k < m(); ++k) {
            if (!std::isfinite(std::abs(t[k])))
                return false;
            if (first_colour(k) && std::abs(theta(t[k], nome).value) <= membership_tolerance)
                return false;
            for (int j = k + 1; j < m(); ++j)
                if (coupling(k, j) != 0 && std::abs(theta(t[k] - t[j], nome).value) <= membership_tolerance)
                    return false;
        }
        return true;
    }

    std::vector<cplx> log_phi_tau_grad(std::span<const cplx> t, const Nome& nome) const
    {
        require(membership_tau(t, nome), "point is outside F^tau_{N,l}");
        std::vector<cplx> g(m());
        for (int i = 0; i < m(); ++i) {
            cplx s = 2.0 * pi * I * linear_[i];
            if (first_colour(i))
                s -= double(boundary_exponent()) * log_theta_derivatives(t[i], nome).d1;
            g[i] = s;
        }
        for (int i = 0; i < m(); ++i)
            for (int j = i + 1; j < m(); ++j) {
                if (coupling(i, j) == 0)
                    continue;
                const cplx d1 = double(coupling(i, j)) * log_theta_derivatives(t[i] - t[j], nome).d1;
                g[i] += d1;
                g[j] -= d1;
            }
        return g;
    }

    /// Hessian of -log Phi_tau in the t variables.
    Eigen::MatrixXcd hessian_tau(std::span<const cplx> t, const Nome& nome) const
    {
        require(membership_tau(t, nome), "point is outside F^tau_{N,l}");
        Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(m(), m());
        for (int i = 0; i < m(); ++i)
            if (first_colour(i))
                h(i, i) += double(boundary_exponent()) * log_theta_derivatives(t[i], nome).d2;
        for (int i = 0; i < m(); ++i)
            for (int j = i + 1; j < m(); ++j) {
                if (coupling(i, j) == 0)
                    continue;
                const cplx d2 = double(coupling(i, j)) * log_theta_derivatives(t[i] - t[j], nome).d2;
                h(i, i) -= d2;
                h(j, j) -= d2;
                h(i, j) += d2;
                h(j, i) += d2;
            }
        return h;
    }

    CriticalReport report_tau(std::span<const cplx> t, const Nome& nome) const
    {
        CriticalReport r;
        r.point.assign(t.begin(), t.end());
        r.p = nome.p();
        r.in_F = membership_tau(t, nome);
        if (r.in_F) {
            r.grad_norm = norm2(log_phi_tau_grad(t, nome));
            r.hessian_det = hessian_tau(t, nome).determinant();
        } else {
            r.grad_norm = std::numeric_limits<double>::infinity();
        }
        return r;
    }

    /// dS/dtau at fixed t.
    cplx S_dtau_partial(std::span<const cplx> t, const Nome& nome) const
    {
        check_size(t);
        cplx s = 0.0;
        for (int i = 0; i < m(); ++i) {
            if (first_colour(i))
                s -= double(boundary_exponent()) * log_theta_derivatives(t[i], nome).dtau;
            for (int j = i + 1; j < m(); ++j)
                if (coupling(i, j) != 0)
                    s += double(coupling(i, j)) * log_theta_derivatives(t[i] - t[j], nome).dtau;
        }
        return s;
    }

    /// S(t1; nome1) - S(t0; nome0), through logarithms of theta ratios (the
    /// two points must be close enough that every ratio stays near 1).
    cplx S_difference(std::span<const cplx> t1, const Nome& n1, std::span<const cplx> t0, const Nome& n0) const
    {
        check_size(t1);
        check_size(t0);
        auto ratio_log = [&](cplx a1, cplx a0) { return std::log(theta(a1, n1).value / theta(a0, n0).value); };
        cplx s = 0.0;
        for (int i = 0; i < m(); ++i) {
            if (first_colour(i))
                s -= double(boundary_exponent()) * ratio_log(t1[i], t0[i]);
            for (int j = i + 1; j < m(); ++j)
                if (coupling(i, j) != 0)
                    s += double(coupling(i, j)) * ratio_log(t1[i] - t1[j], t0[i] - t0[j]);
        }
        return s;
    }

    /// dS/dt_k at a critical point equals -2 pi i (xi, alpha_{c(k)}).
    cplx linear_coefficient(int k) const { return 2.0 * pi * I * linear_.at(k); }

private:
    void check_size(std::span<const cplx> v) const
    {
        if (int(v.size()) != m())
            throw Error(ErrorCode::domain, "point has the wrong number of Bethe variables");
    }

    static void require(bool ok, const char* what)
    {
        if (!ok)
            throw Error(ErrorCode::membership, what);
    }

    RootSystem rs_;
    Weight xi_;
    BetheIndexing idx_;
    std::vector<int> coupling_;
    std::vector<double> linear_;
    std::vector<double> trig_exponent_;
};

/// t = log(T) / (-2 pi i), principal branch.
inline std::vector<cplx> trig_to_elliptic(std::span<const cplx> T)
{
    std::vector<cplx> t(T.size());
    for (std::size_t k = 0; k < T.size(); ++k)
        t[k] = std::log(T[k]) / (-2.0 * pi * I);
    return t;
}

inline std::vector<cplx> elliptic_to_trig(std::span<const cplx> t)
{
    std::vector<cplx> T(t.size());
    for (std::size_t k = 0; k < t.size(); ++k)
        T[k] = std::exp(-2.0 * pi * I * t[k]);
    return T;
}

struct NewtonOptions
{
    double tolerance = newton_tolerance;
    int max_iterations = 100;
};

namespace detail
{

// Damped Newton for an analytic system grad(z) = 0 with Jacobian jac(z).
template <class Grad, class Jac, class Inside>
CriticalReport damped_newton(std::vector<cplx> z, Grad&& grad, Jac&& jac, Inside&& inside, const NewtonOptions& opt)
{
    if (!inside(z))
        throw Error(ErrorCode::membership, "Newton seed lies outside the admissible set");
    auto g = grad(z);
    double r = norm2(g);
    int it = 0;
    while (r >= opt.tolerance) {
        if (it >= opt.max_iterations)
            throw Error(ErrorCode::convergence, "Newton did not converge (residual " + std::to_string(r) + ")");
        ++it;
        const Eigen::MatrixXcd J = jac(z);
        Eigen::VectorXcd rhs(g.size());
        for (std::size_t k = 0; k < g.size(); ++k)
            rhs[Eigen::Index(k)] = -g[k];
        const Eigen::VectorXcd step = J.fullPivLu().solve(rhs);
        if (!step.allFinite())
            throw Error(ErrorCode::degeneracy, "singular Jacobian in Newton iteration");
        double lambda = 1.0;
        bool accepted = false;
        std::vector<cplx> trial(z.size());
        std::vector<cplx> gt;
        double rt = 0.0;
        for (int halving = 0; halving < 40; ++halving, lambda *= 0.5) {
            for (std::size_t k = 0; k < z.size(); ++k)
                trial[k] = z[k] + lambda * step[Eigen::Index(k)];
            if (!inside(trial))
                continue;
            gt = grad(trial);
            rt = norm2(gt);
            if (std::isfinite(rt) && rt < r) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            if (!inside(trial))
                throw Error(ErrorCode::membership, "Newton iteration left the admissible set");
            throw Error(ErrorCode::convergence, "Newton stagnated at residual " + std::to_string(r));
        }
        z = trial;
        g = std::move(gt);
        r = rt;
    }
    CriticalReport rep;
    rep.point = std::move(z);
    rep.grad_norm = r;
    rep.iterations = it;
    return rep;
}

} // namespace detail

/// Newton on the trigonometric Bethe equations, in the T variables.
inline CriticalReport newton_trig(const MasterFunction& mf, std::vector<cplx> seed, const NewtonOptions& opt = {})
{
    auto rep = detail::damped_newton(
        std::move(seed), [&](const std::vector<cplx>& T) { return mf.log_phi_tri_grad(T); },
        [&](const std::vector<cplx>& T) -> Eigen::MatrixXcd { return -mf.hessian_tri(T); },
        [&](const std::vector<cplx>& T) { return mf.membership_tri(T); }, opt);
    rep.in_F = true;
    rep.hessian_det = mf.hessian_tri(rep.point).determinant();
    return rep;
}

/// Newton on the elliptic Bethe equations, in the t variables.
inline CriticalReport newton_tau(const MasterFunction& mf, std::vector<cplx> seed, const Nome& nome,
                                 const NewtonOptions& opt = {})
{
    auto rep = detail::damped_newton(
        std::move(seed), [&](const std::vector<cplx>& t) { return mf.log_phi_tau_grad(t, nome); },
        [&](const std::vector<cplx>& t) -> Eigen::MatrixXcd { return -mf.hessian_tau(t, nome); },
        [&](const std::vector<cplx>& t) { return mf.membership_tau(t, nome); }, opt);
    rep.p = nome.p();
    rep.in_F = true;
    rep.hessian_det = mf.hessian_tau(rep.point, nome).determinant();
    return rep;
}

/// Points handed to the tau-derivative must be Bethe roots to this accuracy.
inline constexpr double critical_point_check = 1e-9;

/// Step in tau for the centered difference of the total derivative.
inline constexpr double total_derivative_step = 1e-4;

/// dS/dtau at a Bethe root; `total` differentiates along the branch t(tau).
inline cplx S_dtau(const MasterFunction& mf, std::span<const cplx> t, const Nome& nome, DtauMode mode)
{
    const double r = norm2(mf.log_phi_tau_grad(t, nome));
    if (r > critical_point_check)
        throw Error(ErrorCode::domain, "S_dtau requires a Bethe root (residual " + std::to_string(r) + ")");
    if (mode == DtauMode::partial || nome.is_trigonometric())
        return mf.S_dtau_partial(t, nome);
    const cplx tau = *nome.tau();
    const double h = total_derivative_step;
    const Nome plus = Nome::from_tau(tau + h, nome.series_tolerance());
    const Nome minus = Nome::from_tau(tau - h, nome.series_tolerance());
    std::vector<cplx> seed(t.begin(), t.end());
    const auto rp = newton_tau(mf, seed, plus);
    const auto rm = newton_tau(mf, seed, minus);
    return mf.S_difference(rp.point, plus, rm.point, minus) / (2.0 * h);
}

/// 2 pi^2 (xi, xi) - 2 pi i dS/dtau.
inline cplx eigenvalue_elliptic(const MasterFunction& mf, std::span<const cplx> t, const Nome& nome, DtauMode mode)
{
    return 2.0 * pi * pi * mf.xi().norm2() - 2.0 * pi * I * S_dtau(mf, t, nome, mode);
}

} // namespace ecm

#endif
