#ifndef ECM_ELLIPTIC_HPP
#define ECM_ELLIPTIC_HPP

// Jacobi theta function, the Weierstrass function and friends, for the lattice
// generated by 1 and tau.  Everything is evaluated from the q-series in the nome
// p = exp(2 pi i tau), written in a form that stays finite at p = 0 (the
// trigonometric limit).

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <string>

#include "ecm/error.hpp"

namespace ecm
{

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

/// Which series is used for the additive constant eta of the shifted potential.
///
/// `printed` is pi^2 (1/6 - 4 sum p^n / (1 - p^n)).  `quasi_period` carries the
/// extra weight n in the numerator, which makes wp + 2 eta = -(log theta_1)''
/// exactly (no constant Fourier mode beyond the trigonometric part).
enum class EtaConvention { printed, quasi_period };

/// Convention used by the Hamiltonian.  Chosen by the spectral residual checks:
/// only this one reproduces the Bethe eigenvalue formula at O(p^2).
inline constexpr EtaConvention hamiltonian_eta = EtaConvention::quasi_period;

namespace detail
{

// Derivatives 0..3 in x and the tau-derivative of the reduced series
//   th(x) = sum_{n>=1} (-1)^{n-1} p^{n(n-1)/2} sin((2n-1) pi x),
// which is theta_1(x) / (2 exp(i pi tau / 4)).
struct ReducedTheta
{
    std::array<cplx, 4> dx{};
    cplx dtau{};
    cplx dtau_dx{};
};

inline ReducedTheta reduced_theta1(cplx x, cplx p, double tol)
{
    ReducedTheta r;
    const double ap = std::abs(p);
    const double growth = std::exp(2.0 * pi * std::abs(x.imag()));
    double max_bound = 0.0;
    double prev_bound = 0.0;
    cplx coeff = 1.0; // (-1)^{n-1} p^{n(n-1)/2}
    double mag = 1.0; // |p|^{n(n-1)/2}
    double grow = std::exp(pi * std::abs(x.imag()));
    cplx pw = 1.0; // p^{n-1}
    double apw = 1.0;
    for (int n = 1; n <= 400; ++n) {
        if (n > 1) {
            pw *= p;
            apw *= ap;
            coeff *= -pw;
            mag *= apw;
            grow *= growth;
        }
        const double k = (2 * n - 1) * pi;
        const double bound = mag * grow * k * k * k;
        if (n > 1 && (bound == 0.0 || (bound < tol * max_bound && bound < prev_bound)))
            break;
        max_bound = std::max(max_bound, bound);
        prev_bound = bound;

        const cplx s = std::sin(k * x);
        const cplx c = std::cos(k * x);
        const cplx dtau_factor = I * pi * double(n) * double(n - 1); // d/dtau p^{n(n-1)/2}
        r.dx[0] += coeff * s;
        r.dx[1] += coeff * k * c;
        r.dx[2] -= coeff * k * k * s;
        r.dx[3] -= coeff * k * k * k * c;
        r.dtau += coeff * dtau_factor * s;
        r.dtau_dx += coeff * dtau_factor * k * c;
    }
    return r;
}

} // namespace detail

/// The modular parameter.  Stores p = exp(2 pi i tau); tau is kept when it is
/// defined (p != 0).  Immutable; caches the series values at x = 0 that every
/// normalized quantity needs.
class Nome
{
public:
    static Nome from_p(cplx p, double series_tolerance = 1e-16)
    {
        if (!(std::abs(p) < 1.0))
            throw Error(ErrorCode::domain, "nome must satisfy |p| < 1");
        std::optional<cplx> tau;
        if (p != 0.0)
            tau = std::log(p) / (2.0 * pi * I);
        return Nome(p, tau, series_tolerance);
    }

    static Nome from_tau(cplx tau, double series_tolerance = 1e-16)
    {
        if (!(tau.imag() > 0.0))
            throw Error(ErrorCode::domain, "tau must lie in the upper half plane");
        return Nome(std::exp(2.0 * pi * I * tau), tau, series_tolerance);
    }

    /// The trigonometric limit p = 0.
    static Nome trigonometric(double series_tolerance = 1e-16) { return from_p(0.0, series_tolerance); }

    cplx p() const noexcept { return p_; }
    const std::optional<cplx>& tau() const noexcept { return tau_; }
    double series_tolerance() const noexcept { return tol_; }
    bool is_trigonometric() const noexcept { return p_ == 0.0; }

    // th'(0), th'''(0) and d/dtau th'(0) of the reduced series.
    cplx reduced_d1_at_zero() const noexcept { return zero_.dx[1]; }
    cplx reduced_d3_at_zero() const noexcept { return zero_.dx[3]; }
    cplx reduced_dtau_d1_at_zero() const noexcept { return zero_.dtau_dx; }

private:
    Nome(cplx p, std::optional<cplx> tau, double tol) : p_(p), tau_(tau), tol_(tol)
    {
        if (!(tol > 0.0))
            throw Error(ErrorCode::domain, "series tolerance must be positive");
        zero_ = detail::reduced_theta1(0.0, p_, tol_);
    }

    cplx p_;
    std::optional<cplx> tau_;
    double tol_;
    detail::ReducedTheta zero_;
};

/// Value together with its x- and tau-derivatives.
struct ThetaValue
{
    cplx value;
    cplx d_x;
    cplx d_tau;
};

/// theta_1(x) = 2 sum (-1)^{n-1} exp(i pi tau (n-1/2)^2) sin((2n-1) pi x).
/// Vanishes identically in the trigonometric limit.
inline ThetaValue theta1(cplx x, const Nome& nome)
{
    if (nome.is_trigonometric())
        return {0.0, 0.0, 0.0};
    const auto r = detail::reduced_theta1(x, nome.p(), nome.series_tolerance());
    const cplx pref = 2.0 * std::exp(I * pi * *nome.tau() / 4.0);
    return {pref * r.dx[0], pref * r.dx[1], pref * (I * pi / 4.0 * r.dx[0] + r.dtau)};
}

/// theta(x) = theta_1(x) / theta_1'(0); tends to sin(pi x) / pi as p -> 0.
inline ThetaValue theta(cplx x, const Nome& nome)
{
    const auto r = detail::reduced_theta1(x, nome.p(), nome.series_tolerance());
    const cplx c = nome.reduced_d1_at_zero();
    const cplx dc = nome.reduced_dtau_d1_at_zero();
    return {r.dx[0] / c, r.dx[1] / c, r.dtau / c - r.dx[0] * dc / (c * c)};
}

/// Logarithmic derivatives of theta: (log theta)', (log theta)'' and
/// d/dtau log theta at fixed x.  These are all the master function needs.
struct LogThetaDerivatives
{
    cplx d1;
    cplx d2;
    cplx dtau;
};

inline LogThetaDerivatives log_theta_derivatives(cplx x, const Nome& nome)
{
    const auto r = detail::reduced_theta1(x, nome.p(), nome.series_tolerance());
    if (r.dx[0] == 0.0)
        throw Error(ErrorCode::membership, "log theta evaluated at a zero of theta");
    const cplx l1 = r.dx[1] / r.dx[0];
    return {l1, r.dx[2] / r.dx[0] - l1 * l1,
            r.dtau / r.dx[0] - nome.reduced_dtau_d1_at_zero() / nome.reduced_d1_at_zero()};
}

namespace detail
{
inline void require_off_lattice(cplx theta_value, const char* what)
{
    if (!(std::abs(theta_value) > 1e-15) || !std::isfinite(std::abs(theta_value)))
        throw Error(ErrorCode::membership, std::string("pole: ") + what + " on the zero lattice of theta");
}
} // namespace detail

/// sigma_lambda(x) = theta'(0) theta(x - lambda) / (theta(x) theta(lambda)).
/// theta'(0) = 1 in this normalization.
inline cplx sigma_lambda(cplx lam, cplx x, const Nome& nome)
{
    const cplx tx = theta(x, nome).value;
    const cplx tl = theta(lam, nome).value;
    detail::require_off_lattice(tx, "x");
    detail::require_off_lattice(tl, "lambda");
    return theta(x - lam, nome).value / (tx * tl);
}

/// Weierstrass wp for the periods (1, tau):
///   wp(x) = -(log theta_1)''(x) + theta_1'''(0) / (3 theta_1'(0)).
inline cplx wp(cplx x, const Nome& nome)
{
    const auto r = detail::reduced_theta1(x, nome.p(), nome.series_tolerance());
    detail::require_off_lattice(r.dx[0], "x");
    const cplx l1 = r.dx[1] / r.dx[0];
    const cplx minus_log2 = l1 * l1 - r.dx[2] / r.dx[0];
    return minus_log2 + nome.reduced_d3_at_zero() / (3.0 * nome.reduced_d1_at_zero());
}

/// eta = pi^2 (1/6 - 4 sum_{n>=1} w_n p^n / (1 - p^n)), w_n = 1 (printed) or n.
inline cplx eta_const(const Nome& nome, EtaConvention convention = EtaConvention::printed)
{
    const cplx p = nome.p();
    cplx sum = 0.0;
    cplx pn = 1.0;
    for (int n = 1; n <= 10000; ++n) {
        pn *= p;
        const double weight = convention == EtaConvention::quasi_period ? double(n) : 1.0;
        const cplx term = weight * pn / (1.0 - pn);
        sum += term;
        if (std::abs(term) <= nome.series_tolerance() * std::max(std::abs(sum), 1e-300) || pn == 0.0)
            break;
    }
    return pi * pi * (1.0 / 6.0 - 4.0 * sum);
}

/// wp(x) + 2 eta; equals pi^2 / sin^2(pi x) at p = 0.
inline cplx wp_shifted(cplx x, const Nome& nome, EtaConvention convention = hamiltonian_eta)
{
    return wp(x, nome) + 2.0 * eta_const(nome, convention);
}

} // namespace ecm

#endif
