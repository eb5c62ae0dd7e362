#ifndef ECM_HAMILTONIAN_HPP
#define ECM_HAMILTONIAN_HPP

// Direct application of
//   H = -1/2 sum_i d^2/dx_i^2 + g sum_{i<j} v(x_i - x_j)
// to a wave function given as a point evaluator, by second-order centered
// differences, plus grid Rayleigh quotients and residuals.

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "ecm/elliptic.hpp"
#include "ecm/error.hpp"

namespace ecm
{

using Evaluator = std::function<cplx(std::span<const double>)>;
using PairPotential = std::function<cplx(double)>;

/// pi^2 / sin^2(pi x): the trigonometric pair potential.
inline PairPotential trig_pair_potential()
{
    return [](double x) -> cplx {
        const double s = std::sin(pi * x);
        return pi * pi / (s * s);
    };
}

/// wp(x) + 2 eta for the given nome.
inline PairPotential elliptic_pair_potential(const Nome& nome, EtaConvention eta = hamiltonian_eta)
{
    return [nome, eta](double x) { return wp_shifted(x, nome, eta); };
}

struct Hamiltonian
{
    int N;
    double coupling; // l (l + 1)
    PairPotential v;

    static Hamiltonian calogero(int N, int l, PairPotential v) { return {N, l * (l + 1.0), std::move(v)}; }

    cplx potential(std::span<const double> x) const
    {
        cplx s = 0.0;
        for (int i = 0; i < N; ++i)
            for (int j = i + 1; j < N; ++j)
                s += v(x[i] - x[j]);
        return coupling * s;
    }
};

/// (H psi)(x) with the Laplacian replaced by centered differences of step h.
inline cplx apply_hamiltonian_at(const Hamiltonian& H, const Evaluator& psi, std::span<const double> x, double h)
{
    std::vector<double> y(x.begin(), x.end());
    const cplx centre = psi(y);
    cplx lap = 0.0;
    for (int i = 0; i < H.N; ++i) {
        y[i] = x[i] + h;
        const cplx up = psi(y);
        y[i] = x[i] - h;
        const cplx down = psi(y);
        y[i] = x[i];
        lap += (up + down - 2.0 * centre) / (h * h);
    }
    return -0.5 * lap + H.potential(x) * centre;
}

inline Evaluator apply_hamiltonian(Hamiltonian H, Evaluator psi, double h)
{
    return [H = std::move(H), psi = std::move(psi), h](std::span<const double> x) {
        return apply_hamiltonian_at(H, psi, x, h);
    };
}

/// Distance between a and b on the circle R / Z.
inline double circular_distance(double a, double b)
{
    const double d = std::abs(a - b - std::round(a - b));
    return d;
}

inline double min_pair_distance(std::span<const double> x)
{
    double d = 1.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = i + 1; j < x.size(); ++j)
            d = std::min(d, circular_distance(x[i], x[j]));
    return d;
}

/// Base points with the last coordinate pinned to 0 (every state here is
/// invariant under a common translation) and the others on the offset grid
/// (k + 1/2) / n, keeping every pair more than `margin` apart.
inline std::vector<std::vector<double>> interior_grid(int N, int n, double margin)
{
    std::vector<std::vector<double>> pts;
    std::vector<int> idx(N - 1, 0);
    while (true) {
        std::vector<double> x(N, 0.0);
        for (int i = 0; i < N - 1; ++i)
            x[i] = (idx[i] + 0.5) / n;
        if (min_pair_distance(x) > margin)
            pts.push_back(std::move(x));
        int d = 0;
        for (; d < N - 1; ++d) {
            if (++idx[d] < n)
                break;
            idx[d] = 0;
        }
        if (d == N - 1)
            break;
    }
    return pts;
}

struct SpectralCheck
{
    cplx rayleigh;        // sum conj(psi) H psi / sum |psi|^2 over the grid
    double rel_residual;  // ||H psi - E psi|| / ||E psi|| with E = Re(rayleigh)
    double max_abs_psi;
    std::size_t points;
};

inline SpectralCheck spectral_check(const Hamiltonian& H, const Evaluator& psi,
                                    const std::vector<std::vector<double>>& points, double h)
{
    if (points.empty())
        throw Error(ErrorCode::domain, "spectral check needs at least one grid point");
    std::vector<cplx> values(points.size()), applied(points.size());
    cplx num = 0.0;
    double den = 0.0;
    double max_abs = 0.0;
    for (std::size_t k = 0; k < points.size(); ++k) {
        values[k] = psi(points[k]);
        applied[k] = apply_hamiltonian_at(H, psi, points[k], h);
        if (!std::isfinite(std::abs(values[k])) || !std::isfinite(std::abs(applied[k])))
            throw Error(ErrorCode::membership, "non-finite wave function value on the grid");
        num += std::conj(values[k]) * applied[k];
        den += std::norm(values[k]);
        max_abs = std::max(max_abs, std::abs(values[k]));
    }
    if (den == 0.0)
        throw Error(ErrorCode::domain, "wave function vanishes on the whole grid");
    const cplx E = num / den;
    double r2 = 0.0, e2 = 0.0;
    for (std::size_t k = 0; k < points.size(); ++k) {
        r2 += std::norm(applied[k] - E.real() * values[k]);
        e2 += std::norm(E.real() * values[k]);
    }
    return {E, std::sqrt(r2 / e2), max_abs, points.size()};
}

} // namespace ecm

#endif
