#ifndef ECM_PERTURB_HPP
#define ECM_PERTURB_HPP

// Rayleigh-Schroedinger series in the nome p for
//   H = H_CS + sum_k p^k V_k,   V_k = sum_{i<j} v_k(x_i - x_j),
// in the basis psi_nu = Delta^{l+1} J_nu^{(1/(l+1))} of H_CS eigenstates.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <set>
#include <span>
#include <vector>

#include "ecm/elliptic.hpp"
#include "ecm/error.hpp"
#include "ecm/jack.hpp"
#include "ecm/weights.hpp"

namespace ecm
{

inline constexpr int max_perturbation_order = 8;

/// v_k(s) = sum_{d=0}^{k} coeff[k-1][d] cos(2 pi d s), k = 1..K.
struct PotentialSeries
{
    int N = 0;
    int l = 0;
    int K = 0;
    std::vector<std::vector<double>> coeff;
    double extraction_residual = 0.0; // largest imaginary part or out-of-band coefficient

    double pair(int k, double s) const
    {
        double v = 0.0;
        const auto& c = coeff.at(k - 1);
        for (std::size_t d = 0; d < c.size(); ++d)
            v += c[d] * std::cos(2.0 * pi * double(d) * s);
        return v;
    }

    double operator()(int k, std::span<const double> x) const
    {
        double v = 0.0;
        for (int i = 0; i < N; ++i)
            for (int j = i + 1; j < N; ++j)
                v += pair(k, x[i] - x[j]);
        return v;
    }

    /// sum_{k<=K} p^k v_k(s).
    double partial_sum(double p, double s) const
    {
        double v = 0.0, pk = 1.0;
        for (int k = 1; k <= K; ++k) {
            pk *= p;
            v += pk * pair(k, s);
        }
        return v;
    }
};

inline constexpr double extraction_tolerance = 1e-9;

/// Taylor coefficients in p of l(l+1)(wp_shifted(s) - pi^2/sin^2(pi s)) by a
/// discrete Cauchy integral on |p| = r, followed by a cosine transform in s.
inline PotentialSeries potential_coeffs(int N, int l, int K, double r = 0.1, int M = 0,
                                        EtaConvention eta = hamiltonian_eta)
{
    if (K < 0 || K > max_perturbation_order)
        throw Error(ErrorCode::domain, "perturbation order must lie in [0, 8]");
    if (!(r > 0.0 && r < 1.0))
        throw Error(ErrorCode::domain, "Cauchy radius must lie in (0, 1)");
    if (M == 0)
        M = std::max(32, 4 * K);
    const int G = 4 * K + 4; // s-nodes (n + 1/2) / G resolve cosines up to degree 2K + 1
    PotentialSeries out{N, l, K, {}, 0.0};
    const double g = l * (l + 1.0);

    std::vector<Nome> nomes;
    for (int j = 0; j < M; ++j)
        nomes.push_back(Nome::from_p(std::polar(r, 2.0 * pi * j / M)));

    // a[k][n]: p^k coefficient at node s_n
    std::vector<std::vector<cplx>> a(K + 1, std::vector<cplx>(G, 0.0));
    for (int n = 0; n < G; ++n) {
        const double s = (n + 0.5) / G;
        const double trig = pi * pi / std::pow(std::sin(pi * s), 2);
        for (int j = 0; j < M; ++j) {
            const cplx u = g * (wp_shifted(s, nomes[j], eta) - trig);
            for (int k = 1; k <= K; ++k)
                a[k][n] += u * std::pow(nomes[j].p(), -k) / double(M);
        }
    }
    for (int k = 1; k <= K; ++k) {
        std::vector<double> c(k + 1, 0.0);
        for (int d = 0; d <= 2 * K + 1; ++d) {
            cplx cd = 0.0;
            for (int n = 0; n < G; ++n)
                cd += a[k][n] * std::cos(2.0 * pi * d * (n + 0.5) / G);
            cd *= (d == 0 ? 1.0 : 2.0) / G;
            out.extraction_residual = std::max(out.extraction_residual, std::abs(cd.imag()));
            if (d <= k)
                c[d] = cd.real();
            else
                out.extraction_residual = std::max(out.extraction_residual, std::abs(cd.real()));
        }
        out.coeff.push_back(std::move(c));
    }
    double scale = 1.0;
    for (const auto& c : out.coeff)
        for (double v : c)
            scale = std::max(scale, std::abs(v));
    if (out.extraction_residual > extraction_tolerance * scale)
        throw Error(ErrorCode::accuracy, "potential extraction residual too large; increase M or shrink r");
    return out;
}

namespace detail
{

inline int quadrature_size(int spread_sum, int N, int l, int K)
{
    return 2 * (spread_sum + (l + 1) * (N - 1) + 2 * K) + 8;
}

/// Torus average with x_{N-1} pinned at 0; exact for translation-invariant
/// trigonometric polynomials of degree below n in each remaining variable.
template <class F>
cplx pinned_average(int N, int n, F&& f)
{
    std::vector<int> idx(N - 1, 0);
    std::vector<double> x(N, 0.0);
    cplx s = 0.0;
    long long count = 0;
    while (true) {
        for (int i = 0; i < N - 1; ++i)
            x[i] = double(idx[i]) / n;
        s += f(x);
        ++count;
        int d = 0;
        for (; d < N - 1; ++d) {
            if (++idx[d] < n)
                break;
            idx[d] = 0;
        }
        if (d == N - 1)
            break;
    }
    return s / double(count);
}

} // namespace detail

/// psi_nu = Delta^{l+1} J_nu^{(1/(l+1))} on a fixed quadrature grid.
class PerturbationBasis
{
public:
    PerturbationBasis(int N, int l, int quad_n) : N_(N), l_(l), n_(quad_n) {}

    int quad_n() const noexcept { return n_; }

    const std::vector<cplx>& values(const Partition& nu)
    {
        auto it = cache_.find(nu);
        if (it != cache_.end())
            return it->second;
        const auto jack = jack_expand(nu, Rational(1, l_ + 1));
        std::vector<cplx> v;
        detail::pinned_average(N_, n_, [&](std::span<const double> x) {
            v.push_back(jack(x) * ipow(vandermonde(x), l_ + 1));
            return cplx(0.0);
        });
        return cache_.emplace(nu, std::move(v)).first->second;
    }

    /// <psi_mu, V psi_lam> / (|psi_mu| |psi_lam|), V a function on the grid.
    cplx element(const Partition& mu, const Partition& lam, const std::vector<double>& V)
    {
        const auto& a = values(mu);
        const auto& b = values(lam);
        cplx s = 0.0;
        double na = 0.0, nb = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            s += std::conj(a[i]) * V[i] * b[i];
            na += std::norm(a[i]);
            nb += std::norm(b[i]);
        }
        return s / std::sqrt(na * nb);
    }

    std::vector<double> potential_on_grid(const PotentialSeries& pot, int k) const
    {
        std::vector<double> v;
        detail::pinned_average(N_, n_, [&](std::span<const double> x) {
            v.push_back(pot(k, x));
            return cplx(0.0);
        });
        return v;
    }

private:
    int N_, l_, n_;
    std::map<Partition, std::vector<cplx>> cache_;
};

inline constexpr double quadrature_tolerance = 1e-8;

/// Normalized matrix element of V_k; checked against a grid of twice the size.
inline double matrix_element(const Partition& mu, const Partition& lam, const PotentialSeries& pot, int k)
{
    const int N = lam.N();
    const int n = detail::quadrature_size(int(mu.spread() + lam.spread()), N, pot.l, k);
    PerturbationBasis coarse(N, pot.l, n), fine(N, pot.l, 2 * n);
    const cplx a = coarse.element(mu, lam, coarse.potential_on_grid(pot, k));
    const cplx b = fine.element(mu, lam, fine.potential_on_grid(pot, k));
    if (std::abs(a - b) > quadrature_tolerance * std::max(1.0, std::abs(b)))
        throw Error(ErrorCode::accuracy, "matrix element quadrature under-resolved");
    return b.real();
}

struct EnergySeries
{
    Partition lambda;
    int K = 0;
    std::vector<double> E;          // E^(0) .. E^(K)
    std::vector<Partition> basis;   // states coupled within order K

    double partial_sum(double p) const
    {
        double s = 0.0, pk = 1.0;
        for (double e : E) {
            s += pk * e;
            pk *= p;
        }
        return s;
    }
};

namespace detail
{

// Shifted partitions nu with |nu| = |lam|, nu - lam integral, spread <= max_spread.
inline std::vector<Partition> same_sector(const Partition& lam, int max_spread)
{
    const int N = lam.N();
    std::vector<Partition> out;
    std::vector<int> beta(N, 0);
    // beta non-increasing, beta[N-1] = 0, beta[0] <= max_spread
    std::function<void(int, int)> rec = [&](int i, int cap) {
        if (i == N - 1) {
            beta[i] = 0;
            Rational size = 0;
            for (int b : beta)
                size += b;
            const Rational shift = (lam.size() - size) / Rational(N);
            if ((shift - lam[N - 1]).denominator() != 1)
                return;
            std::vector<Rational> parts;
            for (int b : beta)
                parts.push_back(Rational(b) + shift);
            out.emplace_back(std::move(parts));
            return;
        }
        for (int v = cap; v >= 0; --v) {
            beta[i] = v;
            rec(i + 1, v);
        }
    };
    rec(0, max_spread);
    return out;
}

} // namespace detail

inline constexpr double coupling_threshold = 1e-12;
inline constexpr double rs_degeneracy_tolerance = 1e-8;

/// Non-degenerate Rayleigh-Schroedinger coefficients E^(0)..E^(K) for the
/// state continued from Delta^{l+1} J_lambda.
inline EnergySeries rs_series(const Partition& lam, int l, int K, const PotentialSeries* pot_in = nullptr)
{
    const int N = lam.N();
    if (K < 0 || K > max_perturbation_order)
        throw Error(ErrorCode::domain, "perturbation order must lie in [0, 8]");
    const PotentialSeries pot = pot_in ? *pot_in : potential_coeffs(N, l, K);
    if (pot.K < K || pot.N != N || pot.l != l)
        throw Error(ErrorCode::domain, "potential series does not match the requested expansion");

    EnergySeries out;
    out.lambda = lam;
    out.K = K;
    const double E0 = cs_eigenvalue(lam, l);
    out.E.push_back(E0);
    out.basis.push_back(lam);
    if (K == 0)
        return out;

    const int max_spread = int(lam.spread()) + 2 * K;
    const auto candidates = detail::same_sector(lam, max_spread);
    const int n = detail::quadrature_size(2 * max_spread, N, l, K);
    PerturbationBasis basis(N, l, n);
    std::vector<std::vector<double>> V(K + 1);
    for (int k = 1; k <= K; ++k)
        V[k] = basis.potential_on_grid(pot, k);

    // nodes reachable from lam with total order <= K
    std::map<Partition, int> dist{{lam, 0}};
    std::map<std::pair<Partition, Partition>, std::vector<double>> elem;
    auto coupling = [&](const Partition& a, const Partition& b) -> const std::vector<double>& {
        const auto key = std::make_pair(std::min(a, b), std::max(a, b));
        auto it = elem.find(key);
        if (it != elem.end())
            return it->second;
        std::vector<double> v(K + 1, 0.0);
        for (int k = 1; k <= K; ++k)
            v[k] = basis.element(key.first, key.second, V[k]).real();
        return elem.emplace(key, std::move(v)).first->second;
    };
    std::set<std::pair<int, Partition>> frontier{{0, lam}};
    while (!frontier.empty()) {
        const auto [d, node] = *frontier.begin();
        frontier.erase(frontier.begin());
        if (d > dist.at(node))
            continue;
        for (const auto& c : candidates) {
            const auto& v = coupling(node, c);
            for (int k = 1; d + k <= K; ++k) {
                if (std::abs(v[k]) <= coupling_threshold)
                    continue;
                auto it = dist.find(c);
                if (it == dist.end() || it->second > d + k) {
                    dist[c] = d + k;
                    frontier.insert({d + k, c});
                }
            }
        }
    }
    out.basis.clear();
    for (const auto& [nu, d] : dist)
        out.basis.push_back(nu);
    const int B = int(out.basis.size());
    const int i0 = int(std::find(out.basis.begin(), out.basis.end(), lam) - out.basis.begin());

    std::vector<double> gap(B);
    for (int i = 0; i < B; ++i) {
        gap[i] = cs_eigenvalue(out.basis[i], l) - E0;
        if (i != i0 && std::abs(gap[i]) <= rs_degeneracy_tolerance * std::abs(E0))
            throw Error(ErrorCode::degeneracy, "unperturbed level is degenerate with " + out.basis[i].to_string());
    }
    auto Vk = [&](int k, int i, int j) { return coupling(out.basis[i], out.basis[j])[k]; };

    // intermediate normalization: <psi_0, psi_n> = 0 for n >= 1
    std::vector<std::vector<double>> psi(K + 1, std::vector<double>(B, 0.0));
    psi[0][i0] = 1.0;
    for (int ord = 1; ord <= K; ++ord) {
        std::vector<double> rhs(B, 0.0);
        for (int k = 1; k <= ord; ++k)
            for (int i = 0; i < B; ++i)
                for (int j = 0; j < B; ++j)
                    if (psi[ord - k][j] != 0.0)
                        rhs[i] -= Vk(k, i, j) * psi[ord - k][j];
        const double En = -rhs[i0];
        out.E.push_back(En);
        for (int j = 1; j <= ord; ++j)
            for (int i = 0; i < B; ++i)
                rhs[i] += out.E[j] * psi[ord - j][i];
        for (int i = 0; i < B; ++i)
            if (i != i0)
                psi[ord][i] = rhs[i] / gap[i];
    }
    return out;
}

} // namespace ecm

#endif
