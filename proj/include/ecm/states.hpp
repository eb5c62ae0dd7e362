#ifndef ECM_STATES_HPP
#define ECM_STATES_HPP

// Bethe vectors, their (anti)symmetrization, and the checks run on them:
// proportionality to dressed Jack polynomials, direct application of the
// Hamiltonian, and L2 quadrature.
//
// All evaluators take particle positions x; X_i = exp(2 pi i x_i) is formed
// inside, so fractional powers of X are single-valued.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "ecm/elliptic.hpp"
#include "ecm/error.hpp"
#include "ecm/hamiltonian.hpp"
#include "ecm/jack.hpp"
#include "ecm/master.hpp"
#include "ecm/weights.hpp"

namespace ecm
{

namespace detail
{

inline cplx plane_wave(const Weight& xi, std::span<const double> x)
{
    double phase = 0.0;
    for (int i = 0; i < xi.N(); ++i)
        phase += xi.coords()[i] * x[i];
    return std::exp(2.0 * pi * I * phase);
}

struct SignedPermutation
{
    std::vector<int> perm;
    int sign;
};

inline std::vector<SignedPermutation> permutations_with_sign(int N)
{
    std::vector<int> p(N);
    std::iota(p.begin(), p.end(), 0);
    std::vector<SignedPermutation> out;
    do {
        int inversions = 0;
        for (int i = 0; i < N; ++i)
            for (int j = i + 1; j < N; ++j)
                inversions += p[i] > p[j];
        out.push_back({p, inversions % 2 ? -1 : 1});
    } while (std::next_permutation(p.begin(), p.end()));
    return out;
}

} // namespace detail

/// The elliptic Bethe vector
///   e^{2 pi i (xi, x)} sum_{w, f} prod_k sigma_{x_c - x_{w(k)+1}}(t_k - t_{f(k)}),
/// c the colour of k and t_{f(k)} = 0 for the first colour.
inline Evaluator omega_elliptic(const MasterFunction& mf, std::vector<cplx> t, const Nome& nome)
{
    if (!mf.membership_tau(t, nome))
        throw Error(ErrorCode::membership, "omega: point outside F^tau_{N,l}");
    const auto& idx = mf.indexing();
    return [xi = mf.xi(), terms = idx.terms(), color = idx.color, t = std::move(t),
            nome](std::span<const double> x) -> cplx {
        cplx sum = 0.0;
        for (const auto& term : terms) {
            cplx prod = 1.0;
            for (std::size_t k = 0; k < t.size(); ++k) {
                const cplx src = term.source[k] < 0 ? cplx(0.0) : t[term.source[k]];
                prod *= sigma_lambda(x[color[k]] - x[term.partner[k]], t[k] - src, nome);
            }
            sum += prod;
        }
        return detail::plane_wave(xi, x) * sum;
    };
}

/// The trigonometric Bethe vector
///   prod_i X_i^{xi_i} / prod_{i<j} (X_i - X_j)^l
///   * sum_{w, f} prod_k (X_c T_k - X_{w(k)+1} T_{f(k)}) / (T_k - T_{f(k)}),
/// with T_{f(k)} = 1 for the first colour.  The elliptic vector tends to
/// (2 pi i)^m times this as p -> 0.
inline Evaluator omega_tri(const MasterFunction& mf, std::vector<cplx> T)
{
    if (!mf.membership_tri(T))
        throw Error(ErrorCode::membership, "omega_tri: point outside F_{N,l}");
    const auto& idx = mf.indexing();
    for (const auto& term : idx.terms())
        for (int k = 0; k < idx.m; ++k) {
            const cplx src = term.source[k] < 0 ? cplx(1.0) : T[term.source[k]];
            if (std::abs(T[k] - src) <= membership_tolerance)
                throw Error(ErrorCode::membership, "omega_tri: paired Bethe roots collide");
        }
    return [xi = mf.xi(), l = mf.roots().l, terms = idx.terms(), color = idx.color,
            T = std::move(T)](std::span<const double> x) -> cplx {
        const int N = xi.N();
        std::vector<cplx> X(N);
        for (int i = 0; i < N; ++i)
            X[i] = std::exp(2.0 * pi * I * x[i]);
        cplx sum = 0.0;
        for (const auto& term : terms) {
            cplx prod = 1.0;
            for (std::size_t k = 0; k < T.size(); ++k) {
                const cplx src = term.source[k] < 0 ? cplx(1.0) : T[term.source[k]];
                prod *= (X[color[k]] * T[k] - X[term.partner[k]] * src) / (T[k] - src);
            }
            sum += prod;
        }
        cplx vdm = 1.0;
        for (int i = 0; i < N; ++i)
            for (int j = i + 1; j < N; ++j)
                vdm *= X[i] - X[j];
        return detail::plane_wave(xi, x) * sum / ipow(vdm, l);
    };
}

/// Two-particle form X_1^{m/2} X_2^{-m/2} prod_k (X_1 T_k - X_2) / (X_1 - X_2)^l.
/// omega_tri equals this divided by prod_k (T_k - 1).
inline Evaluator omega_tri_two_particle(double m1, std::vector<cplx> T)
{
    return [m1, T = std::move(T)](std::span<const double> x) -> cplx {
        const cplx X1 = std::exp(2.0 * pi * I * x[0]);
        const cplx X2 = std::exp(2.0 * pi * I * x[1]);
        cplx prod = std::exp(pi * I * m1 * (x[0] - x[1]));
        for (const auto& Tk : T)
            prod *= X1 * Tk - X2;
        return prod / ipow(X1 - X2, int(T.size()));
    };
}

/// Sym^{(l)}: sum over S_N, weighted by the sign of the permutation when l is even.
inline Evaluator symmetrize(Evaluator f, int N, int l)
{
    return [f = std::move(f), perms = detail::permutations_with_sign(N), even = l % 2 == 0,
            N](std::span<const double> x) -> cplx {
        std::vector<double> y(N);
        cplx s = 0.0;
        for (const auto& sp : perms) {
            for (int i = 0; i < N; ++i)
                y[i] = x[sp.perm[i]];
            const cplx v = f(y);
            s += even && sp.sign < 0 ? -v : v;
        }
        return s;
    };
}

/// Fixed normalization point: the first N entries of (0.13, 0.37, 0.71, 0.89, 0.53, 0.07).
inline std::vector<double> base_point(int N)
{
    static constexpr double pts[] = {0.13, 0.37, 0.71, 0.89, 0.53, 0.07};
    if (N > int(std::size(pts)))
        throw Error(ErrorCode::domain, "base point defined for N <= 6");
    return {pts, pts + N};
}

inline Evaluator normalize_at_base_point(Evaluator f, int N)
{
    const cplx v = f(base_point(N));
    if (!(std::abs(v) > 0.0) || !std::isfinite(std::abs(v)))
        throw Error(ErrorCode::degeneracy, "state vanishes at the normalization point");
    return [f = std::move(f), v](std::span<const double> x) { return f(x) / v; };
}

struct BetheState
{
    Weight xi;
    std::vector<cplx> point;
    std::optional<Nome> nome; // empty for a trigonometric state
    Evaluator evaluator;      // Sym^{(l)} omega
    cplx eigenvalue;
};

inline BetheState trig_state(const MasterFunction& mf, std::vector<cplx> T)
{
    const auto& rs = mf.roots();
    auto ev = symmetrize(omega_tri(mf, T), rs.N, rs.l);
    const cplx e = 2.0 * pi * pi * mf.xi().norm2();
    return {mf.xi(), std::move(T), std::nullopt, std::move(ev), e};
}

inline BetheState elliptic_state(const MasterFunction& mf, std::vector<cplx> t, const Nome& nome, DtauMode mode)
{
    const auto& rs = mf.roots();
    auto ev = symmetrize(omega_elliptic(mf, t, nome), rs.N, rs.l);
    const cplx e = eigenvalue_elliptic(mf, t, nome, mode);
    return {mf.xi(), std::move(t), nome, std::move(ev), e};
}

/// Torus points with every pair at least `margin` apart, from a seeded generator.
inline std::vector<std::vector<double>> random_torus_points(int N, int count, unsigned long long seed,
                                                            double margin = 0.05)
{
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<std::vector<double>> pts;
    while (int(pts.size()) < count) {
        std::vector<double> x(N);
        for (auto& v : x)
            v = u(gen);
        if (min_pair_distance(x) > margin)
            pts.push_back(std::move(x));
    }
    return pts;
}

struct Proportionality
{
    cplx mean;
    double spread; // max |r - mean| / |mean|
    int samples;
};

/// Ratio f / g over sample points; points where |g| is tiny are skipped.
inline Proportionality ratio_statistics(const Evaluator& f, const Evaluator& g,
                                        const std::vector<std::vector<double>>& points)
{
    std::vector<cplx> r;
    double scale = 0.0;
    std::vector<cplx> gv(points.size());
    for (std::size_t k = 0; k < points.size(); ++k) {
        gv[k] = g(points[k]);
        scale = std::max(scale, std::abs(gv[k]));
    }
    for (std::size_t k = 0; k < points.size(); ++k)
        if (std::abs(gv[k]) > 1e-8 * scale)
            r.push_back(f(points[k]) / gv[k]);
    if (r.empty())
        throw Error(ErrorCode::degeneracy, "denominator vanishes at every sample point");
    cplx mean = 0.0;
    for (const auto& v : r)
        mean += v;
    mean /= double(r.size());
    double spread = 0.0;
    for (const auto& v : r)
        spread = std::max(spread, std::abs(v - mean));
    return {mean, std::abs(mean) > 0.0 ? spread / std::abs(mean) : spread, int(r.size())};
}

/// The dominant Weyl representative of xi.
inline Weight dominant(const Weight& xi)
{
    std::vector<int> perm(xi.N());
    std::iota(perm.begin(), perm.end(), 0);
    std::stable_sort(perm.begin(), perm.end(), [&](int a, int b) { return xi.coords()[a] > xi.coords()[b]; });
    return xi.permuted(perm);
}

/// Exact partition with the given (integer) Dynkin labels and zero trace.
inline Partition partition_from_dynkin(std::span<const double> labels)
{
    const int N = int(labels.size()) + 1;
    std::vector<long long> a;
    for (double v : labels) {
        if (!is_integer(v))
            throw Error(ErrorCode::domain, "partition needs integer Dynkin labels");
        a.push_back(std::llround(v));
    }
    long long weighted = 0;
    for (int i = 0; i < N - 1; ++i)
        weighted += (i + 1) * a[i];
    std::vector<Rational> parts(N);
    parts[N - 1] = Rational(-weighted, N);
    for (int k = N - 2; k >= 0; --k)
        parts[k] = parts[k + 1] + a[k];
    return Partition(std::move(parts));
}

/// lambda = dominant(xi) - (l + 1) rho, as an exact traceless partition.
inline Partition jack_label(const Weight& xi, int l)
{
    auto labels = dominant(xi).dynkin();
    for (auto& a : labels)
        a -= l + 1;
    if (std::any_of(labels.begin(), labels.end(), [](double a) { return a < -lattice_tolerance; }))
        throw Error(ErrorCode::domain, "dominant weight is not of the form lambda + (l+1) rho");
    return partition_from_dynkin(labels);
}

/// Sym^{(l)} omega_tri against J_lambda^{(1/(l+1))} Delta^{l+1} on `samples`
/// seeded torus points.  For N = 2 the two-particle form of omega_tri is used.
inline Proportionality jack_proportionality(const MasterFunction& mf, const std::vector<cplx>& T, int samples = 20,
                                            unsigned long long seed = 20240601)
{
    const auto& rs = mf.roots();
    if (!admissible(mf.xi(), rs))
        throw Error(ErrorCode::domain, "jack_proportionality: xi is not admissible");
    const Evaluator omega =
        rs.N == 2 ? omega_tri_two_particle(mf.xi().dynkin()[0], T) : omega_tri(mf, T);
    const Evaluator sym = symmetrize(omega, rs.N, rs.l);
    const auto jack = jack_expand(jack_label(mf.xi(), rs.l), Rational(1, rs.l + 1));
    const Evaluator ref = dress(jack.evaluator(), rs.l + 1);
    return ratio_statistics(sym, ref, random_torus_points(rs.N, samples, seed));
}

/// H^{tau,(l)} with the potential wp + 2 eta.
inline Hamiltonian elliptic_hamiltonian(int N, int l, const Nome& nome, EtaConvention eta = hamiltonian_eta)
{
    return Hamiltonian::calogero(N, l, elliptic_pair_potential(nome, eta));
}

inline SpectralCheck residual_check(const BetheState& state, int l, int grid_n = 24, double fd_h = 1e-3,
                                    double margin = 0.1, EtaConvention eta = hamiltonian_eta)
{
    const int N = state.xi.N();
    const Hamiltonian H = state.nome ? elliptic_hamiltonian(N, l, *state.nome, eta)
                                     : Hamiltonian::calogero(N, l, trig_pair_potential());
    return spectral_check(H, state.evaluator, interior_grid(N, grid_n, margin), fd_h);
}

/// Midpoint estimates of the integral of |psi|^2 over [0,1]^N at each
/// resolution.  psi is assumed invariant under a common translation, so the
/// last coordinate is pinned at 0; the other axes carry distinct fractional
/// offsets so no node lies on a diagonal.
inline std::vector<double> l2_estimate(const Evaluator& psi, const Weight& xi,
                                       std::span<const int> levels = std::array{16, 32, 64})
{
    if (!xi.in_P())
        throw Error(ErrorCode::domain, "periodicity: xi is not in the weight lattice, |psi|^2 is not 1-periodic");
    const int N = xi.N();
    std::vector<double> out;
    for (int n : levels) {
        std::vector<int> idx(N - 1, 0);
        std::vector<double> x(N, 0.0);
        double s = 0.0;
        long long count = 0;
        while (true) {
            for (int i = 0; i < N - 1; ++i)
                x[i] = (idx[i] + double(i + 1) / (N + 1)) / n;
            s += std::norm(psi(x));
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
        out.push_back(s / double(count));
    }
    return out;
}

/// Writes x_1..x_N, Re psi, Im psi per grid point.
inline void write_grid_csv(const std::string& path, const Evaluator& psi, const std::vector<std::vector<double>>& points)
{
    std::ofstream os(path);
    if (!os)
        throw Error(ErrorCode::resource, "cannot open " + path);
    os << std::setprecision(17);
    const std::size_t N = points.empty() ? 0 : points.front().size();
    for (std::size_t i = 0; i < N; ++i)
        os << 'x' << i + 1 << ',';
    os << "re,im\n";
    for (const auto& x : points) {
        const cplx v = psi(x);
        for (double c : x)
            os << c << ',';
        os << v.real() << ',' << v.imag() << '\n';
    }
}

} // namespace ecm

#endif
