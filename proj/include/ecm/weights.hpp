#ifndef ECM_WEIGHTS_HPP
#define ECM_WEIGHTS_HPP

// A_{N-1} root and weight bookkeeping, the index sets that enter the Bethe
// vector, and the trigonometric eigenvalue bookkeeping.
//
// Conventions: particles, simple roots and Bethe variables are 0-based.
// Simple root i is e_i - e_{i+1} (i = 0..N-2); the colour of a Bethe variable
// is the index of the simple root it is attached to.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "ecm/elliptic.hpp"
#include "ecm/error.hpp"

namespace ecm
{

inline constexpr double lattice_tolerance = 1e-9;

inline bool is_integer(double v, double tol = lattice_tolerance) { return std::abs(v - std::round(v)) <= tol; }

struct RootSystem
{
    int N;
    int l;

    RootSystem(int n, int coupling) : N(n), l(coupling)
    {
        if (N < 2 || l < 1)
            throw Error(ErrorCode::domain, "root system requires N >= 2 and l >= 1");
    }

    /// Number of Bethe variables, l N (N-1) / 2.
    int m() const noexcept { return l * N * (N - 1) / 2; }
    int rank() const noexcept { return N - 1; }

    std::vector<double> simple_root(int i) const
    {
        std::vector<double> v(N, 0.0);
        v.at(i) = 1.0;
        v.at(i + 1) = -1.0;
        return v;
    }

    /// Traceless representative of Lambda_i (0-based i).
    std::vector<double> fundamental_weight(int i) const
    {
        std::vector<double> v(N);
        for (int k = 0; k < N; ++k)
            v[k] = (k <= i ? 1.0 : 0.0) - double(i + 1) / N;
        return v;
    }

    /// Traceless rho with components (N + 1 - 2i) / 2 for 1-based i.
    std::vector<double> rho_bar() const
    {
        std::vector<double> v(N);
        for (int k = 0; k < N; ++k)
            v[k] = (N - 1 - 2.0 * k) / 2.0;
        return v;
    }

    double rho_norm2() const { return N * (double(N) * N - 1.0) / 12.0; }
};

/// A weight in the traceless hyperplane.  Keeps both the coordinates and the
/// Dynkin labels (pairings with the simple roots); lattice membership is
/// decided on the labels.
class Weight
{
public:
    /// From Lambda-coordinates: xi = sum_i labels[i] Lambda_i.
    static Weight from_dynkin(std::vector<double> labels)
    {
        if (labels.empty())
            throw Error(ErrorCode::domain, "weight needs at least one Dynkin label");
        const int N = int(labels.size()) + 1;
        std::vector<double> coords(N, 0.0);
        // xi_N = -(sum_i i a_i) / N  (1-based i), xi_k = xi_N + sum_{i>=k} a_i
        double weighted = 0.0;
        for (int i = 0; i < N - 1; ++i)
            weighted += (i + 1) * labels[i];
        coords[N - 1] = -weighted / N;
        for (int k = N - 2; k >= 0; --k)
            coords[k] = coords[k + 1] + labels[k];
        return Weight(std::move(coords), std::move(labels));
    }

    /// From arbitrary coordinates; projected onto the traceless hyperplane.
    static Weight from_coords(std::span<const double> raw)
    {
        if (raw.size() < 2)
            throw Error(ErrorCode::domain, "weight needs N >= 2 coordinates");
        const double mean = std::accumulate(raw.begin(), raw.end(), 0.0) / double(raw.size());
        std::vector<double> coords(raw.begin(), raw.end());
        for (auto& c : coords)
            c -= mean;
        std::vector<double> labels(coords.size() - 1);
        for (std::size_t i = 0; i + 1 < coords.size(); ++i)
            labels[i] = coords[i] - coords[i + 1];
        return Weight(std::move(coords), std::move(labels));
    }

    int N() const noexcept { return int(coords_.size()); }
    const std::vector<double>& coords() const noexcept { return coords_; }
    const std::vector<double>& dynkin() const noexcept { return labels_; }

    /// (xi, e_i - e_j), computed from the labels so integer labels stay exact.
    double root_pairing(int i, int j) const
    {
        if (i == j)
            return 0.0;
        if (i > j)
            return -root_pairing(j, i);
        double s = 0.0;
        for (int k = i; k < j; ++k)
            s += labels_[k];
        return s;
    }

    bool in_P() const
    {
        return std::all_of(labels_.begin(), labels_.end(), [](double a) { return is_integer(a); });
    }

    bool in_P_plus() const
    {
        return in_P() && std::all_of(labels_.begin(), labels_.end(),
                                     [](double a) { return a > -lattice_tolerance; });
    }

    double norm2() const
    {
        double s = 0.0;
        for (double c : coords_)
            s += c * c;
        return s;
    }

    /// The weight with coordinates (xi_{perm[0]}, ..., xi_{perm[N-1]}).
    Weight permuted(std::span<const int> perm) const
    {
        std::vector<double> c(coords_.size());
        for (std::size_t i = 0; i < c.size(); ++i)
            c[i] = coords_.at(perm[i]);
        auto w = from_coords(c);
        // keep integer labels exact
        for (std::size_t i = 0; i < w.labels_.size(); ++i)
            w.labels_[i] = root_pairing(perm[i], perm[i + 1]);
        return w;
    }

private:
    Weight(std::vector<double> coords, std::vector<double> labels)
        : coords_(std::move(coords)), labels_(std::move(labels))
    {
    }

    std::vector<double> coords_;
    std::vector<double> labels_;
};

inline double pairing(const Weight& xi, std::span<const double> v)
{
    if (v.size() != xi.coords().size())
        throw Error(ErrorCode::domain, "pairing: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
        s += xi.coords()[i] * v[i];
    return s;
}

/// Square-integrability gate: xi in P and |(xi, alpha)| > l for every root.
inline bool admissible(const Weight& xi, const RootSystem& rs)
{
    if (xi.N() != rs.N || !xi.in_P())
        return false;
    for (int i = 0; i < rs.N; ++i)
        for (int j = i + 1; j < rs.N; ++j)
            if (std::abs(std::round(xi.root_pairing(i, j))) <= rs.l)
                return false;
    return true;
}

/// lambda + (l + 1) rho.
inline Weight lambda_to_xi(const Weight& lambda, int l)
{
    if (!lambda.in_P_plus())
        throw Error(ErrorCode::domain, "lambda must be a dominant integral weight");
    auto labels = lambda.dynkin();
    for (auto& a : labels)
        a += l + 1;
    return Weight::from_dynkin(std::move(labels));
}

/// E_lambda^{[alpha]} = sum lambda_i^2 + sum (N + 1 - 2i) lambda_i / alpha  (1-based i).
/// Accepts any coordinates, traceless or not.
inline double jack_energy(std::span<const double> lambda, double alpha)
{
    if (alpha == 0.0)
        throw Error(ErrorCode::domain, "jack_energy: alpha must be non-zero");
    const int N = int(lambda.size());
    double e = 0.0;
    for (int i = 0; i < N; ++i)
        e += lambda[i] * lambda[i] + (N - 1 - 2.0 * i) * lambda[i] / alpha;
    return e;
}

/// e_0 = pi^2 (l + 1)^2 N (N^2 - 1) / 6, the ground-state energy of the
/// trigonometric model.
inline double ground_energy(int N, int l) { return pi * pi * (l + 1.0) * (l + 1.0) * N * (double(N) * N - 1.0) / 6.0; }

struct TargetEigenvalue
{
    double e0;
    /// 2 pi^2 E_lambda + e_0 + pi^2 N (N-1) l (l+1) / 6.
    double with_constant;
    /// 2 pi^2 E_lambda + e_0: the spectrum of the trigonometric model itself.
    double without_constant;
};

inline TargetEigenvalue target_eigenvalue(const Weight& lambda, int N, int l)
{
    if (lambda.N() != N)
        throw Error(ErrorCode::domain, "target_eigenvalue: dimension mismatch");
    const double e0 = ground_energy(N, l);
    const double base = 2.0 * pi * pi * jack_energy(lambda.coords(), 1.0 / (l + 1.0)) + e0;
    return {e0, base + pi * pi * N * (N - 1.0) * l * (l + 1.0) / 6.0, base};
}

/// One summand of the Bethe vector: for every Bethe variable k the factor
/// sigma_{x_c - x_partner}(t_k - t_source) with c the colour of k.
/// source == -1 stands for the origin (t = 0, T = 1).
struct BetheTerm
{
    std::vector<int> partner;
    std::vector<int> source;
};

/// The colour map, the blocks V_i and the enumerations of W and F_w.
struct BetheIndexing
{
    int N = 0;
    int l = 0;
    int m = 0;
    std::vector<int> color;            // colour of each Bethe variable
    std::vector<int> bounds;           // block i is [bounds[i], bounds[i+1])
    std::vector<std::vector<int>> W;   // w(k) in {c(k), ..., N-2}
    std::vector<std::vector<std::vector<int>>> F; // F[w_index][f_index][k] = source of k

    std::vector<BetheTerm> terms() const
    {
        std::vector<BetheTerm> out;
        for (std::size_t a = 0; a < W.size(); ++a)
            for (const auto& f : F[a]) {
                BetheTerm t;
                t.partner.resize(m);
                for (int k = 0; k < m; ++k)
                    t.partner[k] = W[a][k] + 1;
                t.source = f;
                out.push_back(std::move(t));
            }
        return out;
    }

    std::size_t term_count() const
    {
        std::size_t n = 0;
        for (const auto& f : F)
            n += f.size();
        return n;
    }
};

namespace detail
{

inline double factorial(int n)
{
    double f = 1.0;
    for (int i = 2; i <= n; ++i)
        f *= i;
    return f;
}

/// |W| = prod_i ((N-1-i) l)! / (l!)^{N-1-i}.
inline double w_count(int N, int l)
{
    double c = 1.0;
    for (int i = 0; i < N - 1; ++i)
        c *= factorial((N - 1 - i) * l) / std::pow(factorial(l), N - 1 - i);
    return c;
}

template <class Fn>
void for_each_product(const std::vector<std::vector<std::vector<int>>>& choices, Fn&& fn)
{
    std::vector<std::size_t> idx(choices.size(), 0);
    if (std::any_of(choices.begin(), choices.end(), [](const auto& c) { return c.empty(); }))
        return;
    while (true) {
        fn(idx);
        std::size_t d = 0;
        for (; d < idx.size(); ++d) {
            if (++idx[d] < choices[d].size())
                break;
            idx[d] = 0;
        }
        if (d == idx.size())
            return;
    }
}

} // namespace detail

inline constexpr double max_bethe_terms = 1e6;

inline BetheIndexing build_indexing(int N, int l)
{
    const RootSystem rs(N, l);
    if (detail::w_count(N, l) > max_bethe_terms)
        throw Error(ErrorCode::resource, "enumeration of W exceeds 10^6 maps");

    BetheIndexing idx;
    idx.N = N;
    idx.l = l;
    idx.m = rs.m();
    idx.bounds.push_back(0);
    for (int i = 0; i < N - 1; ++i) {
        // block size (N - 1 - i) l, so bounds[i+1] = (i+1)(2N - i - 2) l / 2
        idx.bounds.push_back(idx.bounds.back() + (N - 1 - i) * l);
        for (int k = idx.bounds[i]; k < idx.bounds[i + 1]; ++k)
            idx.color.push_back(i);
    }

    // each w_i is a multiset permutation of {i^l, (i+1)^l, ..., (N-2)^l}
    std::vector<std::vector<std::vector<int>>> per_block(N - 1);
    for (int i = 0; i < N - 1; ++i) {
        std::vector<int> seq;
        for (int j = i; j < N - 1; ++j)
            seq.insert(seq.end(), l, j);
        do
            per_block[i].push_back(seq);
        while (std::next_permutation(seq.begin(), seq.end()));
    }
    detail::for_each_product(per_block, [&](const std::vector<std::size_t>& choice) {
        std::vector<int> w;
        w.reserve(idx.m);
        for (int i = 0; i < N - 1; ++i)
            w.insert(w.end(), per_block[i][choice[i]].begin(), per_block[i][choice[i]].end());
        idx.W.push_back(std::move(w));
    });

    // F_w: bijections between fibres of w over each root index, block by block
    for (const auto& w : idx.W) {
        std::vector<std::vector<int>> domains;
        std::vector<std::vector<std::vector<int>>> images;
        for (int i = 1; i < N - 1; ++i)
            for (int j = i; j < N - 1; ++j) {
                std::vector<int> dom, cod;
                for (int k = idx.bounds[i]; k < idx.bounds[i + 1]; ++k)
                    if (w[k] == j)
                        dom.push_back(k);
                for (int k = idx.bounds[i - 1]; k < idx.bounds[i]; ++k)
                    if (w[k] == j)
                        cod.push_back(k);
                std::vector<std::vector<int>> perms;
                std::sort(cod.begin(), cod.end());
                do
                    perms.push_back(cod);
                while (std::next_permutation(cod.begin(), cod.end()));
                domains.push_back(std::move(dom));
                images.push_back(std::move(perms));
            }
        std::vector<std::vector<int>> fs;
        detail::for_each_product(images, [&](const std::vector<std::size_t>& choice) {
            std::vector<int> source(idx.m, -1);
            for (std::size_t g = 0; g < domains.size(); ++g)
                for (std::size_t a = 0; a < domains[g].size(); ++a)
                    source[domains[g][a]] = images[g][choice[g]][a];
            fs.push_back(std::move(source));
        });
        idx.F.push_back(std::move(fs));
    }
    return idx;
}

} // namespace ecm

#endif
