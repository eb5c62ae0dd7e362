#ifndef ECM_JACK_HPP
#define ECM_JACK_HPP

// Jack polynomials J_lambda^{(alpha)} in the monomial basis.
//
// J_lambda is the eigenvector of the trigonometric Calogero-Sutherland operator
//   D = sum_i (X_i d/dX_i)^2 + beta sum_{i<j} (X_i + X_j)/(X_i - X_j) (X_i d_i - X_j d_j),
// beta = 1/alpha, restricted to the dominance ideal below lambda.  D maps m_mu
// into the span of m_nu with nu <= mu, so the coefficients follow from a
// triangular solve in exact rational arithmetic.
//
// Partitions may be shifted: parts are rationals with integer differences,
// and m_{lambda + (a,...,a)} = (X_1...X_N)^a m_lambda.

#include <algorithm>
#include <cmath>
#include <compare>
#include <complex>
#include <cstddef>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <boost/rational.hpp>

#include "ecm/elliptic.hpp"
#include "ecm/error.hpp"
#include "ecm/hamiltonian.hpp"
#include "ecm/weights.hpp"

namespace ecm
{

using Rational = boost::rational<long long>;

inline double to_double(const Rational& r) { return boost::rational_cast<double>(r); }

inline std::string to_string(const Rational& r)
{
    std::ostringstream os;
    os << r.numerator();
    if (r.denominator() != 1)
        os << '/' << r.denominator();
    return os.str();
}

/// Parses "3", "-1/2" or "0.5" (decimals with up to 9 fractional digits).
inline Rational parse_rational(const std::string& s)
{
    const auto slash = s.find('/');
    try {
        if (slash != std::string::npos)
            return Rational(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
        const auto dot = s.find('.');
        if (dot == std::string::npos)
            return Rational(std::stoll(s));
        const std::string frac = s.substr(dot + 1);
        if (frac.size() > 9)
            throw Error(ErrorCode::domain, "too many decimal digits in '" + s + "'");
        long long den = 1;
        for (std::size_t i = 0; i < frac.size(); ++i)
            den *= 10;
        const bool neg = !s.empty() && s[0] == '-';
        const long long whole = dot == 0 || (dot == 1 && neg) ? 0 : std::llabs(std::stoll(s.substr(0, dot)));
        const long long num = whole * den + (frac.empty() ? 0 : std::stoll(frac));
        return Rational(neg ? -num : num, den);
    } catch (const std::invalid_argument&) {
        throw Error(ErrorCode::domain, "cannot parse rational '" + s + "'");
    } catch (const boost::bad_rational&) {
        throw Error(ErrorCode::domain, "zero denominator in '" + s + "'");
    }
}

class Partition
{
public:
    Partition() = default;

    explicit Partition(std::vector<Rational> parts) : parts_(std::move(parts))
    {
        if (parts_.empty())
            throw Error(ErrorCode::domain, "partition needs at least one part");
        for (std::size_t i = 0; i + 1 < parts_.size(); ++i) {
            const Rational d = parts_[i] - parts_[i + 1];
            if (d < Rational(0) || d.denominator() != 1)
                throw Error(ErrorCode::domain, "parts must be non-increasing with integer differences");
        }
    }

    static Partition from_ints(std::initializer_list<long long> parts)
    {
        std::vector<Rational> v;
        for (auto p : parts)
            v.emplace_back(p);
        return Partition(std::move(v));
    }

    int N() const noexcept { return int(parts_.size()); }
    const std::vector<Rational>& parts() const noexcept { return parts_; }
    const Rational& operator[](std::size_t i) const { return parts_[i]; }

    Rational size() const { return std::accumulate(parts_.begin(), parts_.end(), Rational(0)); }

    Partition shifted(const Rational& a) const
    {
        auto v = parts_;
        for (auto& p : v)
            p += a;
        return Partition(std::move(v));
    }

    /// Largest minus smallest part.
    long long spread() const { return boost::rational_cast<long long>(parts_.front() - parts_.back()); }

    std::vector<double> as_doubles() const
    {
        std::vector<double> v;
        for (const auto& p : parts_)
            v.push_back(to_double(p));
        return v;
    }

    std::string to_string() const
    {
        std::string s;
        for (std::size_t i = 0; i < parts_.size(); ++i)
            s += (i ? "," : "") + ecm::to_string(parts_[i]);
        return s;
    }

    friend bool operator==(const Partition& a, const Partition& b) { return a.parts_ == b.parts_; }
    friend bool operator<(const Partition& a, const Partition& b)
    {
        return std::lexicographical_compare(a.parts_.begin(), a.parts_.end(), b.parts_.begin(), b.parts_.end());
    }

private:
    std::vector<Rational> parts_;
};

/// mu <= lambda in dominance order: equal size and every partial sum of mu
/// bounded by that of lambda.
inline bool dominance_leq(const Partition& mu, const Partition& lam)
{
    if (mu.N() != lam.N())
        throw Error(ErrorCode::domain, "dominance: partitions of different length");
    if (mu.size() != lam.size())
        return false;
    Rational a = 0, b = 0;
    for (int i = 0; i < mu.N(); ++i) {
        a += mu[i];
        b += lam[i];
        if (a > b)
            return false;
    }
    return true;
}

namespace detail
{

inline void partitions_rec(int remaining, int max_part, int slots, std::vector<int>& cur,
                           std::vector<std::vector<int>>& out)
{
    if (slots == 0) {
        if (remaining == 0)
            out.push_back(cur);
        return;
    }
    for (int p = std::min(remaining, max_part); p >= 0; --p) {
        if (p * slots < remaining)
            break;
        cur.push_back(p);
        partitions_rec(remaining - p, p, slots - 1, cur, out);
        cur.pop_back();
    }
}

/// Ordinary partitions of n into at most N parts, padded with zeros,
/// in decreasing lexicographic order.
inline std::vector<std::vector<int>> integer_partitions(int n, int N)
{
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    partitions_rec(n, n, N, cur, out);
    return out;
}

template <class T>
std::vector<std::vector<T>> distinct_permutations(std::vector<T> v)
{
    std::vector<std::vector<T>> out;
    std::sort(v.begin(), v.end());
    do
        out.push_back(v);
    while (std::next_permutation(v.begin(), v.end()));
    return out;
}

inline bool is_non_increasing(const std::vector<int>& e)
{
    for (std::size_t i = 0; i + 1 < e.size(); ++i)
        if (e[i] < e[i + 1])
            return false;
    return true;
}

// Coefficients of the sorted monomials X^nu in D m_mu.
inline std::map<std::vector<int>, Rational> apply_sutherland(const std::vector<int>& mu, const Rational& beta)
{
    std::map<std::vector<int>, Rational> out;
    auto add = [&](const std::vector<int>& e, const Rational& c) {
        if (is_non_increasing(e))
            out[e] += c;
    };
    const int N = int(mu.size());
    for (const auto& e : distinct_permutations(mu)) {
        long long sq = 0;
        for (int v : e)
            sq += (long long)v * v;
        add(e, Rational(sq));
        for (int i = 0; i < N; ++i)
            for (int j = i + 1; j < N; ++j) {
                const int a = e[i], b = e[j];
                if (a <= b)
                    continue; // the swapped partner monomial covers a < b
                const Rational w = beta * Rational(a - b);
                add(e, w);
                auto s = e;
                std::swap(s[i], s[j]);
                add(s, w);
                for (int k = 1; k < a - b; ++k) {
                    auto t = e;
                    t[i] -= k;
                    t[j] += k;
                    add(t, 2 * w);
                }
            }
    }
    return out;
}

} // namespace detail

inline Rational jack_energy_exact(const Partition& lam, const Rational& alpha)
{
    const int N = lam.N();
    Rational e = 0;
    for (int i = 0; i < N; ++i)
        e += lam[i] * lam[i] + Rational(N - 1 - 2 * i) * lam[i] / alpha;
    return e;
}

/// J_lambda^{(alpha)} = m_lambda + sum_{mu < lambda} c_mu m_mu.
class JackExpansion
{
public:
    JackExpansion(Rational alpha, Partition lead, std::map<Partition, Rational> coeffs)
        : alpha_(alpha), lead_(std::move(lead)), coeffs_(std::move(coeffs))
    {
        for (const auto& [mu, c] : coeffs_) {
            if (c == Rational(0))
                continue;
            for (const auto& perm : detail::distinct_permutations(mu.parts())) {
                Term t;
                t.coeff = to_double(c);
                for (const auto& e : perm)
                    t.exponent.push_back(to_double(e));
                terms_.push_back(std::move(t));
            }
        }
    }

    const Rational& alpha() const noexcept { return alpha_; }
    const Partition& lead() const noexcept { return lead_; }
    const std::map<Partition, Rational>& coeffs() const noexcept { return coeffs_; }

    Rational coeff(const Partition& mu) const
    {
        const auto it = coeffs_.find(mu);
        return it == coeffs_.end() ? Rational(0) : it->second;
    }

    /// J(X) at X_i = exp(2 pi i x_i).
    cplx operator()(std::span<const double> x) const
    {
        cplx s = 0.0;
        for (const auto& t : terms_) {
            double phase = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i)
                phase += t.exponent[i] * x[i];
            s += t.coeff * std::exp(2.0 * pi * I * phase);
        }
        return s;
    }

    Evaluator evaluator() const
    {
        return [self = *this](std::span<const double> x) { return self(x); };
    }

private:
    struct Term
    {
        double coeff;
        std::vector<double> exponent;
    };

    Rational alpha_;
    Partition lead_;
    std::map<Partition, Rational> coeffs_;
    std::vector<Term> terms_;
};

inline JackExpansion jack_expand(const Partition& lam, const Rational& alpha)
{
    if (alpha <= Rational(0))
        throw Error(ErrorCode::domain, "jack_expand: alpha must be positive");
    const int N = lam.N();
    const Rational shift = lam[N - 1];
    const Partition base = lam.shifted(-shift);
    std::vector<int> lead;
    for (const auto& p : base.parts())
        lead.push_back(int(boost::rational_cast<long long>(p)));
    const int n = std::accumulate(lead.begin(), lead.end(), 0);

    auto to_partition = [&](const std::vector<int>& v) {
        std::vector<Rational> r;
        for (int x : v)
            r.emplace_back(x);
        return Partition(std::move(r));
    };

    std::vector<std::vector<int>> basis;
    for (auto& mu : detail::integer_partitions(n, N))
        if (dominance_leq(to_partition(mu), base))
            basis.push_back(std::move(mu)); // decreasing lexicographic: a linear extension of dominance

    const Rational beta = Rational(1) / alpha;
    const Rational e_lead = jack_energy_exact(base, alpha);
    std::map<std::vector<int>, Rational> c;
    std::map<std::vector<int>, std::map<std::vector<int>, Rational>> images;
    for (const auto& mu : basis)
        images.emplace(mu, detail::apply_sutherland(mu, beta));

    for (const auto& nu : basis) {
        if (nu == lead) {
            c[nu] = 1;
            continue;
        }
        Rational rhs = 0;
        for (const auto& [mu, cm] : c) {
            const auto& img = images.at(mu);
            const auto it = img.find(nu);
            if (it != img.end())
                rhs += cm * it->second;
        }
        const Rational gap = e_lead - jack_energy_exact(to_partition(nu), alpha);
        if (gap == Rational(0))
            throw Error(ErrorCode::degeneracy, "eigenvalue collision between " + to_partition(nu).to_string() +
                                                   " and " + lam.to_string());
        c[nu] = rhs / gap;
    }

    std::map<Partition, Rational> coeffs;
    for (const auto& [nu, v] : c)
        if (v != Rational(0))
            coeffs.emplace(to_partition(nu).shifted(shift), v);
    return JackExpansion(alpha, lam, std::move(coeffs));
}

/// Delta(x) = (X_1...X_N)^{(1-N)/2} prod_{i<j} (X_i - X_j) = prod_{i<j} 2i sin(pi (x_i - x_j)).
inline cplx vandermonde(std::span<const double> x)
{
    cplx d = 1.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = i + 1; j < x.size(); ++j)
            d *= 2.0 * I * std::sin(pi * (x[i] - x[j]));
    return d;
}

inline cplx ipow(cplx z, int k)
{
    cplx r = 1.0;
    for (int i = 0; i < k; ++i)
        r *= z;
    return r;
}

/// f(x) Delta(x)^k.
inline Evaluator dress(Evaluator f, int k)
{
    return [f = std::move(f), k](std::span<const double> x) { return f(x) * ipow(vandermonde(x), k); };
}

/// <f, g> = (1/N!) torus average of conj(Delta^{1/alpha} f) Delta^{1/alpha} g on a
/// uniform quad_n^N grid (exact for trigonometric polynomials of degree < quad_n).
inline cplx inner_product(const Evaluator& f, const Evaluator& g, const Rational& alpha, int N, int quad_n)
{
    const Rational beta = Rational(1) / alpha;
    if (beta.denominator() != 1 || beta <= Rational(0))
        throw Error(ErrorCode::domain, "inner product needs 1/alpha to be a positive integer");
    const int k = int(beta.numerator());
    std::vector<int> idx(N, 0);
    std::vector<double> x(N);
    cplx s = 0.0;
    long long count = 0;
    while (true) {
        for (int i = 0; i < N; ++i)
            x[i] = double(idx[i]) / quad_n;
        const cplx w = ipow(vandermonde(x), k);
        s += std::conj(w * f(x)) * (w * g(x));
        ++count;
        int d = 0;
        for (; d < N; ++d) {
            if (++idx[d] < quad_n)
                break;
            idx[d] = 0;
        }
        if (d == N)
            break;
    }
    return s / (double(count) * detail::factorial(N));
}

/// H_CS applied to f Delta^{l+1} by centered differences.
inline Evaluator cs_apply(Evaluator f, int l, int N, double h = 1e-3)
{
    return apply_hamiltonian(Hamiltonian::calogero(N, l, trig_pair_potential()), dress(std::move(f), l + 1), h);
}

/// Rayleigh quotient and residual of H_CS on f Delta^{l+1}.
inline SpectralCheck cs_check(const Evaluator& f, int l, int N, int grid_n = 24, double margin = 0.1, double h = 1e-3)
{
    return spectral_check(Hamiltonian::calogero(N, l, trig_pair_potential()), dress(f, l + 1),
                          interior_grid(N, grid_n, margin), h);
}

/// e_0 + 2 pi^2 E_lambda^{[1/(l+1)]}: the H_CS eigenvalue of Delta^{l+1} J_lambda.
inline double cs_eigenvalue(const Partition& lam, int l)
{
    const int N = lam.N();
    return pi * pi * (l + 1.0) * (l + 1.0) * N * (double(N) * N - 1.0) / 6.0 +
           2.0 * pi * pi * to_double(jack_energy_exact(lam, Rational(1, l + 1)));
}

} // namespace ecm

#endif
