#pragma once

#include <array>
#include <map>
#include <optional>
#include <vector>

#include "conicover/gf.hpp"

namespace conicover::p1 {

using gf::Element;
using gf::Field;

/// Univariate polynomial over F_q, little-endian coefficients, canonical form
/// (no trailing zero coefficient; the zero polynomial has an empty list).
class Poly {
  public:
    Poly() = default;
    explicit Poly(Field k) : k_(std::move(k)) {}
    Poly(Field k, std::vector<Element> coeffs);

    static Poly zero(Field k) { return Poly(std::move(k)); }
    static Poly constant(Field k, const Element& a);
    static Poly from_int(Field k, i64 v) { return constant(k, k->from_int(v)); }
    static Poly t(Field k);  // the monomial x
    static Poly monomial(Field k, const Element& a, int deg);

    const Field& field() const { return k_; }
    int degree() const { return static_cast<int>(c_.size()) - 1; }  // -1 for zero
    bool is_zero() const { return c_.empty(); }
    bool is_one() const;
    bool is_constant() const { return degree() <= 0; }
    const Element& lc() const;
    Element coeff(int i) const;
    const std::vector<Element>& coeffs() const { return c_; }

    Poly operator+(const Poly& o) const;
    Poly operator-(const Poly& o) const;
    Poly operator-() const;
    Poly operator*(const Poly& o) const;
    Poly scaled(const Element& a) const;
    bool operator==(const Poly& o) const;
    bool operator!=(const Poly& o) const { return !(*this == o); }

    Element eval(const Element& x) const;
    Poly derivative() const;
    Poly monic() const;
    // x^deg * f(1/x); nonzero constant term whenever f != 0
    Poly reversed() const;

  private:
    void trim();
    Field k_;
    std::vector<Element> c_;
};

// total order used for canonical sorting and bit-stable reports
bool poly_less(const Poly& a, const Poly& b);

std::pair<Poly, Poly> divmod(const Poly& a, const Poly& b);
Poly operator%(const Poly& a, const Poly& b);
Poly operator/(const Poly& a, const Poly& b);  // exact or Euclidean quotient
Poly gcd(const Poly& a, const Poly& b);        // monic (or zero)
// extended gcd: g = a*s + b*t with g monic
std::array<Poly, 3> extended_gcd(const Poly& a, const Poly& b);
Poly pow_mod(const Poly& base, u64 e, const Poly& mod);
Element resultant(const Poly& a, const Poly& b);

struct Factorization {
    Element unit;                              // leading unit
    std::vector<std::pair<Poly, int>> factors; // monic irreducible, multiplicity; canonical order
    Poly product(Field k) const;
};

// multiset of (monic squarefree factor, exact multiplicity); handles p-th powers
std::map<int, Poly> squarefree_decomposition(const Poly& f);
Poly squarefree_part(const Poly& f);          // radical, monic
Poly odd_multiplicity_part(const Poly& f);    // lc * product of odd-multiplicity irreducibles
Factorization factor(const Poly& f, Rng& rng);
bool is_irreducible(const Poly& f);

/// A rational point of P^1(F_q): a field element or the point at infinity.
struct RatPoint {
    bool inf = false;
    Element v;

    static RatPoint infinity() { return RatPoint{true, {}}; }
    static RatPoint at(const Element& x) { return RatPoint{false, x}; }
    bool operator==(const RatPoint& o) const { return inf == o.inf && (inf || v == o.v); }
    bool operator!=(const RatPoint& o) const { return !(*this == o); }
};
// canonical order: finite points by enumeration index, infinity last
u64 rat_point_index(const Field& k, const RatPoint& x);
RatPoint rat_point_at_index(const Field& k, u64 idx);
std::vector<RatPoint> all_rat_points(const Field& k);

/// A closed point of P^1 over F_q: the infinite place or a monic irreducible.
class ClosedPoint {
  public:
    ClosedPoint() = default;  // empty placeholder; fill via the factories
    static ClosedPoint infinity(Field k);
    static ClosedPoint finite(Poly monic_irreducible);       // validates irreducibility
    static ClosedPoint finite_unchecked(Poly monic_irreducible);
    static ClosedPoint rational(Field k, const RatPoint& x);

    bool is_infinite() const { return inf_; }
    int degree() const { return inf_ ? 1 : min_.degree(); }
    const Poly& minpoly() const;      // finite only
    const Field& field() const { return k_; }
    std::optional<RatPoint> as_rational() const;

    bool operator==(const ClosedPoint& o) const;
    bool operator!=(const ClosedPoint& o) const { return !(*this == o); }

  private:
    bool inf_ = false;
    Poly min_;
    Field k_;
};
bool point_less(const ClosedPoint& a, const ClosedPoint& b);

// ---- residue-field arithmetic kappa(P) = F_q[t]/(p_P), P finite ----
Poly kappa_reduce(const ClosedPoint& P, const Poly& x);
Poly kappa_mul(const ClosedPoint& P, const Poly& x, const Poly& y);
Poly kappa_inv(const ClosedPoint& P, const Poly& x);
Poly kappa_pow(const ClosedPoint& P, const Poly& x, u64 e);
Element kappa_norm(const ClosedPoint& P, const Poly& x);      // to F_q
// square test via x^((q^d - 1)/2), evaluated as N(x)^((q-1)/2)
bool kappa_is_square(const ClosedPoint& P, const Poly& x);
Poly kappa_canonical_nonsquare(const ClosedPoint& P);
// minimal polynomial of x over F_q (monic irreducible of degree dividing deg P)
Poly kappa_min_poly(const ClosedPoint& P, const Poly& x);

/// Dominant rational self-map of P^1: a reduced fraction num/den with den monic.
class RationalMap {
  public:
    RationalMap(Poly num, Poly den);
    static RationalMap identity(Field k);

    const Poly& num() const { return num_; }
    const Poly& den() const { return den_; }
    const Field& field() const { return num_.field(); }
    int degree() const { return std::max(num_.degree(), den_.degree()); }
    RatPoint eval(const RatPoint& x) const;

    bool operator==(const RationalMap& o) const { return num_ == o.num_ && den_ == o.den_; }
    bool operator!=(const RationalMap& o) const { return !(*this == o); }

  private:
    Poly num_, den_;
};

RationalMap compose(const RationalMap& outer, const RationalMap& inner);

/// Element of PGL_2(F_q) acting by t -> (at+b)/(ct+d).
class Mobius {
  public:
    Mobius(Field k, Element a, Element b, Element c, Element d);
    static Mobius identity(Field k);
    // unique map with p_i -> q_i for distinct rational triples
    static Mobius from_points(const Field& k, const std::array<RatPoint, 3>& src,
                              const std::array<RatPoint, 3>& dst);

    RatPoint apply(const RatPoint& x) const;
    Mobius inverse() const;
    Mobius after(const Mobius& first) const;  // this ∘ first
    RationalMap to_map() const;
    const Field& field() const { return k_; }

  private:
    Field k_;
    Element a_, b_, c_, d_;
};

/// Point of a fibre with its ramification index and residue degree.
struct FibrePoint {
    ClosedPoint t;
    int e = 1;  // ramification index
    int f = 1;  // [kappa(t) : kappa(s)]
};

// valuation of a polynomial / rational function at a place
int valuation(const Poly& f, const ClosedPoint& P);
int valuation(const RationalMap& f, const ClosedPoint& P);

// the scheme-theoretic fibre phi^{-1}(s); sum of e*f equals deg(phi)
std::vector<FibrePoint> fibre(const RationalMap& phi, const ClosedPoint& s, Rng& rng);
ClosedPoint image_of_point(const RationalMap& phi, const ClosedPoint& P);

// first monic irreducible of the given degree in canonical order
ClosedPoint first_point_of_degree(const Field& k, int degree);

}  // namespace conicover::p1
