#include "conicover/p1.hpp"

#include <algorithm>

namespace conicover::p1 {

namespace {

void require_same_field(const Poly& a, const Poly& b) {
    require(a.field() && b.field() && a.field()->same_as(*b.field()),
            "mixed-field polynomial operands");
}

}  // namespace

// ---------------------------------------------------------------------------
// Poly
// ---------------------------------------------------------------------------

Poly::Poly(Field k, std::vector<Element> coeffs) : k_(std::move(k)), c_(std::move(coeffs)) {
    for (const auto& e : c_) k_->check(e);
    trim();
}

void Poly::trim() {
    while (!c_.empty() && k_->is_zero(c_.back())) c_.pop_back();
}

Poly Poly::constant(Field k, const Element& a) {
    std::vector<Element> c{a};
    return Poly(std::move(k), std::move(c));
}

Poly Poly::t(Field k) {
    std::vector<Element> c{k->zero(), k->one()};
    return Poly(std::move(k), std::move(c));
}

Poly Poly::monomial(Field k, const Element& a, int deg) {
    std::vector<Element> c(deg + 1, k->zero());
    c[deg] = a;
    return Poly(std::move(k), std::move(c));
}

bool Poly::is_one() const { return degree() == 0 && c_[0] == k_->one(); }

const Element& Poly::lc() const {
    require(!is_zero(), "leading coefficient of the zero polynomial");
    return c_.back();
}

Element Poly::coeff(int i) const {
    if (i < 0 || i >= static_cast<int>(c_.size())) return k_->zero();
    return c_[i];
}

Poly Poly::operator+(const Poly& o) const {
    require_same_field(*this, o);
    std::vector<Element> r(std::max(c_.size(), o.c_.size()), k_->zero());
    for (size_t i = 0; i < r.size(); ++i) r[i] = k_->add(coeff(static_cast<int>(i)), o.coeff(static_cast<int>(i)));
    return Poly(k_, std::move(r));
}

Poly Poly::operator-(const Poly& o) const { return *this + (-o); }

Poly Poly::operator-() const {
    std::vector<Element> r(c_.size(), k_->zero());
    for (size_t i = 0; i < c_.size(); ++i) r[i] = k_->neg(c_[i]);
    return Poly(k_, std::move(r));
}

Poly Poly::operator*(const Poly& o) const {
    require_same_field(*this, o);
    if (is_zero() || o.is_zero()) return Poly::zero(k_);
    std::vector<Element> r(c_.size() + o.c_.size() - 1, k_->zero());
    for (size_t i = 0; i < c_.size(); ++i) {
        if (k_->is_zero(c_[i])) continue;
        for (size_t j = 0; j < o.c_.size(); ++j)
            r[i + j] = k_->add(r[i + j], k_->mul(c_[i], o.c_[j]));
    }
    return Poly(k_, std::move(r));
}

Poly Poly::scaled(const Element& a) const {
    std::vector<Element> r(c_.size(), k_->zero());
    for (size_t i = 0; i < c_.size(); ++i) r[i] = k_->mul(c_[i], a);
    return Poly(k_, std::move(r));
}

bool Poly::operator==(const Poly& o) const { return c_ == o.c_; }

Element Poly::eval(const Element& x) const {
    Element r = k_->zero();
    for (int i = degree(); i >= 0; --i) r = k_->add(k_->mul(r, x), c_[i]);
    return r;
}

Poly Poly::derivative() const {
    if (degree() <= 0) return Poly::zero(k_);
    std::vector<Element> r(c_.size() - 1, k_->zero());
    for (size_t i = 1; i < c_.size(); ++i) r[i - 1] = k_->mul(k_->from_int(static_cast<i64>(i)), c_[i]);
    return Poly(k_, std::move(r));
}

Poly Poly::monic() const {
    require(!is_zero(), "monic of zero polynomial");
    return scaled(k_->inv(lc()));
}

Poly Poly::reversed() const {
    std::vector<Element> r(c_.rbegin(), c_.rend());
    return Poly(k_, std::move(r));
}

bool poly_less(const Poly& a, const Poly& b) {
    if (a.degree() != b.degree()) return a.degree() < b.degree();
    for (int i = 0; i <= a.degree(); ++i) {
        const Element x = a.coeff(i), y = b.coeff(i);
        if (x != y) return x < y;
    }
    return false;
}

std::pair<Poly, Poly> divmod(const Poly& a, const Poly& b) {
    require(!b.is_zero(), "division by the zero polynomial");
    require_same_field(a, b);
    const Field& k = a.field();
    const Element lbi = k->inv(b.lc());
    Poly rem = a;
    if (a.degree() < b.degree()) return {Poly::zero(k), rem};
    std::vector<Element> q(a.degree() - b.degree() + 1, k->zero());
    while (!rem.is_zero() && rem.degree() >= b.degree()) {
        const int shift = rem.degree() - b.degree();
        const Element coef = k->mul(rem.lc(), lbi);
        q[shift] = coef;
        rem = rem - (b * Poly::monomial(k, coef, shift));
    }
    return {Poly(k, std::move(q)), rem};
}

Poly operator%(const Poly& a, const Poly& b) { return divmod(a, b).second; }
Poly operator/(const Poly& a, const Poly& b) { return divmod(a, b).first; }

Poly gcd(const Poly& a, const Poly& b) {
    Poly x = a, y = b;
    while (!y.is_zero()) {
        Poly r = x % y;
        x = std::move(y);
        y = std::move(r);
    }
    return x.is_zero() ? x : x.monic();
}

std::array<Poly, 3> extended_gcd(const Poly& a, const Poly& b) {
    const Field& k = a.field();
    Poly r0 = a, r1 = b;
    Poly s0 = Poly::from_int(k, 1), s1 = Poly::zero(k);
    Poly t0 = Poly::zero(k), t1 = Poly::from_int(k, 1);
    while (!r1.is_zero()) {
        auto [q, r] = divmod(r0, r1);
        r0 = r1;
        r1 = r;
        Poly s = s0 - q * s1;
        s0 = s1;
        s1 = std::move(s);
        Poly t = t0 - q * t1;
        t0 = t1;
        t1 = std::move(t);
    }
    if (r0.is_zero()) return {r0, s0, t0};
    const Element u = k->inv(r0.lc());
    return {r0.scaled(u), s0.scaled(u), t0.scaled(u)};
}

Poly pow_mod(const Poly& base, u64 e, const Poly& mod) {
    const Field& k = base.field();
    Poly r = Poly::from_int(k, 1) % mod;
    Poly x = base % mod;
    while (e) {
        if (e & 1) r = (r * x) % mod;
        x = (x * x) % mod;
        e >>= 1;
    }
    return r;
}

Element resultant(const Poly& a, const Poly& b) {
    const Field& k = a.field();
    if (a.is_zero() || b.is_zero()) return k->zero();
    Poly x = a, y = b;
    Element res = k->one();
    while (y.degree() > 0) {
        Poly r = x % y;
        if (r.is_zero()) return x.degree() > 0 || y.degree() > 0 ? k->zero() : res;
        // Res(x, y) = (-1)^(dx*dy) * lc(y)^(dx - dr) * Res(y, r)
        if ((x.degree() & 1) && (y.degree() & 1)) res = k->neg(res);
        res = k->mul(res, k->pow(y.lc(), static_cast<u64>(x.degree() - r.degree())));
        x = std::move(y);
        y = std::move(r);
    }
    // y is a nonzero constant
    res = k->mul(res, k->pow(y.coeff(0), static_cast<u64>(x.degree())));
    return res;
}

// ---------------------------------------------------------------------------
// factorization
// ---------------------------------------------------------------------------

namespace {

// p-th root of a polynomial whose exponents are all divisible by p;
// coefficient roots are a -> a^(p^(n-1))
Poly pth_root(const Poly& f) {
    const Field& k = f.field();
    const i64 p = k->p();
    std::vector<Element> r;
    for (int i = 0; i <= f.degree(); i += static_cast<int>(p)) {
        Element a = f.coeff(i);
        r.push_back(k->frobenius(a, k->n() - 1));
    }
    return Poly(k, std::move(r));
}

void sfd_into(const Poly& f, int mult, std::map<int, Poly>& out) {
    const Field& k = f.field();
    Poly c = gcd(f, f.derivative());  // equals f when the derivative vanishes
    Poly w = f / c;
    int i = 1;
    while (!w.is_constant()) {
        Poly y = gcd(w, c);
        Poly z = w / y;
        if (z.degree() > 0) {
            auto it = out.find(i * mult);
            if (it == out.end())
                out.emplace(i * mult, z.monic());
            else
                it->second = (it->second * z).monic();
        }
        w = std::move(y);
        c = c / w;
        ++i;
    }
    if (c.degree() > 0) sfd_into(pth_root(c), mult * static_cast<int>(k->p()), out);
}

}  // namespace

std::map<int, Poly> squarefree_decomposition(const Poly& f) {
    require(!f.is_zero(), "squarefree decomposition of zero");
    std::map<int, Poly> out;
    if (f.degree() > 0) sfd_into(f.monic(), 1, out);
    return out;
}

Poly squarefree_part(const Poly& f) {
    const Field& k = f.field();
    Poly r = Poly::from_int(k, 1);
    for (const auto& [m, g] : squarefree_decomposition(f)) r = r * g;
    return r;
}

Poly odd_multiplicity_part(const Poly& f) {
    require(!f.is_zero(), "odd part of zero");
    const Field& k = f.field();
    Poly r = Poly::constant(k, f.lc());
    for (const auto& [m, g] : squarefree_decomposition(f))
        if (m % 2 == 1) r = r * g;
    return r;
}

namespace {

// distinct-degree factorization of a squarefree monic f
std::vector<std::pair<Poly, int>> ddf(Poly f) {
    const Field& k = f.field();
    std::vector<std::pair<Poly, int>> res;
    Poly x = Poly::t(k);
    Poly h = x % f;
    int d = 0;
    while (f.degree() > 0 && 2 * (d + 1) <= f.degree()) {
        ++d;
        h = pow_mod(h, k->q(), f);
        Poly g = gcd(h - x, f);
        if (g.degree() > 0) {
            res.emplace_back(g, d);
            f = f / g;
            h = h % f;
        }
    }
    if (f.degree() > 0) res.emplace_back(f, f.degree());
    return res;
}

Poly random_poly_below(const Field& k, int deg_bound, Rng& rng) {
    std::vector<Element> c(static_cast<size_t>(deg_bound), k->zero());
    for (auto& e : c) e = k->element_at(rng.below(k->q()));
    return Poly(k, std::move(c));
}

// equal-degree factorization: f squarefree monic, all factors of degree d
void edf(const Poly& f, int d, Rng& rng, std::vector<Poly>& out) {
    const Field& k = f.field();
    if (f.degree() == d) {
        out.push_back(f);
        return;
    }
    for (;;) {
        Poly r = random_poly_below(k, f.degree(), rng);
        if (r.is_zero()) continue;
        Poly g = gcd(r, f);
        if (g.degree() == 0) {
            // r^((q^d-1)/2) = N(r)^((q-1)/2) with N(r) = prod of r^(q^i), i < d
            Poly u = r % f;
            Poly prod = u;
            for (int i = 1; i < d; ++i) {
                u = pow_mod(u, k->q(), f);
                prod = (prod * u) % f;
            }
            Poly s = pow_mod(prod, (k->q() - 1) / 2, f);
            g = gcd(s - Poly::from_int(k, 1), f);
        }
        if (g.degree() > 0 && g.degree() < f.degree()) {
            edf(g, d, rng, out);
            edf(f / g, d, rng, out);
            return;
        }
    }
}

}  // namespace

Factorization factor(const Poly& f, Rng& rng) {
    require(!f.is_zero(), "factorization of the zero polynomial");
    Factorization result;
    result.unit = f.lc();
    if (f.degree() == 0) return result;
    for (const auto& [mult, part] : squarefree_decomposition(f)) {
        for (const auto& [piece, d] : ddf(part)) {
            std::vector<Poly> irr;
            edf(piece, d, rng, irr);
            for (auto& g : irr) result.factors.emplace_back(std::move(g), mult);
        }
    }
    std::sort(result.factors.begin(), result.factors.end(),
              [](const auto& a, const auto& b) { return poly_less(a.first, b.first); });
    return result;
}

Poly Factorization::product(Field k) const {
    Poly r = Poly::constant(k, unit);
    for (const auto& [g, m] : factors)
        for (int i = 0; i < m; ++i) r = r * g;
    return r;
}

bool is_irreducible(const Poly& f) {
    if (f.degree() < 1) return false;
    const Field& k = f.field();
    const int n = f.degree();
    if (n == 1) return true;
    const Poly x = Poly::t(k);
    const Poly fm = f.monic();
    // x^(q^n) == x mod f, and gcd(x^(q^(n/l)) - x, f) = 1 for primes l | n
    Poly h = x % fm;
    for (int i = 0; i < n; ++i) h = pow_mod(h, k->q(), fm);
    if (!((h - x) % fm).is_zero()) return false;
    int m = n;
    for (int l = 2; l <= m; ++l) {
        if (m % l) continue;
        while (m % l == 0) m /= l;
        Poly s = x % fm;
        for (int i = 0; i < n / l; ++i) s = pow_mod(s, k->q(), fm);
        if (gcd(s - x, fm).degree() != 0) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// rational points and closed points
// ---------------------------------------------------------------------------

u64 rat_point_index(const Field& k, const RatPoint& x) {
    return x.inf ? k->q() : k->index_of(x.v);
}

RatPoint rat_point_at_index(const Field& k, u64 idx) {
    return idx == k->q() ? RatPoint::infinity() : RatPoint::at(k->element_at(idx));
}

std::vector<RatPoint> all_rat_points(const Field& k) {
    std::vector<RatPoint> r;
    for (u64 i = 0; i <= k->q(); ++i) r.push_back(rat_point_at_index(k, i));
    return r;
}

ClosedPoint ClosedPoint::infinity(Field k) {
    ClosedPoint p;
    p.inf_ = true;
    p.k_ = std::move(k);
    return p;
}

ClosedPoint ClosedPoint::finite_unchecked(Poly monic_irreducible) {
    ClosedPoint p;
    p.inf_ = false;
    p.k_ = monic_irreducible.field();
    p.min_ = std::move(monic_irreducible);
    return p;
}

ClosedPoint ClosedPoint::finite(Poly monic_irreducible) {
    require(monic_irreducible.degree() >= 1 && monic_irreducible.lc() == monic_irreducible.field()->one(),
            "closed point needs a monic polynomial of positive degree");
    require(is_irreducible(monic_irreducible), "closed point polynomial must be irreducible");
    return finite_unchecked(std::move(monic_irreducible));
}

ClosedPoint ClosedPoint::rational(Field k, const RatPoint& x) {
    if (x.inf) return infinity(std::move(k));
    std::vector<Element> c{k->neg(x.v), k->one()};
    return finite_unchecked(Poly(std::move(k), std::move(c)));
}

const Poly& ClosedPoint::minpoly() const {
    require(!inf_, "minpoly of the infinite place");
    return min_;
}

std::optional<RatPoint> ClosedPoint::as_rational() const {
    if (inf_) return RatPoint::infinity();
    if (min_.degree() != 1) return std::nullopt;
    return RatPoint::at(k_->neg(min_.coeff(0)));
}

bool ClosedPoint::operator==(const ClosedPoint& o) const {
    if (inf_ != o.inf_) return false;
    return inf_ || min_ == o.min_;
}

bool point_less(const ClosedPoint& a, const ClosedPoint& b) {
    if (a.is_infinite() != b.is_infinite()) return !a.is_infinite();  // infinity last
    if (a.is_infinite()) return false;
    return poly_less(a.minpoly(), b.minpoly());
}

// ---------------------------------------------------------------------------
// kappa(P) arithmetic
// ---------------------------------------------------------------------------

namespace {
const Poly& kappa_mod(const ClosedPoint& P) {
    require(!P.is_infinite(), "kappa arithmetic needs a finite point");
    return P.minpoly();
}
}  // namespace

Poly kappa_reduce(const ClosedPoint& P, const Poly& x) { return x % kappa_mod(P); }

Poly kappa_mul(const ClosedPoint& P, const Poly& x, const Poly& y) {
    return (x * y) % kappa_mod(P);
}

Poly kappa_inv(const ClosedPoint& P, const Poly& x) {
    Poly xr = kappa_reduce(P, x);
    require(!xr.is_zero(), "inversion of zero in a residue field");
    auto [g, s, t] = extended_gcd(xr, kappa_mod(P));
    require(g.is_one(), "kappa_inv: element not invertible");
    return kappa_reduce(P, s);
}

Poly kappa_pow(const ClosedPoint& P, const Poly& x, u64 e) {
    return pow_mod(x, e, kappa_mod(P));
}

Element kappa_norm(const ClosedPoint& P, const Poly& x) {
    const Field& k = x.field();
    const int d = P.degree();
    Poly u = kappa_reduce(P, x);
    Poly prod = u;
    for (int i = 1; i < d; ++i) {
        u = kappa_pow(P, u, k->q());
        prod = kappa_mul(P, prod, u);
    }
    require(prod.degree() <= 0, "norm did not land in the base field");
    return prod.coeff(0);
}

bool kappa_is_square(const ClosedPoint& P, const Poly& x) {
    const Field& k = x.field();
    Poly xr = kappa_reduce(P, x);
    if (xr.is_zero()) return true;
    // x^((q^d-1)/2) = N(x)^((q-1)/2)
    return k->is_square(kappa_norm(P, xr));
}

Poly kappa_canonical_nonsquare(const ClosedPoint& P) {
    const Field& k = kappa_mod(P).field();
    const int d = P.degree();
    // enumerate kappa(P) elements odometer-style over F_q^d
    for (u64 idx = 1;; ++idx) {
        u64 v = idx;
        std::vector<Element> c;
        for (int i = 0; i < d; ++i) {
            c.push_back(k->element_at(v % k->q()));
            v /= k->q();
        }
        require(v == 0, "no nonsquare in residue field");
        Poly x(k, std::move(c));
        if (!kappa_is_square(P, x)) return x;
    }
}

Poly kappa_min_poly(const ClosedPoint& P, const Poly& x) {
    const Field& k = kappa_mod(P).field();
    const int d = P.degree();
    Poly u = kappa_reduce(P, x);
    // rows: 1, u, u^2, ... as vectors over F_q; stop at first linear dependency
    std::vector<std::vector<Element>> pows;
    Poly cur = Poly::from_int(k, 1);
    for (int r = 0;; ++r) {
        std::vector<Element> row(d, k->zero());
        for (int i = 0; i <= cur.degree(); ++i) row[i] = cur.coeff(i);
        pows.push_back(row);
        // solve sum_{i<=r} c_i u^i = 0 with c_r = 1 by Gaussian elimination
        if (r >= 1) {
            // matrix columns = pows[0..r-1], rhs = -pows[r]
            std::vector<std::vector<Element>> m(d, std::vector<Element>(r + 1, k->zero()));
            for (int j = 0; j < r; ++j)
                for (int i = 0; i < d; ++i) m[i][j] = pows[j][i];
            for (int i = 0; i < d; ++i) m[i][r] = k->neg(pows[r][i]);
            // eliminate
            int rank = 0;
            std::vector<int> pivot_col(d, -1);
            for (int col = 0; col < r && rank < d; ++col) {
                int piv = -1;
                for (int i = rank; i < d; ++i)
                    if (!k->is_zero(m[i][col])) {
                        piv = i;
                        break;
                    }
                if (piv < 0) continue;
                std::swap(m[rank], m[piv]);
                Element li = k->inv(m[rank][col]);
                for (int j = col; j <= r; ++j) m[rank][j] = k->mul(m[rank][j], li);
                for (int i = 0; i < d; ++i) {
                    if (i == rank || k->is_zero(m[i][col])) continue;
                    Element f = m[i][col];
                    for (int j = col; j <= r; ++j)
                        m[i][j] = k->sub(m[i][j], k->mul(f, m[rank][j]));
                }
                pivot_col[rank] = col;
                ++rank;
            }
            bool consistent = true;
            for (int i = rank; i < d; ++i)
                if (!k->is_zero(m[i][r])) {
                    consistent = false;
                    break;
                }
            if (consistent) {
                std::vector<Element> coeffs(r + 1, k->zero());
                coeffs[r] = k->one();
                for (int i = 0; i < rank; ++i) coeffs[pivot_col[i]] = m[i][r];
                Poly mp(k, std::move(coeffs));
                // sanity: mp(u) = 0 in kappa(P)
                Poly acc = Poly::zero(k);
                Poly upow = Poly::from_int(k, 1);
                for (int i = 0; i <= mp.degree(); ++i) {
                    acc = kappa_reduce(P, acc + upow.scaled(mp.coeff(i)));
                    upow = kappa_mul(P, upow, u);
                }
                require(acc.is_zero(), "minimal polynomial check failed");
                return mp;
            }
        }
        cur = kappa_mul(P, cur, u);
        require(r <= d, "minimal polynomial search exceeded the residue degree");
    }
}

// ---------------------------------------------------------------------------
// rational maps
// ---------------------------------------------------------------------------

RationalMap::RationalMap(Poly num, Poly den) : num_(std::move(num)), den_(std::move(den)) {
    require_same_field(num_, den_);
    require(!den_.is_zero(), "rational map with zero denominator");
    require(!num_.is_zero(), "rational map with zero numerator is not dominant");
    Poly g = gcd(num_, den_);
    if (g.degree() > 0) {
        num_ = num_ / g;
        den_ = den_ / g;
    }
    const Field& k = num_.field();
    const Element u = k->inv(den_.lc());
    num_ = num_.scaled(u);
    den_ = den_.scaled(u);
    require(degree() >= 1, "rational map must be nonconstant");
}

RationalMap RationalMap::identity(Field k) {
    Poly num = Poly::t(k);
    Poly den = Poly::from_int(std::move(k), 1);
    return RationalMap(std::move(num), std::move(den));
}

RatPoint RationalMap::eval(const RatPoint& x) const {
    const Field& k = field();
    if (x.inf) {
        const int dn = num_.degree(), dd = den_.degree();
        if (dn > dd) return RatPoint::infinity();
        if (dn < dd) return RatPoint::at(k->zero());
        return RatPoint::at(k->mul(num_.lc(), k->inv(den_.lc())));
    }
    const Element nv = num_.eval(x.v), dv = den_.eval(x.v);
    if (k->is_zero(dv)) return RatPoint::infinity();
    return RatPoint::at(k->mul(nv, k->inv(dv)));
}

RationalMap compose(const RationalMap& outer, const RationalMap& inner) {
    require(outer.field()->same_as(*inner.field()), "mixed-field composition");
    const Field& k = outer.field();
    const int d = outer.degree();
    // homogenize outer to degree d and substitute (N, D) of inner
    std::vector<Poly> npow(d + 1, Poly::from_int(k, 1)), dpow(d + 1, Poly::from_int(k, 1));
    for (int i = 1; i <= d; ++i) {
        npow[i] = npow[i - 1] * inner.num();
        dpow[i] = dpow[i - 1] * inner.den();
    }
    Poly rn = Poly::zero(k), rd = Poly::zero(k);
    for (int i = 0; i <= d; ++i) {
        const Poly term = npow[i] * dpow[d - i];
        rn = rn + term.scaled(outer.num().coeff(i));
        rd = rd + term.scaled(outer.den().coeff(i));
    }
    RationalMap r(std::move(rn), std::move(rd));
    require(r.degree() == outer.degree() * inner.degree(), "composition degree mismatch");
    return r;
}

// ---------------------------------------------------------------------------
// Mobius
// ---------------------------------------------------------------------------

Mobius::Mobius(Field k, Element a, Element b, Element c, Element d)
    : k_(std::move(k)), a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), d_(std::move(d)) {
    const Element det = k_->sub(k_->mul(a_, d_), k_->mul(b_, c_));
    require(!k_->is_zero(det), "Mobius matrix must be invertible");
}

Mobius Mobius::identity(Field k) {
    Element one = k->one(), zero = k->zero();
    return Mobius(std::move(k), one, zero, zero, one);
}

namespace {
// Mobius sending (z1, z2, z3) to (0, 1, infinity)
Mobius to_standard(const Field& k, const std::array<RatPoint, 3>& z) {
    const auto& [z1, z2, z3] = z;
    if (z1.inf)  // (z2 - z3)/(z - z3)
        return Mobius(k, k->zero(), k->sub(z2.v, z3.v), k->one(), k->neg(z3.v));
    if (z2.inf)  // (z - z1)/(z - z3)
        return Mobius(k, k->one(), k->neg(z1.v), k->one(), k->neg(z3.v));
    if (z3.inf)  // (z - z1)/(z2 - z1)
        return Mobius(k, k->one(), k->neg(z1.v), k->zero(), k->sub(z2.v, z1.v));
    const Element m = k->sub(z2.v, z3.v), n = k->sub(z2.v, z1.v);
    return Mobius(k, m, k->neg(k->mul(z1.v, m)), n, k->neg(k->mul(z3.v, n)));
}
}  // namespace

Mobius Mobius::from_points(const Field& k, const std::array<RatPoint, 3>& src,
                           const std::array<RatPoint, 3>& dst) {
    require(src[0] != src[1] && src[0] != src[2] && src[1] != src[2], "repeated source points");
    require(dst[0] != dst[1] && dst[0] != dst[2] && dst[1] != dst[2], "repeated target points");
    Mobius m = to_standard(k, dst).inverse().after(to_standard(k, src));
    for (int i = 0; i < 3; ++i)
        require(m.apply(src[i]) == dst[i], "three-point interpolation failed");
    return m;
}

RatPoint Mobius::apply(const RatPoint& x) const {
    if (x.inf) {
        if (k_->is_zero(c_)) return RatPoint::infinity();
        return RatPoint::at(k_->mul(a_, k_->inv(c_)));
    }
    const Element den = k_->add(k_->mul(c_, x.v), d_);
    if (k_->is_zero(den)) return RatPoint::infinity();
    const Element num = k_->add(k_->mul(a_, x.v), b_);
    return RatPoint::at(k_->mul(num, k_->inv(den)));
}

Mobius Mobius::inverse() const { return Mobius(k_, d_, k_->neg(b_), k_->neg(c_), a_); }

Mobius Mobius::after(const Mobius& f) const {
    return Mobius(k_, k_->add(k_->mul(a_, f.a_), k_->mul(b_, f.c_)),
                  k_->add(k_->mul(a_, f.b_), k_->mul(b_, f.d_)),
                  k_->add(k_->mul(c_, f.a_), k_->mul(d_, f.c_)),
                  k_->add(k_->mul(c_, f.b_), k_->mul(d_, f.d_)));
}

RationalMap Mobius::to_map() const {
    Poly num(k_, {b_, a_});
    Poly den(k_, {d_, c_});
    return RationalMap(std::move(num), std::move(den));
}

// ---------------------------------------------------------------------------
// valuations, fibres, images
// ---------------------------------------------------------------------------

int valuation(const Poly& f, const ClosedPoint& P) {
    require(!f.is_zero(), "valuation of zero");
    if (P.is_infinite()) return -f.degree();
    int v = 0;
    Poly g = f;
    for (;;) {
        auto [q, r] = divmod(g, P.minpoly());
        if (!r.is_zero()) return v;
        ++v;
        g = std::move(q);
    }
}

int valuation(const RationalMap& f, const ClosedPoint& P) {
    return valuation(f.num(), P) - valuation(f.den(), P);
}

std::vector<FibrePoint> fibre(const RationalMap& phi, const ClosedPoint& s, Rng& rng) {
    const Field& k = phi.field();
    require(k->same_as(*s.field()), "fibre: mixed fields");
    const int dphi = phi.degree();
    std::vector<FibrePoint> out;
    Poly H = Poly::zero(k);
    int d = 1;
    if (s.is_infinite()) {
        // phi(t) = infinity when den(t) = 0, plus t = infinity if deg den < deg phi
        H = phi.den();
    } else {
        d = s.degree();
        const Poly& ps = s.minpoly();
        std::vector<Poly> npow(d + 1, Poly::from_int(k, 1)), dpow(d + 1, Poly::from_int(k, 1));
        for (int i = 1; i <= d; ++i) {
            npow[i] = npow[i - 1] * phi.num();
            dpow[i] = dpow[i - 1] * phi.den();
        }
        for (int i = 0; i <= d; ++i) H = H + (npow[i] * dpow[d - i]).scaled(ps.coeff(i));
    }
    if (H.degree() > 0) {
        for (const auto& [g, m] : factor(H, rng).factors) {
            require(g.degree() % d == 0, "residue degree divisibility failed");
            out.push_back(FibrePoint{ClosedPoint::finite_unchecked(g), m, g.degree() / d});
        }
    }
    const int defect = d * dphi - std::max(H.degree(), 0);
    if (defect > 0) {
        require(d == 1, "only rational base points can have infinity in the fibre");
        out.push_back(FibrePoint{ClosedPoint::infinity(k), defect, 1});
    }
    int total = 0;
    for (const auto& fp : out) total += fp.e * fp.f;
    require(total == dphi, "fibre degree sum mismatch");
    std::sort(out.begin(), out.end(),
              [](const FibrePoint& a, const FibrePoint& b) { return point_less(a.t, b.t); });
    return out;
}

ClosedPoint image_of_point(const RationalMap& phi, const ClosedPoint& P) {
    const Field& k = phi.field();
    if (P.is_infinite()) {
        const int dn = phi.num().degree(), dd = phi.den().degree();
        if (dn > dd) return ClosedPoint::infinity(k);
        if (dn < dd) return ClosedPoint::rational(k, RatPoint::at(k->zero()));
        return ClosedPoint::rational(
            k, RatPoint::at(k->mul(phi.num().lc(), k->inv(phi.den().lc()))));
    }
    if (valuation(phi.den(), P) > 0) return ClosedPoint::infinity(k);
    const Poly u =
        kappa_mul(P, kappa_reduce(P, phi.num()), kappa_inv(P, kappa_reduce(P, phi.den())));
    return ClosedPoint::finite_unchecked(kappa_min_poly(P, u));
}

ClosedPoint first_point_of_degree(const Field& k, int degree) {
    require(degree >= 1, "point degree must be positive");
    if (degree == 1) return ClosedPoint::rational(k, RatPoint::at(k->zero()));
    // scan monic polynomials of the given degree in canonical order
    u64 total = 1;
    for (int i = 0; i < degree; ++i) total *= k->q();
    for (u64 idx = 0; idx < total; ++idx) {
        u64 v = idx;
        std::vector<Element> c;
        for (int i = 0; i < degree; ++i) {
            c.push_back(k->element_at(v % k->q()));
            v /= k->q();
        }
        c.push_back(k->one());
        Poly f(k, std::move(c));
        if (is_irreducible(f)) return ClosedPoint::finite_unchecked(f);
    }
    throw Error("no irreducible polynomial of the requested degree");
}

}  // namespace conicover::p1
