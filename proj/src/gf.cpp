#include "conicover/gf.hpp"

#include <algorithm>

namespace conicover::gf {

i64 mod_pos(i64 a, i64 m) {
    i64 r = a % m;
    return r < 0 ? r + m : r;
}

i64 mul_mod(i64 a, i64 b, i64 m) {
    return static_cast<i64>(static_cast<__int128>(a) * b % m);
}

i64 pow_mod_i64(i64 a, u64 e, i64 m) {
    i64 r = 1 % m;
    a = mod_pos(a, m);
    while (e) {
        if (e & 1) r = mul_mod(r, a, m);
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    return r;
}

bool is_prime_i64(i64 n) {
    if (n < 2) return false;
    for (i64 d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

namespace {

// ---- F_p[x] helpers for validating and reducing `ext` moduli ----

using PV = std::vector<i64>;  // little-endian, over F_p

void pv_trim(PV& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

PV pv_mul(const PV& a, const PV& b, i64 p) {
    if (a.empty() || b.empty()) return {};
    PV r(a.size() + b.size() - 1, 0);
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (size_t j = 0; j < b.size(); ++j)
            r[i + j] = mod_pos(r[i + j] + mul_mod(a[i], b[j], p), p);
    }
    pv_trim(r);
    return r;
}

// remainder of a by monic b
PV pv_rem(PV a, const PV& b, i64 p) {
    pv_trim(a);
    const int db = static_cast<int>(b.size()) - 1;
    while (static_cast<int>(a.size()) - 1 >= db) {
        const i64 lead = a.back();
        const size_t shift = a.size() - 1 - db;
        for (int i = 0; i <= db; ++i)
            a[shift + i] = mod_pos(a[shift + i] - mul_mod(lead, b[i], p), p);
        pv_trim(a);
        if (a.empty()) break;
    }
    return a;
}

PV pv_mulmod(const PV& a, const PV& b, const PV& mod, i64 p) {
    return pv_rem(pv_mul(a, b, p), mod, p);
}

PV pv_powmod(PV a, u64 e, const PV& mod, i64 p) {
    PV r{1};
    a = pv_rem(std::move(a), mod, p);
    while (e) {
        if (e & 1) r = pv_mulmod(r, a, mod, p);
        a = pv_mulmod(a, a, mod, p);
        e >>= 1;
    }
    return r;
}

PV pv_gcd(PV a, PV b, i64 p) {
    pv_trim(a);
    pv_trim(b);
    while (!b.empty()) {
        // make b monic before using it as a divisor
        PV bm = b;
        i64 li = pow_mod_i64(bm.back(), static_cast<u64>(p - 2), p);
        for (auto& c : bm) c = mul_mod(c, li, p);
        PV r = pv_rem(a, bm, p);
        a = std::move(b);
        b = std::move(r);
    }
    return a;
}

// Rabin irreducibility over F_p for a monic modulus of degree n.
bool pv_irreducible(const PV& f, i64 p) {
    const int n = static_cast<int>(f.size()) - 1;
    if (n < 1) return false;
    // x^(p^n) == x mod f
    PV x{0, 1};
    PV t = x;
    for (int i = 0; i < n; ++i) t = pv_powmod(t, static_cast<u64>(p), f, p);
    PV diff = t;
    diff.resize(std::max<size_t>(diff.size(), 2), 0);
    diff[1] = mod_pos(diff[1] - 1, p);
    pv_trim(diff);
    if (!diff.empty()) return false;
    // gcd(x^(p^(n/l)) - x, f) = 1 for each prime l | n
    int m = n;
    for (int l = 2; l <= m; ++l) {
        if (m % l) continue;
        while (m % l == 0) m /= l;
        PV s = x;
        for (int i = 0; i < n / l; ++i) s = pv_powmod(s, static_cast<u64>(p), f, p);
        PV d = s;
        d.resize(std::max<size_t>(d.size(), 2), 0);
        d[1] = mod_pos(d[1] - 1, p);
        pv_trim(d);
        PV g = pv_gcd(f, d, p);
        if (static_cast<int>(g.size()) - 1 != 0) return false;
    }
    return true;
}

u64 checked_pow_u64(i64 p, int n) {
    u64 q = 1;
    for (int i = 0; i < n; ++i) {
        require(q <= (u64(1) << 62) / static_cast<u64>(p), "field size p^n exceeds 2^62");
        q *= static_cast<u64>(p);
    }
    return q;
}

}  // namespace

// ---------------------------------------------------------------------------
// FieldSpec construction
// ---------------------------------------------------------------------------

std::shared_ptr<const FieldSpec> FieldSpec::make_prime(i64 p) {
    require(is_prime_i64(p), "p must be prime");
    require(p != 2, "characteristic 2 is out of scope");
    auto f = std::shared_ptr<FieldSpec>(new FieldSpec());
    f->kind_ = Kind::prime;
    f->p_ = p;
    f->n_ = 1;
    f->q_ = static_cast<u64>(p);
    f->init_witness();
    return f;
}

std::shared_ptr<const FieldSpec> FieldSpec::make_ext(i64 p, std::vector<i64> modulus) {
    require(is_prime_i64(p), "p must be prime");
    require(p != 2, "characteristic 2 is out of scope");
    for (auto& c : modulus) c = mod_pos(c, p);
    pv_trim(modulus);
    const int n = static_cast<int>(modulus.size()) - 1;
    require(n >= 2, "extension modulus must have degree >= 2");
    require(modulus.back() == 1, "extension modulus must be monic");
    require(pv_irreducible(modulus, p), "extension modulus must be irreducible over F_p");
    auto f = std::shared_ptr<FieldSpec>(new FieldSpec());
    f->kind_ = Kind::ext;
    f->p_ = p;
    f->n_ = n;
    f->q_ = checked_pow_u64(p, n);
    f->modulus_ = std::move(modulus);
    f->init_witness();
    return f;
}

std::shared_ptr<const FieldSpec> FieldSpec::make_quad(std::shared_ptr<const FieldSpec> base) {
    require(base != nullptr, "quad extension needs a base field");
    require(base->kind() != Kind::quad, "iterated quad extensions are out of scope");
    auto f = std::shared_ptr<FieldSpec>(new FieldSpec());
    f->kind_ = Kind::quad;
    f->p_ = base->p();
    f->n_ = 2 * base->n();
    require(base->q() <= (u64(1) << 31), "quad extension base too large");
    f->q_ = base->q() * base->q();
    f->base_ = base;
    f->quad_alpha_ = base->nonsquare_witness();
    f->init_witness();
    return f;
}

void FieldSpec::init_witness() {
    // scan in canonical enumeration order for x with x^((q-1)/2) = -1
    const u64 e = (q_ - 1) / 2;
    const Element minus_one = neg(one());
    for (u64 i = 1; i < q_; ++i) {
        Element x = element_at(i);
        if (pow(x, e) == minus_one) {
            witness_ = x;
            return;
        }
    }
    throw Error("no nonsquare found (q must be odd)");
}

bool FieldSpec::same_as(const FieldSpec& o) const {
    if (this == &o) return true;
    if (kind_ != o.kind_ || p_ != o.p_ || n_ != o.n_) return false;
    if (kind_ == Kind::ext) return modulus_ == o.modulus_;
    if (kind_ == Kind::quad) return base_->same_as(*o.base_) && quad_alpha_ == o.quad_alpha_;
    return true;
}

// ---------------------------------------------------------------------------
// elements
// ---------------------------------------------------------------------------

Element FieldSpec::zero() const { return Element{std::vector<i64>(n_, 0)}; }

Element FieldSpec::one() const {
    Element e = zero();
    e.c[0] = 1;
    return e;
}

Element FieldSpec::from_int(i64 v) const {
    Element e = zero();
    e.c[0] = mod_pos(v, p_);
    return e;
}

Element FieldSpec::element_at(u64 index) const {
    Element e = zero();
    for (int i = 0; i < n_ && index; ++i) {
        e.c[i] = static_cast<i64>(index % static_cast<u64>(p_));
        index /= static_cast<u64>(p_);
    }
    require(index == 0, "element index out of range");
    return e;
}

u64 FieldSpec::index_of(const Element& a) const {
    u64 idx = 0;
    for (int i = n_ - 1; i >= 0; --i) idx = idx * static_cast<u64>(p_) + static_cast<u64>(a.c[i]);
    return idx;
}

bool FieldSpec::is_zero(const Element& a) const {
    return std::all_of(a.c.begin(), a.c.end(), [](i64 x) { return x == 0; });
}

void FieldSpec::check(const Element& a) const {
    require(static_cast<int>(a.c.size()) == n_, "element has wrong coefficient count for this field");
    for (i64 x : a.c) require(0 <= x && x < p_, "element coefficient out of range");
}

// ---------------------------------------------------------------------------
// arithmetic
// ---------------------------------------------------------------------------

namespace {
inline void check_size(const Element& a, int n) {
    require(static_cast<int>(a.c.size()) == n, "element belongs to a different field");
}
}  // namespace

Element FieldSpec::add(const Element& a, const Element& b) const {
    check_size(a, n_);
    check_size(b, n_);
    Element r = zero();
    for (int i = 0; i < n_; ++i) r.c[i] = mod_pos(a.c[i] + b.c[i], p_);
    return r;
}

Element FieldSpec::sub(const Element& a, const Element& b) const {
    check_size(a, n_);
    check_size(b, n_);
    Element r = zero();
    for (int i = 0; i < n_; ++i) r.c[i] = mod_pos(a.c[i] - b.c[i], p_);
    return r;
}

Element FieldSpec::neg(const Element& a) const {
    check_size(a, n_);
    Element r = zero();
    for (int i = 0; i < n_; ++i) r.c[i] = mod_pos(-a.c[i], p_);
    return r;
}

Element FieldSpec::mul(const Element& a, const Element& b) const {
    check_size(a, n_);
    check_size(b, n_);
    switch (kind_) {
        case Kind::prime: {
            Element r = zero();
            r.c[0] = mul_mod(a.c[0], b.c[0], p_);
            return r;
        }
        case Kind::ext: {
            PV r = pv_mulmod(a.c, b.c, modulus_, p_);
            r.resize(n_, 0);
            return Element{std::move(r)};
        }
        case Kind::quad: {
            // (x0 + x1 w)(y0 + y1 w) = (x0 y0 + alpha x1 y1) + (x0 y1 + x1 y0) w
            const int m = base_->n();
            auto half = [&](const Element& e, int hi) {
                Element h = base_->zero();
                std::copy(e.c.begin() + hi * m, e.c.begin() + (hi + 1) * m, h.c.begin());
                return h;
            };
            Element x0 = half(a, 0), x1 = half(a, 1), y0 = half(b, 0), y1 = half(b, 1);
            Element lo = base_->add(base_->mul(x0, y0), base_->mul(quad_alpha_, base_->mul(x1, y1)));
            Element hi = base_->add(base_->mul(x0, y1), base_->mul(x1, y0));
            Element r = zero();
            std::copy(lo.c.begin(), lo.c.end(), r.c.begin());
            std::copy(hi.c.begin(), hi.c.end(), r.c.begin() + m);
            return r;
        }
    }
    throw Error("unreachable");
}

Element FieldSpec::pow(const Element& a, u64 e) const {
    Element r = one();
    Element x = a;
    while (e) {
        if (e & 1) r = mul(r, x);
        x = mul(x, x);
        e >>= 1;
    }
    return r;
}

Element FieldSpec::inv(const Element& a) const {
    require(!is_zero(a), "inversion of zero");
    Element r = pow(a, q_ - 2);
    require(mul(r, a) == one(), "inverse post-check failed");
    return r;
}

Element FieldSpec::frobenius(const Element& a, int k) const {
    Element r = a;
    for (int i = 0; i < k; ++i) r = pow(r, static_cast<u64>(p_));
    return r;
}

// ---------------------------------------------------------------------------
// quadratic structure
// ---------------------------------------------------------------------------

bool FieldSpec::is_square(const Element& a) const {
    if (is_zero(a)) return true;
    return pow(a, (q_ - 1) / 2) == one();
}

Element FieldSpec::sqrt(const Element& a) const {
    require(is_square(a), "sqrt of a nonsquare");
    if (is_zero(a)) return zero();
    if (q_ <= (u64(1) << 16)) {
        // exhaustive: collect both roots, return the lexicographically smallest list
        Element best = zero();
        bool found = false;
        for (u64 i = 1; i < q_; ++i) {
            Element y = element_at(i);
            if (mul(y, y) == a && (!found || y < best)) {
                best = y;
                found = true;
            }
        }
        require(found, "sqrt: exhaustive search failed");
        return best;
    }
    // Tonelli-Shanks
    u64 s = q_ - 1;
    int r = 0;
    while ((s & 1) == 0) {
        s >>= 1;
        ++r;
    }
    Element z = witness_;  // nonsquare
    Element c = pow(z, s);
    Element x = pow(a, (s + 1) / 2);
    Element t = pow(a, s);
    int m = r;
    while (!(t == one())) {
        Element tt = t;
        int i = 0;
        while (!(tt == one())) {
            tt = mul(tt, tt);
            ++i;
        }
        Element b = c;
        for (int j = 0; j < m - i - 1; ++j) b = mul(b, b);
        x = mul(x, b);
        c = mul(b, b);
        t = mul(t, c);
        m = i;
    }
    require(mul(x, x) == a, "sqrt post-check failed");
    Element other = neg(x);
    return other < x ? other : x;
}

// ---------------------------------------------------------------------------
// quad-only helpers
// ---------------------------------------------------------------------------

Element FieldSpec::embed_base(const Element& a) const {
    require(kind_ == Kind::quad, "embed_base on a non-quad field");
    base_->check(a);
    Element r = zero();
    std::copy(a.c.begin(), a.c.end(), r.c.begin());
    return r;
}

bool FieldSpec::in_base(const Element& a) const {
    require(kind_ == Kind::quad, "in_base on a non-quad field");
    const int m = base_->n();
    return std::all_of(a.c.begin() + m, a.c.end(), [](i64 x) { return x == 0; });
}

Element FieldSpec::project_base(const Element& a) const {
    require(in_base(a), "element does not lie in the base field");
    Element r = base_->zero();
    std::copy(a.c.begin(), a.c.begin() + base_->n(), r.c.begin());
    return r;
}

Element FieldSpec::frobenius_q(const Element& a) const {
    require(kind_ == Kind::quad, "frobenius_q on a non-quad field");
    // (x0 + x1 w)^q = x0 - x1 w since w^q = -w and the base is fixed
    const int m = base_->n();
    Element r = a;
    for (int i = m; i < n_; ++i) r.c[i] = mod_pos(-r.c[i], p_);
    return r;
}

Element FieldSpec::norm_to_base(const Element& a) const {
    Element prod = mul(a, frobenius_q(a));
    return project_base(prod);
}

// ---------------------------------------------------------------------------
// QuadExt
// ---------------------------------------------------------------------------

QuadExt::QuadExt(Field base_field) : base(std::move(base_field)), ext(FieldSpec::make_quad(base)) {}

Element QuadExt::sqrt_alpha() const {
    // w itself: (0, 1) in the pair representation
    Element w = ext->zero();
    w.c[base->n()] = 1;
    return w;
}

Element solve_norm_equation(const QuadExt& E, const Element& v) {
    const auto& k = *E.base;
    require(!k.is_zero(v), "norm equation needs v != 0");
    Element u;
    if (E.ext->q() <= (u64(1) << 16)) {
        bool found = false;
        for (u64 i = 1; i < E.ext->q() && !found; ++i) {
            Element cand = E.ext->element_at(i);
            if (E.norm(cand) == v) {
                u = cand;
                found = true;
            }
        }
        require(found, "norm equation: exhaustive search failed");
    } else {
        // v = alpha^eps * s^2; N(x + y w) = x^2 - alpha y^2, so for eps = 1 scan
        // y = 0,1,2,... until alpha(1 + y^2) is a square, giving N(x + y w) = alpha.
        const Element alpha = k.nonsquare_witness();
        if (k.is_square(v)) {
            u = E.embed(k.sqrt(v));  // N(s) = s^2
        } else {
            Element s = k.sqrt(k.mul(v, k.inv(alpha)));
            bool found = false;
            for (u64 yi = 0; yi < k.q() && !found; ++yi) {
                Element y = k.element_at(yi);
                Element rhs = k.mul(alpha, k.add(k.one(), k.mul(y, y)));
                if (k.is_square(rhs)) {
                    Element x = k.sqrt(rhs);
                    Element cand = E.ext->add(E.embed(x), E.ext->mul(E.embed(y), E.sqrt_alpha()));
                    u = E.ext->mul(cand, E.embed(s));
                    found = true;
                }
            }
            require(found, "norm equation: conic scan failed");
        }
    }
    require(E.norm(u) == v, "norm equation post-check failed");
    return u;
}

}  // namespace conicover::gf
