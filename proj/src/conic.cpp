#include "conicover/conic.hpp"

#include <algorithm>

namespace conicover::conic {

using p1::kappa_canonical_nonsquare;
using p1::kappa_inv;
using p1::kappa_is_square;
using p1::kappa_mul;
using p1::kappa_reduce;
using p1::valuation;

ConicBundle::ConicBundle(Field field, Poly pa, Poly pb, Poly pc)
    : k(std::move(field)), a(std::move(pa)), b(std::move(pb)), c(std::move(pc)) {
    require(!a.is_zero() && !b.is_zero() && !c.is_zero(),
            "conic bundle coefficients must be nonzero");
    require(k->same_as(*a.field()) && k->same_as(*b.field()) && k->same_as(*c.field()),
            "conic bundle coefficients over mixed fields");
}

ConicBundle infinity_chart(const ConicBundle& X) {
    auto swap_coeff = [&](const Poly& e) {
        Poly r = e.reversed();
        if (e.degree() % 2 == 1) r = r * Poly::t(X.k);
        return r;
    };
    return ConicBundle(X.k, swap_coeff(X.a), swap_coeff(X.b), swap_coeff(X.c));
}

namespace {

struct ValuedCoeff {
    int v = 0;     // valuation at P
    Poly unit;     // unit part mod P, an element of kappa(P)
};

ValuedCoeff split_at(const Poly& f, const ClosedPoint& P) {
    ValuedCoeff r;
    Poly g = f;
    for (;;) {
        auto [q, rem] = p1::divmod(g, P.minpoly());
        if (!rem.is_zero()) break;
        ++r.v;
        g = std::move(q);
    }
    r.unit = kappa_reduce(P, g);
    return r;
}

Poly canonical_representative(const ClosedPoint& P, bool trivial) {
    const Field& k = P.field();
    if (trivial) return Poly::from_int(k, 1);
    if (P.is_infinite()) {
        // kappa(infinity) = F_q
        return Poly::constant(k, k->nonsquare_witness());
    }
    return kappa_canonical_nonsquare(P);
}

}  // namespace

LocalForm normalize_at(const ConicBundle& X, const ClosedPoint& P) {
    if (P.is_infinite()) {
        ClosedPoint u_place = ClosedPoint::finite_unchecked(Poly::t(X.k));
        return normalize_at(infinity_chart(X), u_place);
    }
    ValuedCoeff va = split_at(X.a, P), vb = split_at(X.b, P), vc = split_at(X.c, P);
    // reduce valuations mod 2 (divisions by even uniformizer powers preserve classes)
    const int pa = va.v & 1, pb = vb.v & 1, pc = vc.v & 1;
    // rearrange so the two slots of equal parity sit in the (y, z) positions
    ValuedCoeff A = va, B = vb, C = vc;
    int qa = pa, qb = pb;
    if (pb == pc) {
        // keep
    } else if (pa == pc) {
        std::swap(A, B);
        qa = pb;
        qb = pa;
    } else {  // pa == pb
        std::swap(A, C);
        qa = pc;
        qb = pb;
    }
    LocalForm out;
    out.v_a = qa ^ qb;
    const Poly ci = kappa_inv(P, C.unit);
    out.a_unit = kappa_reduce(P, -kappa_mul(P, A.unit, ci));
    out.b_unit = kappa_reduce(P, -kappa_mul(P, B.unit, ci));
    return out;
}

ResidueClass residue_at(const ConicBundle& X, const ClosedPoint& P) {
    LocalForm f = normalize_at(X, P);
    ResidueClass r;
    r.point = P;
    if (f.v_a == 0) {
        r.trivial = true;
    } else {
        ClosedPoint eff = P.is_infinite() ? ClosedPoint::finite_unchecked(Poly::t(X.k)) : P;
        r.trivial = kappa_is_square(eff, f.b_unit);
    }
    r.representative = canonical_representative(P, r.trivial);
    return r;
}

ResidueClass residue_tame_oracle(const ConicBundle& X, const ClosedPoint& P) {
    if (P.is_infinite()) {
        ClosedPoint u_place = ClosedPoint::finite_unchecked(Poly::t(X.k));
        ResidueClass r = residue_tame_oracle(infinity_chart(X), u_place);
        r.point = P;
        return r;
    }
    ValuedCoeff va = split_at(X.a, P), vb = split_at(X.b, P), vc = split_at(X.c, P);
    // quaternion pair (x, y) = (-a/c, -b/c)
    const int vx = va.v - vc.v, vy = vb.v - vc.v;
    const Poly ci = kappa_inv(P, vc.unit);
    const Poly x0 = kappa_reduce(P, -kappa_mul(P, va.unit, ci));
    const Poly y0 = kappa_reduce(P, -kappa_mul(P, vb.unit, ci));
    // tame symbol (-1)^(vx*vy) x^vy y^(-vx) evaluated through unit parts
    auto upow = [&](const Poly& u, int e) {
        return e >= 0 ? p1::kappa_pow(P, u, static_cast<u64>(e))
                      : kappa_inv(P, p1::kappa_pow(P, u, static_cast<u64>(-e)));
    };
    Poly sym = kappa_mul(P, upow(x0, vy), upow(y0, -vx));
    if ((vx % 2 != 0) && (vy % 2 != 0)) sym = kappa_reduce(P, -sym);
    ResidueClass r;
    r.point = P;
    r.trivial = kappa_is_square(P, sym);
    r.representative = canonical_representative(P, r.trivial);
    return r;
}

bool fibre_split_direct(const ConicBundle& X, const ClosedPoint& P) {
    LocalForm f = normalize_at(X, P);
    if (f.v_a == 0) return true;
    ClosedPoint eff = P.is_infinite() ? ClosedPoint::finite_unchecked(Poly::t(X.k)) : P;
    return kappa_is_square(eff, f.b_unit);
}

SplittingField minimal_splitting_field(const ConicBundle& X, const ClosedPoint& P) {
    ResidueClass r = residue_at(X, P);
    SplittingField s;
    if (r.trivial) {
        s.degree = 1;
        s.witness = Poly::from_int(X.k, 1);
    } else {
        s.degree = 2;
        s.witness = r.representative;
    }
    return s;
}

NonSplitLocus nonsplit_locus(const ConicBundle& X, Rng& rng) {
    std::vector<ClosedPoint> candidates;
    auto add_factors = [&](const Poly& f) {
        if (f.degree() <= 0) return;
        for (const auto& [g, m] : p1::factor(f, rng).factors)
            candidates.push_back(ClosedPoint::finite_unchecked(g));
    };
    add_factors(X.a);
    add_factors(X.b);
    add_factors(X.c);
    candidates.push_back(ClosedPoint::infinity(X.k));
    std::sort(candidates.begin(), candidates.end(), p1::point_less);
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    NonSplitLocus B;
    for (const auto& P : candidates) {
        ResidueClass r = residue_at(X, P);
        if (!r.trivial) {
            B.delta += P.degree();
            B.points.push_back(std::move(r));
        }
    }
    require(B.points.size() % 2 == 0, "reciprocity violated: odd non-split locus");
    return B;
}

namespace {
// degrees > 1, the rational members being unconstrained in both hypotheses
std::vector<int> big_degrees(const NonSplitLocus& B) {
    std::vector<int> d;
    for (const auto& r : B.points)
        if (r.point.degree() > 1) d.push_back(r.point.degree());
    std::sort(d.begin(), d.end());
    return d;
}
}  // namespace

bool condition_star(const NonSplitLocus& B) {
    const std::vector<int> d = big_degrees(B);
    if (d.empty()) return true;
    if (d.size() == 1) return d[0] == 2 || d[0] % 2 == 1;
    if (d.size() == 2) {
        // one point of degree at most 2, one of odd degree
        return (d[0] == 2 && d[1] % 2 == 1) || (d[1] == 2 && d[0] % 2 == 1);
    }
    return false;
}

bool condition_star_star(const NonSplitLocus& B) {
    const std::vector<int> d = big_degrees(B);
    if (d.empty()) return true;
    return d.size() == 1 && (d[0] == 2 || d[0] % 2 == 1);
}

namespace {
Poly pullback_coeff(const Poly& e, const RationalMap& phi) {
    const Field& k = e.field();
    const int de = e.degree();
    if (de <= 0) return e;
    std::vector<Poly> npow(de + 1, Poly::from_int(k, 1)), dpow(de + 1, Poly::from_int(k, 1));
    for (int i = 1; i <= de; ++i) {
        npow[i] = npow[i - 1] * phi.num();
        dpow[i] = dpow[i - 1] * phi.den();
    }
    Poly H = Poly::zero(k);
    for (int i = 0; i <= de; ++i) H = H + (npow[i] * dpow[de - i]).scaled(e.coeff(i));
    // clear the denominator by an even power of D
    if (de % 2 == 1) H = H * phi.den();
    require(!H.is_zero(), "pullback coefficient vanished");
    return H;
}
}  // namespace

ConicBundle pullback_bundle_raw(const ConicBundle& X, const RationalMap& phi) {
    require(X.k->same_as(*phi.field()), "pullback over mixed fields");
    return ConicBundle(X.k, pullback_coeff(X.a, phi), pullback_coeff(X.b, phi),
                       pullback_coeff(X.c, phi));
}

ConicBundle pullback_bundle(const ConicBundle& X, const RationalMap& phi) {
    ConicBundle raw = pullback_bundle_raw(X, phi);
    return ConicBundle(X.k, p1::odd_multiplicity_part(raw.a), p1::odd_multiplicity_part(raw.b),
                       p1::odd_multiplicity_part(raw.c));
}

}  // namespace conicover::conic
