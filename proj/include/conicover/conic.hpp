#pragma once

#include "conicover/p1.hpp"

namespace conicover::conic {

using gf::Element;
using gf::Field;
using p1::ClosedPoint;
using p1::Poly;
using p1::RationalMap;

/// Diagonal model a(t) x^2 + b(t) y^2 + c(t) z^2 of a conic bundle over P^1.
struct ConicBundle {
    Field k;
    Poly a, b, c;

    ConicBundle(Field field, Poly pa, Poly pb, Poly pc);
};

/// Local normal form a' x^2 + b' y^2 - z^2 at a place, with v(a') in {0,1} and
/// v(b') = 0. Units are recorded as residue-field elements (polys of degree
/// < deg P; at the infinite place the computation runs in the u = 1/t chart).
struct LocalForm {
    int v_a = 0;
    Poly a_unit;
    Poly b_unit;
};

/// Element of kappa(P)^x / squares: the residue r_P of the generic fibre.
/// The representative is canonical: 1 when trivial, else the first nonsquare
/// of kappa(P) in enumeration order.
struct ResidueClass {
    ClosedPoint point;
    Poly representative;
    bool trivial = true;
};

struct NonSplitLocus {
    std::vector<ResidueClass> points;  // nontrivial residues, canonical order
    int delta = 0;                     // total degree
};

struct SplittingField {
    int degree = 1;    // 1 or 2
    Poly witness;      // 1, or the residue representative
};

ConicBundle infinity_chart(const ConicBundle& X);  // u^(2*ceil(deg/2)) * e(1/u) per coefficient

LocalForm normalize_at(const ConicBundle& X, const ClosedPoint& P);
ResidueClass residue_at(const ConicBundle& X, const ClosedPoint& P);
// independent cross-check: tame symbol of the quaternion pair (-a/c, -b/c)
ResidueClass residue_tame_oracle(const ConicBundle& X, const ClosedPoint& P);
// definition-level splitness of the fibre of a regular model at P
bool fibre_split_direct(const ConicBundle& X, const ClosedPoint& P);
SplittingField minimal_splitting_field(const ConicBundle& X, const ClosedPoint& P);

NonSplitLocus nonsplit_locus(const ConicBundle& X, Rng& rng);

// hypothesis (star): degrees of B are all 1 except at most one d1 <= 2 and one odd d2
bool condition_star(const NonSplitLocus& B);
// hypothesis (star star): all 1 except at most one d with d = 2 or d odd
bool condition_star_star(const NonSplitLocus& B);

// base change along phi; square-class preserving clearing and stripping
ConicBundle pullback_bundle(const ConicBundle& X, const RationalMap& phi);
ConicBundle pullback_bundle_raw(const ConicBundle& X, const RationalMap& phi);

}  // namespace conicover::conic
