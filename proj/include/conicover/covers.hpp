#pragma once

#include <string>

#include "conicover/conic.hpp"

namespace conicover::covers {

using gf::Element;
using gf::Field;
using p1::ClosedPoint;
using p1::Mobius;
using p1::Poly;
using p1::RationalMap;
using p1::RatPoint;

enum class StepKind { mobius, squaring, twist, descent, composition };
std::string step_kind_name(StepKind k);
StepKind step_kind_from_name(const std::string& s);

/// One elementary construction step of a cover's audit chain.
struct Step {
    StepKind kind;
    std::string params;  // human-readable construction parameters
    RationalMap map;
};

/// A dominant self-map of P^1 together with the audit chain that built it.
/// The chain is stored outermost-first: map = chain[0].map ∘ chain[1].map ∘ ...
/// An empty chain denotes the identity map.
struct Cover {
    RationalMap map;
    std::vector<Step> chain;

    int degree() const { return map.degree(); }
    const Field& field() const { return map.field(); }
    static Cover identity(Field k);
    // recompose the chain and compare with map
    bool chain_consistent() const;
};

Cover compose_covers(const Cover& outer, const Cover& inner);
Cover mobius_cover(const Mobius& m, const std::string& params);

/// Fibre behaviour of a degree-2 cover over a point list.
struct FibreClassification {
    std::vector<ClosedPoint> split;  // two points, f = 1 each  (B_ts)
    std::vector<ClosedPoint> inert;  // single point, f = 2     (B_in)
    std::vector<ClosedPoint> ramified;  // single point, e = 2  (B_ram)
};

/// Degree-2 cover totally ramified exactly over distinct rational P and Q;
/// nontrivial twist class uses T^2/alpha in place of T^2.
Cover double_cover(const Field& k, const RatPoint& P, const RatPoint& Q, bool twisted, Rng& rng);

FibreClassification classify_fibres(const Cover& cover, const std::vector<ClosedPoint>& points,
                                    Rng& rng);

/// The quadratic twist: same branch locus, fibre type flipped at odd-degree
/// unbranched points and preserved at even-degree ones.
Cover twist_cover(const Cover& cover, Rng& rng);

/// For a point m of degree 2d: a degree-d cover phi with deg(phi(m)) = 2
/// (the image is the point t^2 - alpha). Galois descent from F_{q^2}.
Cover reduce_degree_cover(const ClosedPoint& m, Rng& rng);

/// For a degree-2 point: a degree-2 cover whose fibre over it is a single
/// closed point of degree 4 (e = 1, f = 2).
Cover quadruple_point_cover(const ClosedPoint& P2, Rng& rng);

/// Mobius taking one degree-2 closed point to another.
Mobius mobius_between_quadratic_points(const ClosedPoint& src, const ClosedPoint& dst);

/// 2-power-degree cover totally ramified over P and Q with 2 | e*f over every
/// point of B_rat. The designated ramification points are carried through the
/// recursion; instances where that contract is unsatisfiable (they exist for
/// small q) are reported via SynthesisError rather than looping.
Cover kill_rational_residues(const Field& k, const std::vector<RatPoint>& B_rat,
                             const RatPoint& P, const RatPoint& Q, Rng& rng);

/// 2-power-degree cover with 2 | e*f over every point of S (rational points).
/// Terminates unconditionally: both branch points of every layer are chosen
/// inside the current set, so the set shrinks by at least two per layer.
Cover rational_parity_cover(const Field& k, const std::vector<RatPoint>& S, Rng& rng);

/// Cover certifying unirationality: 2 | e*f over every point of B.
/// Requires condition (star). An empty locus yields the identity cover.
Cover synth_unirational_cover(const Field& k, const conic::NonSplitLocus& B, Rng& rng);

struct RequivDiagnostics {
    bool deg2_fallback_used = false;
    bool deg2_fallback_exhausted = false;
    int search_nodes = 0;
};

/// Cover certifying R-equivalence of the fibres over s0 and s1: parity over B
/// plus a rational point in each of the two fibres. Requires (star star).
Cover synth_requiv_cover(const Field& k, const conic::NonSplitLocus& B, const RatPoint& s0,
                         const RatPoint& s1, Rng& rng, RequivDiagnostics* diag = nullptr);

// parity check used internally after synthesis (the certify module re-verifies
// independently from serialized data)
bool parity_holds(const RationalMap& phi, const std::vector<ClosedPoint>& pts, Rng& rng);

}  // namespace conicover::covers
