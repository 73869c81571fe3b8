#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "conicover/covers.hpp"

using namespace conicover;
using namespace conicover::covers;
using gf::Element;
using gf::Field;
using gf::FieldSpec;
using p1::ClosedPoint;
using p1::fibre;
using p1::Poly;
using p1::RationalMap;
using p1::RatPoint;

namespace {

Field f3() { return FieldSpec::make_prime(3); }
Field f5() { return FieldSpec::make_prime(5); }

Poly ipoly(const Field& k, std::vector<i64> c) {
    std::vector<Element> e;
    for (i64 x : c) e.push_back(k->from_int(x));
    return Poly(k, std::move(e));
}

RatPoint pt(const Field& k, i64 v) { return RatPoint::at(k->from_int(v)); }
RatPoint inf() { return RatPoint::infinity(); }

conic::NonSplitLocus locus_of_points(const std::vector<ClosedPoint>& pts) {
    conic::NonSplitLocus B;
    for (const auto& P : pts) {
        conic::ResidueClass rc;
        rc.point = P;
        rc.representative = Poly::from_int(P.field(), 1);
        rc.trivial = false;
        B.points.push_back(rc);
        B.delta += P.degree();
    }
    return B;
}

bool totally_ramified_over(const Cover& c, const RatPoint& x, Rng& rng) {
    auto fb = fibre(c.map, ClosedPoint::rational(c.field(), x), rng);
    return fb.size() == 1 && fb[0].e == c.degree() && fb[0].f == 1;
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

TEST_CASE("double covers") {
    Rng rng(1);
    auto k3 = f3();
    Cover c = double_cover(k3, pt(k3, 0), inf(), false, rng);
    CHECK(c.map == RationalMap(ipoly(k3, {0, 0, 1}), ipoly(k3, {1})));
    CHECK(c.chain_consistent());
    auto fb = fibre(c.map, ClosedPoint::finite(Poly::t(k3)), rng);
    REQUIRE(fb.size() == 1);
    CHECK(fb[0].e == 2);
    // twisted squaring over F_5: fibre over t = 1 is inert since 2 is a nonsquare
    auto k5 = f5();
    Cover tw = double_cover(k5, pt(k5, 0), inf(), true, rng);
    CHECK(tw.map == RationalMap(ipoly(k5, {0, 0, 3}), ipoly(k5, {1})));  // T^2/2 = 3T^2
    auto fb1 = fibre(tw.map, ClosedPoint::finite(ipoly(k5, {-1, 1})), rng);
    REQUIRE(fb1.size() == 1);
    CHECK(fb1[0].f == 2);
    // arbitrary rational pair, post-verified total ramification
    Cover c12 = double_cover(k3, pt(k3, 1), pt(k3, 2), false, rng);
    CHECK(totally_ramified_over(c12, pt(k3, 1), rng));
    CHECK(totally_ramified_over(c12, pt(k3, 2), rng));
    CHECK_THROWS_AS(double_cover(k3, pt(k3, 1), pt(k3, 1), false, rng), Error);
}

TEST_CASE("fibre classification of the squaring map") {
    Rng rng(2);
    auto k = f5();
    Cover sq = double_cover(k, pt(k, 0), inf(), false, rng);
    std::vector<ClosedPoint> pts = {
        ClosedPoint::rational(k, pt(k, 1)), ClosedPoint::rational(k, pt(k, 4)),
        ClosedPoint::rational(k, pt(k, 2)), ClosedPoint::rational(k, pt(k, 3)),
        ClosedPoint::rational(k, pt(k, 0))};
    FibreClassification cls = classify_fibres(sq, pts, rng);
    CHECK(cls.split.size() == 2);   // 1 and 4 are squares mod 5
    CHECK(cls.inert.size() == 2);   // 2 and 3 are nonsquares
    CHECK(cls.ramified.size() == 1);
}

TEST_CASE("split classification matches the quadratic character") {
    // for nu o (T^2/c), an unbranched rational m splits iff c * nu^{-1}(m) is a square
    for (auto k : {f3(), f5()}) {
        Rng rng(61 + k->q());
        for (bool tw : {false, true}) {
            Cover c = double_cover(k, pt(k, 0), inf(), tw, rng);
            const RationalMap& nu = c.chain[0].map;
            const Element twist = tw ? k->nonsquare_witness() : k->one();
            for (u64 i = 0; i <= k->q(); ++i) {
                RatPoint m = p1::rat_point_at_index(k, i);
                RatPoint pre = RatPoint::infinity();
                for (u64 j = 0; j <= k->q(); ++j) {
                    RatPoint cand = p1::rat_point_at_index(k, j);
                    if (nu.eval(cand) == m) pre = cand;
                }
                if (pre.inf || k->is_zero(pre.v)) continue;  // over a branch point
                const bool split =
                    fibre(c.map, ClosedPoint::rational(k, m), rng).size() == 2;
                CHECK(split == k->is_square(k->mul(twist, pre.v)));
            }
        }
    }
}

TEST_CASE("twisting a double cover") {
    Rng rng(3);
    auto k = f5();
    Cover sq = double_cover(k, pt(k, 0), inf(), false, rng);
    Cover tw = twist_cover(sq, rng);
    CHECK(tw.degree() == 2);
    // fibre over 1 flips from split to inert
    auto fb = fibre(tw.map, ClosedPoint::rational(k, pt(k, 1)), rng);
    REQUIRE(fb.size() == 1);
    CHECK(fb[0].f == 2);
    // even-degree invariance: both covers give a single quartic point over t^2 - 2
    ClosedPoint m2 = ClosedPoint::finite(ipoly(k, {3, 0, 1}));
    auto fa = fibre(sq.map, m2, rng);
    auto fbb = fibre(tw.map, m2, rng);
    REQUIRE(fa.size() == 1);
    REQUIRE(fbb.size() == 1);
    CHECK(fa[0].f == 2);
    CHECK(fbb[0].f == 2);
    CHECK(p1::is_irreducible(fa[0].t.minpoly()));
    CHECK(p1::is_irreducible(fbb[0].t.minpoly()));
}

TEST_CASE("twist flips odd degrees and preserves even degrees") {
    for (auto k : {f3(), f5()}) {
        Rng rng(7 + k->q());
        for (int trial = 0; trial < 10; ++trial) {
            // a random degree-2 cover: conjugated, possibly twisted squaring
            u64 i = rng.below(k->q() + 1), j = rng.below(k->q() + 1);
            if (i == j) continue;
            Cover base = double_cover(k, p1::rat_point_at_index(k, i),
                                      p1::rat_point_at_index(k, j), rng.below(2) == 1, rng);
            Cover tw = twist_cover(base, rng);
            // double twist restores the fibre type everywhere
            Cover tw2 = twist_cover(tw, rng);
            for (int d = 1; d <= 3; ++d) {
                // all closed points of degree d, skipping branch points
                std::vector<ClosedPoint> pts;
                if (d == 1) {
                    for (u64 a = 0; a <= k->q(); ++a)
                        pts.push_back(ClosedPoint::rational(k, p1::rat_point_at_index(k, a)));
                } else {
                    u64 total = 1;
                    for (int x = 0; x < d; ++x) total *= k->q();
                    for (u64 idx = 0; idx < total; ++idx) {
                        u64 v = idx;
                        std::vector<Element> c;
                        for (int x = 0; x < d; ++x) {
                            c.push_back(k->element_at(v % k->q()));
                            v /= k->q();
                        }
                        c.push_back(k->one());
                        Poly f(k, std::move(c));
                        if (p1::is_irreducible(f)) pts.push_back(ClosedPoint::finite_unchecked(f));
                    }
                }
                for (const auto& m : pts) {
                    auto f0 = fibre(base.map, m, rng);
                    if (f0.size() == 1 && f0[0].e == 2) continue;  // branched
                    auto f1 = fibre(tw.map, m, rng);
                    auto f2 = fibre(tw2.map, m, rng);
                    const bool split0 = f0.size() == 2;
                    const bool split1 = f1.size() == 2;
                    const bool split2 = f2.size() == 2;
                    if (d % 2 == 1)
                        CHECK(split0 != split1);
                    else
                        CHECK(split0 == split1);
                    CHECK(split0 == split2);
                }
            }
        }
    }
}

TEST_CASE("degree reduction by descent") {
    for (auto k : {f3(), f5()}) {
        Rng rng(11 + k->q());
        for (int dm : {2, 4, 6}) {
            ClosedPoint m = p1::first_point_of_degree(k, dm);
            Cover c = reduce_degree_cover(m, rng);
            CHECK(c.degree() == dm / 2);
            ClosedPoint img = p1::image_of_point(c.map, m);
            CHECK(img.degree() == 2);
            auto fb = fibre(c.map, img, rng);
            REQUIRE(fb.size() == 1);
            CHECK(fb[0].t == m);
            CHECK(fb[0].e == 1);
            CHECK(fb[0].f == dm / 2);
            CHECK(c.chain_consistent());
        }
        CHECK_THROWS_AS(reduce_degree_cover(p1::first_point_of_degree(k, 3), rng), Error);
    }
}

TEST_CASE("Mobius between degree-2 points") {
    auto k = f3();
    ClosedPoint a = ClosedPoint::finite(ipoly(k, {1, 0, 1}));  // t^2 + 1
    ClosedPoint b = ClosedPoint::finite(ipoly(k, {2, 1, 1}));  // t^2 + t + 2
    p1::Mobius nu = mobius_between_quadratic_points(a, b);
    CHECK(p1::image_of_point(nu.to_map(), a) == b);
    p1::Mobius id = mobius_between_quadratic_points(a, a);
    CHECK(p1::image_of_point(id.to_map(), a) == a);
}

TEST_CASE("quadruple point covers") {
    for (auto k : {f3(), f5()}) {
        Rng rng(13 + k->q());
        ClosedPoint P2 = p1::first_point_of_degree(k, 2);
        Cover c = quadruple_point_cover(P2, rng);
        CHECK(c.degree() == 2);
        auto fb = fibre(c.map, P2, rng);
        REQUIRE(fb.size() == 1);
        CHECK(fb[0].e == 1);
        CHECK(fb[0].f == 2);
        CHECK(fb[0].t.degree() == 4);
        CHECK(c.chain_consistent());
    }
    // the specific degree-2 point t^2 + 1 over F_3
    Rng rng(17);
    auto k = f3();
    Cover c = quadruple_point_cover(ClosedPoint::finite(ipoly(k, {1, 0, 1})), rng);
    auto fb = fibre(c.map, ClosedPoint::finite(ipoly(k, {1, 0, 1})), rng);
    REQUIRE(fb.size() == 1);
    CHECK(fb[0].f == 2);
}

TEST_CASE("kill_rational_residues on satisfiable instances") {
    Rng rng(19);
    auto k3 = f3();
    // designated pair only: the plain conjugated squaring
    Cover c0 = kill_rational_residues(k3, {pt(k3, 0), inf()}, pt(k3, 0), inf(), rng);
    CHECK(c0.map == RationalMap(ipoly(k3, {0, 0, 1}), ipoly(k3, {1})));
    // empty set: still a degree-2 cover totally ramified over P and Q
    Cover c1 = kill_rational_residues(k3, {}, pt(k3, 1), pt(k3, 2), rng);
    CHECK(c1.degree() == 2);
    CHECK(totally_ramified_over(c1, pt(k3, 1), rng));
    CHECK(totally_ramified_over(c1, pt(k3, 2), rng));
    // F_5 with all four designated-or-split points: one recursion level, degree 4
    auto k5 = f5();
    std::vector<RatPoint> B5 = {pt(k5, 0), pt(k5, 1), pt(k5, 2), inf()};
    Cover c5 = kill_rational_residues(k5, B5, pt(k5, 0), inf(), rng);
    CHECK(c5.degree() <= 4);
    CHECK(is_power_of_two(c5.degree()));
    CHECK(totally_ramified_over(c5, pt(k5, 0), rng));
    CHECK(totally_ramified_over(c5, inf(), rng));
    std::vector<ClosedPoint> pts5;
    for (const auto& x : B5) pts5.push_back(ClosedPoint::rational(k5, x));
    CHECK(parity_holds(c5.map, pts5, rng));
    CHECK(c5.degree() <= (1 << (1 + (B5.size() + 1) / 2)));
}

TEST_CASE("kill_rational_residues reports unattainable designated ramification") {
    // Over F_3 no 2-power cover totally ramified over 0 and infinity has even
    // parity over both 1 and 2: the fibres are the factor sets of X^n - u and
    // X^n - 2u, and one of u, 2u is always 1.
    Rng rng(23);
    auto k = f3();
    CHECK_THROWS_AS(
        kill_rational_residues(k, {pt(k, 1), pt(k, 2)}, pt(k, 0), inf(), rng),
        SynthesisError);
}

TEST_CASE("rational parity covers terminate and satisfy parity") {
    for (auto k : {f3(), f5()}) {
        Rng rng(29 + k->q());
        const u64 n = k->q() + 1;
        // every subset of P^1(F_q) for q = 3; random subsets for q = 5
        std::vector<std::vector<RatPoint>> subsets;
        if (k->q() == 3) {
            for (u64 mask = 0; mask < (u64(1) << n); ++mask) {
                std::vector<RatPoint> S;
                for (u64 i = 0; i < n; ++i)
                    if (mask & (u64(1) << i)) S.push_back(p1::rat_point_at_index(k, i));
                subsets.push_back(S);
            }
        } else {
            for (int trial = 0; trial < 40; ++trial) {
                std::vector<RatPoint> S;
                for (u64 i = 0; i < n; ++i)
                    if (rng.below(2)) S.push_back(p1::rat_point_at_index(k, i));
                subsets.push_back(S);
            }
        }
        for (const auto& S : subsets) {
            Cover c = rational_parity_cover(k, S, rng);
            CHECK(is_power_of_two(c.degree()));
            std::vector<ClosedPoint> pts;
            for (const auto& x : S) pts.push_back(ClosedPoint::rational(k, x));
            CHECK(parity_holds(c.map, pts, rng));
            CHECK(c.chain_consistent());
        }
    }
}

TEST_CASE("unirational cover synthesis") {
    Rng rng(31);
    auto k3 = f3();
    // B = {0, inf}: the plain squaring map settles it
    {
        conic::NonSplitLocus B = locus_of_points(
            {ClosedPoint::rational(k3, pt(k3, 0)), ClosedPoint::infinity(k3)});
        Cover c = synth_unirational_cover(k3, B, rng);
        CHECK(c.map == RationalMap(ipoly(k3, {0, 0, 1}), ipoly(k3, {1})));
        CHECK(parity_holds(c.map, {B.points[0].point, B.points[1].point}, rng));
    }
    // degrees {2, 1}: quadruple-point stage plus rational leftovers
    {
        conic::NonSplitLocus B = locus_of_points(
            {ClosedPoint::finite(ipoly(k3, {1, 0, 1})), ClosedPoint::rational(k3, pt(k3, 0))});
        Cover c = synth_unirational_cover(k3, B, rng);
        std::vector<ClosedPoint> pts;
        for (const auto& r : B.points) pts.push_back(r.point);
        CHECK(parity_holds(c.map, pts, rng));
        CHECK(c.chain_consistent());
    }
    // degrees {1, 1, 2, 3} over F_5
    {
        auto k5 = f5();
        conic::NonSplitLocus B = locus_of_points(
            {ClosedPoint::rational(k5, pt(k5, 0)), ClosedPoint::rational(k5, pt(k5, 1)),
             p1::first_point_of_degree(k5, 2), p1::first_point_of_degree(k5, 3)});
        Cover c = synth_unirational_cover(k5, B, rng);
        std::vector<ClosedPoint> pts;
        for (const auto& r : B.points) pts.push_back(r.point);
        CHECK(parity_holds(c.map, pts, rng));
    }
    // empty locus: the identity
    CHECK(synth_unirational_cover(k3, conic::NonSplitLocus{}, rng).degree() == 1);
    // hypothesis violations are reported
    {
        auto k5 = f5();
        conic::NonSplitLocus bad = locus_of_points(
            {p1::first_point_of_degree(k5, 2),
             ClosedPoint::finite(ipoly(k5, {2, 0, 1}))});  // two degree-2 points
        CHECK_THROWS_AS(synth_unirational_cover(k5, bad, rng), HypothesisError);
    }
}

TEST_CASE("R-equivalence cover synthesis, exhaustive over F_3") {
    auto k = f3();
    Rng rng(37);
    const u64 n = k->q() + 1;
    std::vector<std::optional<ClosedPoint>> specials = {
        std::nullopt, p1::first_point_of_degree(k, 2), p1::first_point_of_degree(k, 3)};
    int instances = 0;
    for (const auto& special : specials) {
        for (u64 mask = 0; mask < (u64(1) << n); ++mask) {
            std::vector<ClosedPoint> pts;
            for (u64 i = 0; i < n; ++i)
                if (mask & (u64(1) << i))
                    pts.push_back(ClosedPoint::rational(k, p1::rat_point_at_index(k, i)));
            if (special) pts.push_back(*special);
            conic::NonSplitLocus B = locus_of_points(pts);
            REQUIRE(conic::condition_star_star(B));
            for (u64 i0 = 0; i0 <= k->q(); ++i0)
                for (u64 i1 = 0; i1 <= k->q(); ++i1) {
                    if (i0 == i1) continue;
                    RatPoint s0 = p1::rat_point_at_index(k, i0);
                    RatPoint s1 = p1::rat_point_at_index(k, i1);
                    Cover c = synth_requiv_cover(k, B, s0, s1, rng);
                    ++instances;
                    CHECK(parity_holds(c.map, pts, rng));
                    for (const RatPoint& s : {s0, s1}) {
                        bool has = false;
                        for (const auto& fp :
                             fibre(c.map, ClosedPoint::rational(k, s), rng))
                            if (fp.f == 1) has = true;
                        CHECK(has);
                    }
                    CHECK(c.chain_consistent());
                }
        }
    }
    CHECK(instances == 3 * 16 * 12);
}

TEST_CASE("R-equivalence cover synthesis samples over F_5") {
    auto k = f5();
    Rng rng(41);
    std::vector<conic::NonSplitLocus> cases;
    cases.push_back(locus_of_points({ClosedPoint::rational(k, pt(k, 0)),
                                     ClosedPoint::rational(k, pt(k, 1)),
                                     ClosedPoint::rational(k, pt(k, 2)),
                                     ClosedPoint::rational(k, pt(k, 3)),
                                     ClosedPoint::rational(k, pt(k, 4)),
                                     ClosedPoint::infinity(k)}));  // all of P^1(F_5)
    cases.push_back(locus_of_points({ClosedPoint::finite(ipoly(k, {3, 0, 1})),
                                     ClosedPoint::rational(k, pt(k, 0)),
                                     ClosedPoint::infinity(k)}));  // t^2 - 2 plus rationals
    cases.push_back(locus_of_points({p1::first_point_of_degree(k, 3),
                                     ClosedPoint::rational(k, pt(k, 2))}));
    for (const auto& B : cases) {
        for (auto [a, b] : std::vector<std::pair<i64, i64>>{{0, 1}, {1, 2}, {4, 0}}) {
            RatPoint s0 = pt(k, a), s1 = pt(k, b);
            Cover c = synth_requiv_cover(k, B, s0, s1, rng);
            std::vector<ClosedPoint> pts;
            for (const auto& r : B.points) pts.push_back(r.point);
            CHECK(parity_holds(c.map, pts, rng));
            for (const RatPoint& s : {s0, s1}) {
                bool has = false;
                for (const auto& fp : fibre(c.map, ClosedPoint::rational(k, s), rng))
                    if (fp.f == 1) has = true;
                CHECK(has);
            }
        }
    }
}

TEST_CASE("synthesis over the extension field F_9") {
    auto k = FieldSpec::make_ext(3, {1, 0, 1});
    Rng rng(47);
    // descent uses the quadratic extension of an extension field here
    ClosedPoint m2 = p1::first_point_of_degree(k, 2);
    Cover qc = quadruple_point_cover(m2, rng);
    auto fb = fibre(qc.map, m2, rng);
    REQUIRE(fb.size() == 1);
    CHECK(fb[0].f == 2);
    // a full unirational pipeline run with rational + degree-2 + degree-3 points
    conic::NonSplitLocus B = locus_of_points({ClosedPoint::rational(k, RatPoint::at(k->zero())),
                                              m2, p1::first_point_of_degree(k, 3)});
    Cover c = synth_unirational_cover(k, B, rng);
    std::vector<ClosedPoint> pts;
    for (const auto& r : B.points) pts.push_back(r.point);
    CHECK(parity_holds(c.map, pts, rng));
    // and an R-equivalence run (a single special point is allowed here)
    conic::NonSplitLocus B2 = locus_of_points(
        {ClosedPoint::rational(k, RatPoint::at(k->zero())), m2});
    Cover cr = synth_requiv_cover(k, B2, RatPoint::at(k->zero()), RatPoint::infinity(), rng);
    std::vector<ClosedPoint> pts2;
    for (const auto& r : B2.points) pts2.push_back(r.point);
    CHECK(parity_holds(cr.map, pts2, rng));
    for (const RatPoint& s : {RatPoint::at(k->zero()), RatPoint::infinity()}) {
        bool has = false;
        for (const auto& fp : fibre(cr.map, ClosedPoint::rational(k, s), rng))
            if (fp.f == 1) has = true;
        CHECK(has);
    }
}

TEST_CASE("R-equivalence cover synthesis samples over F_7") {
    auto k = FieldSpec::make_prime(7);
    Rng rng(59);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<ClosedPoint> pts;
        for (u64 i = 0; i <= k->q(); ++i)
            if (rng.below(2)) pts.push_back(ClosedPoint::rational(k, p1::rat_point_at_index(k, i)));
        const u64 kind = rng.below(3);
        if (kind == 1) pts.push_back(p1::first_point_of_degree(k, 2));
        if (kind == 2) pts.push_back(p1::first_point_of_degree(k, 3));
        conic::NonSplitLocus B = locus_of_points(pts);
        u64 i0 = rng.below(k->q() + 1), i1 = rng.below(k->q() + 1);
        if (i0 == i1) i1 = (i1 + 1) % (k->q() + 1);
        RatPoint s0 = p1::rat_point_at_index(k, i0), s1 = p1::rat_point_at_index(k, i1);
        Cover c = synth_requiv_cover(k, B, s0, s1, rng);
        CHECK(parity_holds(c.map, pts, rng));
        for (const RatPoint& s : {s0, s1}) {
            bool has = false;
            for (const auto& fp : fibre(c.map, ClosedPoint::rational(k, s), rng))
                if (fp.f == 1) has = true;
            CHECK(has);
        }
    }
}

TEST_CASE("empty locus needs only the identity") {
    auto k = f3();
    Rng rng(53);
    conic::NonSplitLocus empty;
    CHECK(synth_unirational_cover(k, empty, rng).degree() == 1);
    Cover c = synth_requiv_cover(k, empty, pt(k, 0), inf(), rng);
    CHECK(c.degree() == 1);
}

TEST_CASE("cover composition bookkeeping") {
    Rng rng(43);
    auto k = f3();
    Cover a = double_cover(k, pt(k, 0), inf(), false, rng);
    Cover b = double_cover(k, pt(k, 1), pt(k, 2), true, rng);
    Cover c = compose_covers(a, b);
    CHECK(c.degree() == 4);
    CHECK(c.chain.size() == a.chain.size() + b.chain.size());
    CHECK(c.chain_consistent());
    // tampering with a chain entry breaks recomposition or changes the map
    Cover tampered = c;
    tampered.chain[0].map = RationalMap(ipoly(k, {1, 1}), ipoly(k, {1}));
    CHECK(!tampered.chain_consistent());
}
