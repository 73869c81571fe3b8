#include "conicover/covers.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <tuple>

namespace conicover::covers {

using p1::all_rat_points;
using p1::fibre;
using p1::FibrePoint;
using p1::image_of_point;
using p1::rat_point_at_index;
using p1::rat_point_index;

std::string step_kind_name(StepKind k) {
    switch (k) {
        case StepKind::mobius: return "mobius";
        case StepKind::squaring: return "squaring";
        case StepKind::twist: return "twist";
        case StepKind::descent: return "descent";
        case StepKind::composition: return "composition";
    }
    return "?";
}

StepKind step_kind_from_name(const std::string& s) {
    if (s == "mobius") return StepKind::mobius;
    if (s == "squaring") return StepKind::squaring;
    if (s == "twist") return StepKind::twist;
    if (s == "descent") return StepKind::descent;
    if (s == "composition") return StepKind::composition;
    throw InputError("unknown cover step kind: " + s);
}

Cover Cover::identity(Field k) { return Cover{RationalMap::identity(std::move(k)), {}}; }

bool Cover::chain_consistent() const {
    RationalMap acc = RationalMap::identity(map.field());
    bool first = true;
    int degree_product = 1;
    for (const auto& s : chain) {
        degree_product *= s.map.degree();
        acc = first ? s.map : p1::compose(acc, s.map);
        first = false;
    }
    return acc == map && degree_product == map.degree();
}

Cover compose_covers(const Cover& outer, const Cover& inner) {
    Cover r{p1::compose(outer.map, inner.map), outer.chain};
    r.chain.insert(r.chain.end(), inner.chain.begin(), inner.chain.end());
    return r;
}

Cover mobius_cover(const Mobius& m, const std::string& params) {
    RationalMap map = m.to_map();
    return Cover{map, {Step{StepKind::mobius, params, map}}};
}

namespace {

std::string describe(const RatPoint& x) {
    if (x.inf) return "inf";
    std::ostringstream os;
    os << "[";
    for (size_t i = 0; i < x.v.c.size(); ++i) os << (i ? "," : "") << x.v.c[i];
    os << "]";
    return os.str();
}

std::string describe(const Poly& f) {
    std::ostringstream os;
    os << "[";
    for (int i = 0; i <= f.degree(); ++i) {
        if (i) os << ",";
        os << "[";
        const Element e = f.coeff(i);
        for (size_t j = 0; j < e.c.size(); ++j) os << (j ? "," : "") << e.c[j];
        os << "]";
    }
    os << "]";
    return os.str();
}

RatPoint first_point_not_in(const Field& k, const std::vector<RatPoint>& avoid) {
    for (u64 i = 0; i <= k->q(); ++i) {
        RatPoint cand = rat_point_at_index(k, i);
        if (std::find(avoid.begin(), avoid.end(), cand) == avoid.end()) return cand;
    }
    throw SynthesisError("no spare rational point on P^1(F_q)");
}

}  // namespace

// ---------------------------------------------------------------------------
// double covers and their classification
// ---------------------------------------------------------------------------

Cover double_cover(const Field& k, const RatPoint& P, const RatPoint& Q, bool twisted, Rng& rng) {
    require(P != Q, "double cover needs distinct ramification points");
    const RatPoint spare = first_point_not_in(k, {P, Q});
    const Element zero = k->zero(), one = k->one();
    Mobius nu = Mobius::from_points(
        k, {RatPoint::at(zero), RatPoint::at(one), RatPoint::infinity()}, {P, spare, Q});
    Poly t2 = Poly::monomial(k, one, 2);
    Poly den = Poly::constant(k, twisted ? k->nonsquare_witness() : one);
    RationalMap inner(t2, den);
    Cover cover{p1::compose(nu.to_map(), inner),
                {Step{StepKind::mobius, "send 0,inf to " + describe(P) + "," + describe(Q),
                      nu.to_map()},
                 Step{twisted ? StepKind::twist : StepKind::squaring,
                      twisted ? "T^2/alpha" : "T^2", inner}}};
    for (const RatPoint& x : {P, Q}) {
        auto fb = fibre(cover.map, ClosedPoint::rational(k, x), rng);
        require(fb.size() == 1 && fb[0].e == 2 && fb[0].f == 1,
                "double cover is not totally ramified where required");
    }
    return cover;
}

FibreClassification classify_fibres(const Cover& cover, const std::vector<ClosedPoint>& points,
                                    Rng& rng) {
    require(cover.degree() == 2, "fibre classification needs a degree-2 cover");
    FibreClassification out;
    for (const auto& m : points) {
        auto fb = fibre(cover.map, m, rng);
        if (fb.size() == 2) {
            out.split.push_back(m);
        } else if (fb[0].e == 2) {
            out.ramified.push_back(m);
        } else {
            require(fb[0].f == 2, "unexpected fibre shape under a degree-2 cover");
            out.inert.push_back(m);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// twisting
// ---------------------------------------------------------------------------

namespace {

// discriminant in x of N(x) - t D(x) for a degree-2 map, as a polynomial in t
Poly fibral_discriminant(const RationalMap& phi) {
    const Field& k = phi.field();
    const Poly& N = phi.num();
    const Poly& D = phi.den();
    Poly mt = -Poly::t(k);
    auto coef = [&](const Poly& f, int i) { return Poly::constant(k, f.coeff(i)); };
    Poly A = coef(N, 2) + mt.scaled(D.coeff(2));
    Poly B = coef(N, 1) + mt.scaled(D.coeff(1));
    Poly C = coef(N, 0) + mt.scaled(D.coeff(0));
    Poly delta = B * B - (A * C).scaled(k->from_int(4));
    require(!delta.is_zero(), "degenerate degree-2 cover");
    return delta;
}

struct BranchLocus {
    std::vector<RatPoint> rational;
    std::optional<ClosedPoint> quadratic;
};

BranchLocus branch_locus(const RationalMap& phi, Rng& rng) {
    const Field& k = phi.field();
    BranchLocus out;
    Poly dodd = p1::odd_multiplicity_part(fibral_discriminant(phi));
    require(dodd.degree() >= 1, "double cover with constant discriminant class");
    for (const auto& [g, m] : p1::factor(dodd, rng).factors) {
        if (g.degree() == 1) {
            out.rational.push_back(RatPoint::at(k->neg(g.coeff(0))));
        } else {
            out.quadratic = ClosedPoint::finite_unchecked(g);
        }
    }
    auto at_inf = fibre(phi, ClosedPoint::infinity(k), rng);
    if (at_inf.size() == 1 && at_inf[0].e == 2) out.rational.push_back(RatPoint::infinity());
    return out;
}

}  // namespace

Cover twist_cover(const Cover& cover, Rng& rng) {
    require(cover.degree() == 2, "twist needs a degree-2 cover");
    (void)rng;
    const Field& k = cover.field();
    const Element alpha = k->nonsquare_witness();
    const Poly dodd = p1::odd_multiplicity_part(fibral_discriminant(cover.map));
    require(dodd.degree() >= 1 && dodd.degree() <= 2, "unexpected discriminant degree");
    // rational point on y^2 = alpha * dodd(t); an affine one always exists since
    // the conic has q+1 points and at most two of them lie at infinity
    const Poly g = dodd.scaled(alpha);
    Element t0, y0;
    bool found = false;
    for (u64 i = 0; i < k->q() && !found; ++i) {
        Element cand = k->element_at(i);
        Element rhs = g.eval(cand);
        if (k->is_square(rhs)) {
            t0 = cand;
            y0 = k->sqrt(rhs);
            found = true;
        }
    }
    require(found, "no affine point on the twisted conic");
    // lines through (t0, y0): t = (t0 m^2 - 2 y0 m + (c2 t0 + c1)) / (m^2 - c2)
    const Element c2 = g.coeff(2), c1 = g.coeff(1);
    Poly num(k, {k->add(k->mul(c2, t0), c1), k->neg(k->mul(k->from_int(2), y0)), t0});
    Poly den(k, {k->neg(c2), k->zero(), k->one()});
    RationalMap psi(num, den);
    require(psi.degree() == 2, "twist parametrization degenerated");
    const Poly dodd2 = p1::odd_multiplicity_part(fibral_discriminant(psi));
    require(dodd2.monic() == dodd.monic(), "twist changed the branch locus");
    require(k->is_square(k->mul(dodd2.lc(), k->inv(k->mul(alpha, dodd.lc())))),
            "twist landed in the wrong square class");
    std::ostringstream os;
    os << "twist of " << describe(cover.map.num()) << "/" << describe(cover.map.den());
    return Cover{psi, {Step{StepKind::twist, os.str(), psi}}};
}

// ---------------------------------------------------------------------------
// degree reduction by Galois descent
// ---------------------------------------------------------------------------

namespace {

Poly lift_poly(const gf::QuadExt& E, const Poly& f) {
    std::vector<Element> c;
    for (int i = 0; i <= f.degree(); ++i) c.push_back(E.embed(f.coeff(i)));
    return Poly(E.ext, std::move(c));
}

Poly conj_poly(const gf::QuadExt& E, const Poly& f) {
    std::vector<Element> c;
    for (int i = 0; i <= f.degree(); ++i) c.push_back(E.ext->frobenius_q(f.coeff(i)));
    return Poly(E.ext, std::move(c));
}

Poly descend_poly(const gf::QuadExt& E, const Poly& f) {
    std::vector<Element> c;
    for (int i = 0; i <= f.degree(); ++i) {
        require(E.ext->in_base(f.coeff(i)), "descent failed: coefficient not Frobenius-fixed");
        c.push_back(E.ext->project_base(f.coeff(i)));
    }
    return Poly(E.base, std::move(c));
}

ClosedPoint quadratic_alpha_point(const Field& k) {
    Poly f(k, {k->neg(k->nonsquare_witness()), k->zero(), k->one()});
    return ClosedPoint::finite_unchecked(f);  // t^2 - alpha, irreducible by choice of alpha
}

}  // namespace

Cover reduce_degree_cover(const ClosedPoint& m, Rng& rng) {
    require(!m.is_infinite() && m.degree() % 2 == 0,
            "degree reduction needs a finite point of even degree");
    const Field& k = m.field();
    const int d = m.degree() / 2;
    gf::QuadExt E(k);

    // p_m = p1 * sigma(p1) over F_{q^2}
    Poly lifted = lift_poly(E, m.minpoly());
    auto fac = p1::factor(lifted, rng);
    require(fac.factors.size() == 2 && fac.factors[0].second == 1 && fac.factors[1].second == 1,
            "point polynomial did not split into a conjugate pair");
    Poly top = fac.factors[0].first;
    Poly bot = conj_poly(E, top);
    require(top * bot == lifted, "conjugate factorization check failed");
    RationalMap f(top, bot);

    // f * sigma(f) is a constant of F_q^x; normalize it away via a norm solution
    Poly fn = f.num() * conj_poly(E, f.num());
    Poly fd = f.den() * conj_poly(E, f.den());
    auto [quot, rem] = p1::divmod(fn, fd);
    require(rem.is_zero() && quot.degree() == 0, "f * sigma(f) is not constant");
    Element v2 = quot.coeff(0);
    require(E.ext->in_base(v2), "f * sigma(f) is not Frobenius-fixed");
    Element u = solve_norm_equation(E, E.ext->project_base(v2));
    f = RationalMap(f.num().scaled(E.ext->inv(u)), f.den());
    {
        Poly n2 = f.num() * conj_poly(E, f.num());
        Poly d2 = f.den() * conj_poly(E, f.den());
        require(n2 == d2, "normalization by the norm solution failed");
    }

    // g(x) = sqrt(alpha)(x+1)/(x-1): g(0) = sqrt(alpha), g(inf) = -sqrt(alpha),
    // and sigma(g)(x) = g(1/x), so g o f is Frobenius-invariant and descends
    const Element w = E.sqrt_alpha();
    RationalMap g(Poly(E.ext, {w, w}), Poly(E.ext, {E.ext->neg(E.ext->one()), E.ext->one()}));
    RationalMap G = p1::compose(g, f);
    RationalMap phi(descend_poly(E, G.num()), descend_poly(E, G.den()));
    require(phi.degree() == d, "descended cover has the wrong degree");

    const ClosedPoint target = quadratic_alpha_point(k);
    require(image_of_point(phi, m) == target, "descended cover misses the target point");
    auto fb = fibre(phi, target, rng);
    require(fb.size() == 1 && fb[0].t == m && fb[0].e == 1 && fb[0].f == d,
            "fibre over the degree-2 image is not the input point");

    std::ostringstream os;
    os << "descent from F_q^2: m=" << describe(m.minpoly()) << ", degree " << d;
    return Cover{phi, {Step{StepKind::descent, os.str(), phi}}};
}

Mobius mobius_between_quadratic_points(const ClosedPoint& src, const ClosedPoint& dst) {
    require(src.degree() == 2 && dst.degree() == 2, "expected degree-2 points");
    const Field& k = src.field();
    if (src == dst) return Mobius::identity(k);
    gf::QuadExt E(k);
    Rng scratch(1);
    auto root_of = [&](const ClosedPoint& P) {
        auto fac = p1::factor(lift_poly(E, P.minpoly()), scratch);
        require(fac.factors.size() == 2, "degree-2 point did not split over F_{q^2}");
        return E.ext->neg(fac.factors[0].first.coeff(0));
    };
    const Element rs = root_of(src), rd = root_of(dst);
    const Element rr = E.ext->mul(rs, rd);
    // a*rs + b - c*rs*rd - d*rd = 0: one F_{q^2}-linear condition, i.e. two
    // F_q-linear equations in the unknowns (a, b, c, d)
    const std::array<Element, 4> cols = {rs, E.ext->one(), E.ext->neg(rr), E.ext->neg(rd)};
    const Element half = k->inv(k->from_int(2));
    auto components = [&](const Element& x) -> std::array<Element, 2> {
        const Element s = E.sigma(x);
        Element lo = E.ext->project_base(E.ext->add(x, s));
        lo = k->mul(lo, half);
        Element hi_full = E.ext->mul(E.ext->sub(x, s), E.ext->inv(E.sqrt_alpha()));
        Element hi = k->mul(E.ext->project_base(hi_full), half);
        return {lo, hi};
    };
    // 2 x 4 system over F_q; Gauss-Jordan for the kernel
    std::array<std::array<Element, 4>, 2> M;
    for (int j = 0; j < 4; ++j) {
        auto comp = components(cols[j]);
        M[0][j] = comp[0];
        M[1][j] = comp[1];
    }
    std::array<int, 4> pivot_of_col{-1, -1, -1, -1};
    int rank = 0;
    for (int col = 0; col < 4 && rank < 2; ++col) {
        int piv = -1;
        for (int i = rank; i < 2; ++i)
            if (!k->is_zero(M[i][col])) {
                piv = i;
                break;
            }
        if (piv < 0) continue;
        std::swap(M[rank], M[piv]);
        const Element li = k->inv(M[rank][col]);
        for (int j = 0; j < 4; ++j) M[rank][j] = k->mul(M[rank][j], li);
        for (int i = 0; i < 2; ++i) {
            if (i == rank || k->is_zero(M[i][col])) continue;
            const Element fct = M[i][col];
            for (int j = 0; j < 4; ++j) M[i][j] = k->sub(M[i][j], k->mul(fct, M[rank][j]));
        }
        pivot_of_col[col] = rank;
        ++rank;
    }
    std::vector<std::array<Element, 4>> kernel;
    for (int col = 0; col < 4; ++col) {
        if (pivot_of_col[col] >= 0) continue;
        std::array<Element, 4> vec{k->zero(), k->zero(), k->zero(), k->zero()};
        vec[col] = k->one();
        for (int c2 = 0; c2 < 4; ++c2)
            if (pivot_of_col[c2] >= 0) vec[c2] = k->neg(M[pivot_of_col[c2]][col]);
        kernel.push_back(vec);
    }
    require(kernel.size() >= 2, "Mobius solution space has unexpected dimension");
    // scan combinations for an invertible matrix
    u64 total = 1;
    for (size_t i = 0; i < kernel.size(); ++i) total *= k->q();
    for (u64 idx = 1; idx < total; ++idx) {
        u64 v = idx;
        std::array<Element, 4> cand{k->zero(), k->zero(), k->zero(), k->zero()};
        for (const auto& vec : kernel) {
            const Element lam = k->element_at(v % k->q());
            v /= k->q();
            for (int j = 0; j < 4; ++j) cand[j] = k->add(cand[j], k->mul(lam, vec[j]));
        }
        const Element det = k->sub(k->mul(cand[0], cand[3]), k->mul(cand[1], cand[2]));
        if (k->is_zero(det)) continue;
        Mobius nu(k, cand[0], cand[1], cand[2], cand[3]);
        if (image_of_point(nu.to_map(), src) == dst) return nu;
    }
    throw SynthesisError("Mobius search between degree-2 points exhausted");
}

Cover quadruple_point_cover(const ClosedPoint& P2, Rng& rng) {
    require(P2.degree() == 2, "quadruple point cover needs a degree-2 point");
    const Field& k = P2.field();
    const ClosedPoint m4 = p1::first_point_of_degree(k, 4);
    Cover theta = reduce_degree_cover(m4, rng);
    Mobius nu = mobius_between_quadratic_points(quadratic_alpha_point(k), P2);
    Cover out = compose_covers(mobius_cover(nu, "move t^2-alpha to " + describe(P2.minpoly())),
                               theta);
    auto fb = fibre(out.map, P2, rng);
    require(fb.size() == 1 && fb[0].e == 1 && fb[0].f == 2,
            "quadruple point cover fibre has the wrong shape");
    return out;
}

// ---------------------------------------------------------------------------
// parity towers over rational points
// ---------------------------------------------------------------------------

namespace {

std::vector<RatPoint> dedup_sorted(const Field& k, std::vector<RatPoint> pts) {
    std::sort(pts.begin(), pts.end(), [&](const RatPoint& a, const RatPoint& b) {
        return rat_point_index(k, a) < rat_point_index(k, b);
    });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

std::vector<RatPoint> rational_preimages(const Cover& psi, const RatPoint& m, Rng& rng) {
    std::vector<RatPoint> out;
    for (const auto& fp : fibre(psi.map, ClosedPoint::rational(psi.field(), m), rng))
        if (auto r = fp.t.as_rational()) out.push_back(*r);
    return out;
}

// pick the twist class with the smaller split set over S
std::pair<Cover, std::vector<RatPoint>> balanced_double_cover(const Field& k, const RatPoint& b1,
                                                              const RatPoint& b2,
                                                              const std::vector<RatPoint>& S,
                                                              Rng& rng) {
    std::optional<Cover> best;
    std::vector<RatPoint> best_split;
    for (bool tw : {false, true}) {
        Cover psi = double_cover(k, b1, b2, tw, rng);
        std::vector<RatPoint> split;
        for (const auto& m : S) {
            auto fb = fibre(psi.map, ClosedPoint::rational(k, m), rng);
            if (fb.size() == 2) split.push_back(m);
        }
        if (!best || split.size() < best_split.size()) {
            best = std::move(psi);
            best_split = std::move(split);
        }
    }
    return {std::move(*best), std::move(best_split)};
}

Cover kill_impl(const Field& k, std::vector<RatPoint> S, const RatPoint& P, const RatPoint& Q,
                int depth, int max_depth, Rng& rng) {
    S = dedup_sorted(k, S);
    S.erase(std::remove_if(S.begin(), S.end(),
                           [&](const RatPoint& x) { return x == P || x == Q; }),
            S.end());
    if (S.empty()) return double_cover(k, P, Q, false, rng);
    if (depth > max_depth)
        throw SynthesisError(
            "kill_rational_residues stalled: total ramification over the designated points "
            "together with parity over the given set is not attainable for this instance");
    auto [psi, split] = balanced_double_cover(k, P, Q, S, rng);
    if (split.empty()) return psi;
    std::vector<RatPoint> next;
    for (const auto& m : split) {
        auto pre = rational_preimages(psi, m, rng);
        require(pre.size() == 2, "split point without two rational preimages");
        next.insert(next.end(), pre.begin(), pre.end());
    }
    RatPoint Pn = rational_preimages(psi, P, rng).at(0);
    RatPoint Qn = rational_preimages(psi, Q, rng).at(0);
    Cover theta = kill_impl(k, std::move(next), Pn, Qn, depth + 1, max_depth, rng);
    return compose_covers(psi, theta);
}

}  // namespace

Cover kill_rational_residues(const Field& k, const std::vector<RatPoint>& B_rat, const RatPoint& P,
                             const RatPoint& Q, Rng& rng) {
    require(P != Q, "designated points must be distinct");
    const int max_depth = 1 + static_cast<int>((B_rat.size() + 1) / 2);
    return kill_impl(k, B_rat, P, Q, 1, max_depth, rng);
}

Cover rational_parity_cover(const Field& k, const std::vector<RatPoint>& S_in, Rng& rng) {
    std::vector<RatPoint> S = dedup_sorted(k, S_in);
    if (S.empty()) return Cover::identity(k);
    if (S.size() == 1) {
        RatPoint spare = first_point_not_in(k, S);
        return double_cover(k, S[0], spare, false, rng);
    }
    // branch at the first two members, so the set shrinks by two per layer
    const RatPoint b1 = S[0], b2 = S[1];
    std::vector<RatPoint> rest(S.begin() + 2, S.end());
    auto [psi, split] = balanced_double_cover(k, b1, b2, rest, rng);
    if (split.empty()) return psi;
    std::vector<RatPoint> next;
    for (const auto& m : split) {
        auto pre = rational_preimages(psi, m, rng);
        require(pre.size() == 2, "split point without two rational preimages");
        next.insert(next.end(), pre.begin(), pre.end());
    }
    Cover theta = rational_parity_cover(k, next, rng);
    return compose_covers(psi, theta);
}

// ---------------------------------------------------------------------------
// obligation search: parity over a rational set plus rational fibre points
// ---------------------------------------------------------------------------

namespace {

struct ChainCand {
    u64 pt;          // rational point index
    bool need_even;  // remaining ramification contribution must still turn even
    bool operator<(const ChainCand& o) const {
        return pt != o.pt ? pt < o.pt : need_even < o.need_even;
    }
};

struct SearchState {
    std::set<u64> parity;
    std::vector<std::set<ChainCand>> chains;

    bool is_goal() const {
        if (!parity.empty()) return false;
        for (const auto& ch : chains) {
            bool ok = false;
            for (const auto& c : ch)
                if (!c.need_even) ok = true;
            if (!ok) return false;
        }
        return true;
    }

    std::string key() const {
        std::ostringstream os;
        for (u64 x : parity) os << x << ",";
        os << "|";
        for (const auto& ch : chains) {
            for (const auto& c : ch) os << c.pt << (c.need_even ? "e" : "o") << ",";
            os << ";";
        }
        return os.str();
    }
};

struct Move {
    u64 b1, b2;
    bool twisted;
};

class TowerSearch {
  public:
    TowerSearch(Field k, Rng& rng, int node_budget)
        : k_(std::move(k)), rng_(rng), node_budget_(node_budget) {}

    std::optional<std::vector<Move>> run(const SearchState& start, int max_depth) {
        nodes_ = 0;
        for (int depth = 0; depth <= max_depth; ++depth) {
            fail_memo_.clear();
            std::vector<Move> moves;
            if (dfs(start, depth, moves)) return moves;
        }
        return std::nullopt;
    }

    int nodes() const { return nodes_; }

    Cover cover_for(const Move& mv) {
        auto key = std::make_tuple(mv.b1, mv.b2, mv.twisted);
        auto it = cover_cache_.find(key);
        if (it != cover_cache_.end()) return it->second;
        Cover c = double_cover(k_, rat_point_at_index(k_, mv.b1), rat_point_at_index(k_, mv.b2),
                               mv.twisted, rng_);
        cover_cache_.emplace(key, c);
        return c;
    }

  private:
    // fibre of a rational point under a move's double cover
    struct FibreInfo {
        enum Kind { ram, inert, split } kind;
        std::vector<u64> pre;  // rational preimage indices
    };

    const FibreInfo& fibre_info(const Move& mv, u64 pt) {
        auto key = std::make_tuple(mv.b1, mv.b2, mv.twisted, pt);
        auto it = fibre_cache_.find(key);
        if (it != fibre_cache_.end()) return it->second;
        Cover psi = cover_for(mv);
        auto fb = fibre(psi.map, ClosedPoint::rational(k_, rat_point_at_index(k_, pt)), rng_);
        FibreInfo info;
        if (fb.size() == 2) {
            info.kind = FibreInfo::split;
            for (const auto& fp : fb) info.pre.push_back(rat_point_index(k_, *fp.t.as_rational()));
        } else if (fb[0].e == 2) {
            info.kind = FibreInfo::ram;
            info.pre.push_back(rat_point_index(k_, *fb[0].t.as_rational()));
        } else {
            info.kind = FibreInfo::inert;
        }
        return fibre_cache_.emplace(key, std::move(info)).first->second;
    }

    bool dfs(const SearchState& st, int remaining, std::vector<Move>& moves) {
        if (st.is_goal()) return true;
        if (remaining == 0) return false;
        if (++nodes_ > node_budget_)
            throw SynthesisError("cover tower search exceeded its node budget");
        auto it = fail_memo_.find(st.key());
        if (it != fail_memo_.end() && it->second >= remaining) return false;
        for (const Move& mv : candidate_moves(st)) {
            auto next = transition(st, mv);
            if (!next) continue;
            moves.push_back(mv);
            if (dfs(*next, remaining - 1, moves)) return true;
            moves.pop_back();
        }
        auto [pos, inserted] = fail_memo_.emplace(st.key(), remaining);
        if (!inserted && pos->second < remaining) pos->second = remaining;
        return false;
    }

    std::vector<Move> candidate_moves(const SearchState& st) {
        std::set<u64> chain_pts, parity_pts;
        for (const auto& ch : st.chains)
            for (const auto& c : ch) chain_pts.insert(c.pt);
        for (u64 x : st.parity) parity_pts.insert(x);
        std::vector<u64> pool(chain_pts.begin(), chain_pts.end());
        for (u64 x : parity_pts)
            if (!chain_pts.count(x)) pool.push_back(x);
        for (u64 i = 0; i <= k_->q(); ++i)
            if (!chain_pts.count(i) && !parity_pts.count(i)) pool.push_back(i);
        auto rank = [&](u64 x) {
            if (chain_pts.count(x)) return 0;
            if (parity_pts.count(x)) return 1;
            return 2;
        };
        std::vector<Move> out;
        for (size_t i = 0; i < pool.size(); ++i)
            for (size_t j = i + 1; j < pool.size(); ++j)
                for (bool tw : {false, true}) out.push_back(Move{pool[i], pool[j], tw});
        std::stable_sort(out.begin(), out.end(), [&](const Move& a, const Move& b) {
            return rank(a.b1) + rank(a.b2) < rank(b.b1) + rank(b.b2);
        });
        return out;
    }

    std::optional<SearchState> transition(const SearchState& st, const Move& mv) {
        SearchState next;
        for (u64 x : st.parity) {
            const FibreInfo& info = fibre_info(mv, x);
            if (info.kind == FibreInfo::split)
                for (u64 pre : info.pre) next.parity.insert(pre);
            // ram: e = 2; inert: f = 2; both settle the obligation for good
        }
        for (const auto& ch : st.chains) {
            std::set<ChainCand> nch;
            for (const auto& c : ch) {
                const FibreInfo& info = fibre_info(mv, c.pt);
                switch (info.kind) {
                    case FibreInfo::ram:
                        nch.insert(ChainCand{info.pre[0], false});
                        break;
                    case FibreInfo::split:
                        for (u64 pre : info.pre) nch.insert(ChainCand{pre, c.need_even});
                        break;
                    case FibreInfo::inert:
                        break;  // candidate leaves the rational locus
                }
            }
            if (nch.empty()) return std::nullopt;
            next.chains.push_back(std::move(nch));
        }
        return next;
    }

    Field k_;
    Rng& rng_;
    int node_budget_;
    int nodes_ = 0;
    std::map<std::string, int> fail_memo_;
    std::map<std::tuple<u64, u64, bool>, Cover> cover_cache_;
    std::map<std::tuple<u64, u64, bool, u64>, FibreInfo> fibre_cache_;
};

Cover build_tower(const Field& k, TowerSearch& search, const std::vector<Move>& moves) {
    Cover acc = Cover::identity(k);
    for (const auto& mv : moves) {
        Cover psi = search.cover_for(mv);
        acc = acc.chain.empty() ? psi : compose_covers(acc, psi);
    }
    return acc;
}

}  // namespace

// ---------------------------------------------------------------------------
// synthesis pipelines
// ---------------------------------------------------------------------------

bool parity_holds(const RationalMap& phi, const std::vector<ClosedPoint>& pts, Rng& rng) {
    for (const auto& s : pts)
        for (const auto& fp : fibre(phi, s, rng))
            if ((fp.e * fp.f) % 2 != 0) return false;
    return true;
}

namespace {

struct LocusParts {
    std::vector<RatPoint> rational;
    std::optional<ClosedPoint> deg2;
    std::optional<ClosedPoint> odd;  // degree >= 3
    std::vector<ClosedPoint> all;
};

LocusParts split_locus(const conic::NonSplitLocus& B) {
    LocusParts parts;
    for (const auto& r : B.points) {
        parts.all.push_back(r.point);
        if (auto rp = r.point.as_rational()) {
            parts.rational.push_back(*rp);
        } else if (r.point.degree() == 2) {
            require(!parts.deg2, "locus has two degree-2 points");
            parts.deg2 = r.point;
        } else {
            require(r.point.degree() % 2 == 1, "unexpected even-degree point in locus");
            require(!parts.odd, "locus has two odd-degree points");
            parts.odd = r.point;
        }
    }
    return parts;
}

bool fibre_parity_even(const Cover& psi, const ClosedPoint& m, Rng& rng) {
    for (const auto& fp : fibre(psi.map, m, rng))
        if ((fp.e * fp.f) % 2 != 0) return false;
    return true;
}

}  // namespace

Cover synth_unirational_cover(const Field& k, const conic::NonSplitLocus& B, Rng& rng) {
    if (!condition_star(B)) throw HypothesisError("condition (star) does not hold");
    if (B.points.empty()) return Cover::identity(k);
    LocusParts parts = split_locus(B);

    Cover psi = Cover::identity(k);
    if (parts.deg2) psi = quadruple_point_cover(*parts.deg2, rng);
    if (parts.odd) {
        if (psi.degree() == 1) {
            RatPoint b1, b2;
            if (parts.rational.size() >= 2) {
                b1 = parts.rational[0];
                b2 = parts.rational[1];
            } else if (parts.rational.size() == 1) {
                b1 = parts.rational[0];
                b2 = first_point_not_in(k, parts.rational);
            } else {
                b1 = RatPoint::at(k->zero());
                b2 = RatPoint::infinity();
            }
            psi = double_cover(k, b1, b2, false, rng);
        }
        if (!fibre_parity_even(psi, *parts.odd, rng)) {
            psi = twist_cover(psi, rng);
            require(fibre_parity_even(psi, *parts.odd, rng),
                    "twist failed to make the odd-degree point inert");
            if (parts.deg2) {
                auto fb = fibre(psi.map, *parts.deg2, rng);
                require(fb.size() == 1 && fb[0].f == 2, "twist disturbed the degree-2 point fibre");
            }
        }
    }
    std::vector<RatPoint> leftovers;
    if (psi.chain.empty()) {
        leftovers = parts.rational;
    } else {
        for (const auto& r : parts.rational)
            for (const auto& fp : fibre(psi.map, ClosedPoint::rational(k, r), rng))
                if ((fp.e * fp.f) % 2 != 0) {
                    auto rp = fp.t.as_rational();
                    require(rp.has_value(), "odd fibre point is not rational");
                    leftovers.push_back(*rp);
                }
    }
    Cover theta = rational_parity_cover(k, leftovers, rng);
    Cover phi = psi.chain.empty() ? theta
                                  : (theta.chain.empty() ? psi : compose_covers(psi, theta));
    require(parity_holds(phi.map, parts.all, rng), "synthesized cover failed the parity check");
    require(phi.chain_consistent(), "audit chain does not recompose");
    return phi;
}

Cover synth_requiv_cover(const Field& k, const conic::NonSplitLocus& B, const RatPoint& s0,
                         const RatPoint& s1, Rng& rng, RequivDiagnostics* diag) {
    require(s0 != s1, "the two designated rational points must be distinct");
    if (!condition_star_star(B)) throw HypothesisError("condition (star star) does not hold");
    RequivDiagnostics local;
    RequivDiagnostics& dg = diag ? *diag : local;
    LocusParts parts = split_locus(B);

    Cover psi = Cover::identity(k);
    if (parts.odd) {
        bool done = false;
        for (bool tw : {false, true}) {
            Cover cand = double_cover(k, s0, s1, tw, rng);
            if (fibre_parity_even(cand, *parts.odd, rng)) {
                psi = std::move(cand);
                done = true;
                break;
            }
        }
        require(done, "no twist class makes the odd-degree point inert");
    } else if (parts.deg2) {
        const ClosedPoint& m = *parts.deg2;
        Cover psi0 = quadruple_point_cover(m, rng);
        bool found = false;
        BranchLocus br = branch_locus(psi0.map, rng);
        for (const auto& r : br.rational)
            if (r == s1) {
                psi = psi0;
                found = true;
            }
        if (!found && !br.rational.empty()) {
            // search PGL_2 for sigma fixing m and taking a branch point to s1
            for (u64 ia = 0; ia < k->q() && !found; ++ia)
                for (u64 ib = 0; ib < k->q() && !found; ++ib)
                    for (u64 ic = 0; ic < k->q() && !found; ++ic)
                        for (u64 id = 0; id < k->q() && !found; ++id) {
                            Element a = k->element_at(ia), b = k->element_at(ib);
                            Element c = k->element_at(ic), d = k->element_at(id);
                            if (k->is_zero(k->sub(k->mul(a, d), k->mul(b, c)))) continue;
                            Mobius sigma(k, a, b, c, d);
                            bool hits = false;
                            for (const auto& r : br.rational)
                                if (sigma.apply(r) == s1) hits = true;
                            if (!hits) continue;
                            if (!(image_of_point(sigma.to_map(), m) == m)) continue;
                            psi = compose_covers(
                                mobius_cover(sigma, "fix the degree-2 point, move a branch "
                                                    "point to the designee"),
                                psi0);
                            found = true;
                        }
        }
        if (!found) {
            // direct search over degree-2 covers totally ramified over s1
            dg.deg2_fallback_used = true;
            std::vector<RatPoint> seconds{s0};
            for (const auto& r : all_rat_points(k))
                if (r != s0 && r != s1) seconds.push_back(r);
            for (const auto& r2 : seconds) {
                for (bool tw : {false, true}) {
                    Cover cand = double_cover(k, s1, r2, tw, rng);
                    auto fb = fibre(cand.map, m, rng);
                    if (fb.size() == 1 && fb[0].f == 2) {
                        psi = std::move(cand);
                        found = true;
                        break;
                    }
                }
                if (found) break;
            }
            if (!found) {
                dg.deg2_fallback_exhausted = true;
                throw SynthesisError(
                    "degree-2 case: no degree-2 cover ramified over the designee keeps the "
                    "degree-2 point inert (fallback search exhausted)");
            }
        }
        {
            auto fbm = fibre(psi.map, m, rng);
            require(fbm.size() == 1 && fbm[0].f == 2, "stage one lost the degree-2 point fibre");
        }
        // ensure the fibre over s0 keeps a rational point
        auto fb0 = fibre(psi.map, ClosedPoint::rational(k, s0), rng);
        if (fb0.size() == 1 && fb0[0].e == 1) {
            psi = twist_cover(psi, rng);
            auto fbm = fibre(psi.map, m, rng);
            require(fbm.size() == 1 && fbm[0].f == 2, "twist disturbed the degree-2 point");
            auto fb1 = fibre(psi.map, ClosedPoint::rational(k, s1), rng);
            require(fb1.size() == 1 && fb1[0].e == 2, "twist disturbed ramification over s1");
        }
    }

    // remaining obligations, transported through the first stage
    SearchState st;
    for (const auto& r : parts.rational) {
        if (psi.chain.empty()) {
            st.parity.insert(rat_point_index(k, r));
            continue;
        }
        for (const auto& fp : fibre(psi.map, ClosedPoint::rational(k, r), rng))
            if ((fp.e * fp.f) % 2 != 0) {
                auto rp = fp.t.as_rational();
                require(rp.has_value(), "odd fibre point is not rational");
                st.parity.insert(rat_point_index(k, *rp));
            }
    }
    auto chain_through = [&](const RatPoint& s) {
        const bool in_B =
            std::find(parts.rational.begin(), parts.rational.end(), s) != parts.rational.end();
        std::set<ChainCand> ch;
        if (psi.chain.empty()) {
            ch.insert(ChainCand{rat_point_index(k, s), in_B});
        } else {
            for (const auto& fp : fibre(psi.map, ClosedPoint::rational(k, s), rng)) {
                if (fp.f != 1) continue;
                auto rp = fp.t.as_rational();
                ch.insert(ChainCand{rat_point_index(k, *rp), in_B && (fp.e % 2 != 0)});
            }
        }
        require(!ch.empty(), "stage-one cover removed all rational points over a designee");
        st.chains.push_back(std::move(ch));
    };
    chain_through(s0);
    chain_through(s1);

    TowerSearch search(k, rng, 200000);
    auto moves = search.run(st, 6);
    dg.search_nodes = search.nodes();
    if (!moves)
        throw SynthesisError(
            "tower search exhausted without meeting parity and rational-point obligations");
    Cover theta = build_tower(k, search, *moves);
    Cover phi = psi.chain.empty() ? theta
                                  : (theta.chain.empty() ? psi : compose_covers(psi, theta));

    require(parity_holds(phi.map, parts.all, rng), "synthesized cover failed the parity check");
    for (const RatPoint& s : {s0, s1}) {
        bool has_rational = false;
        for (const auto& fp : fibre(phi.map, ClosedPoint::rational(k, s), rng))
            if (fp.f == 1) has_rational = true;
        require(has_rational, "synthesized cover has no rational point over a designee");
    }
    require(phi.chain_consistent(), "audit chain does not recompose");
    return phi;
}

}  // namespace conicover::covers
