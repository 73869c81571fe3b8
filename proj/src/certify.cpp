#include "conicover/certify.hpp"

#include <algorithm>
#include <chrono>
#include <sstream>

namespace conicover::certify {

using p1::fibre;
using p1::rat_point_index;

namespace {

std::string point_str(const ClosedPoint& P) {
    if (P.is_infinite()) return "inf";
    std::ostringstream os;
    os << point_to_json(P).dump();
    return os.str();
}

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

}  // namespace

// ---------------------------------------------------------------------------
// verifiers
// ---------------------------------------------------------------------------

CheckResult verify_parity(const covers::Cover& cover, const conic::NonSplitLocus& B, Rng& rng) {
    CheckResult r{"parity", true, ""};
    std::ostringstream os;
    for (const auto& rc : B.points) {
        require(cover.field()->same_as(*rc.point.field()), "verify_parity: mixed fields");
        for (const auto& fp : fibre(cover.map, rc.point, rng)) {
            if ((fp.e * fp.f) % 2 != 0) {
                r.pass = false;
                os << "odd e*f=" << fp.e * fp.f << " over " << point_str(rc.point) << " at "
                   << point_str(fp.t) << "; ";
            }
        }
    }
    r.detail = r.pass ? "2 | e*f at every preimage of the non-split locus" : os.str();
    return r;
}

CheckResult verify_pullback_vanishing(const conic::ConicBundle& X, const covers::Cover& cover,
                                      Rng& rng) {
    CheckResult r{"pullback-residues-vanish", true, ""};
    conic::ConicBundle pulled = conic::pullback_bundle(X, cover.map);
    conic::NonSplitLocus B = conic::nonsplit_locus(pulled, rng);
    r.pass = B.points.empty();
    if (r.pass) {
        r.detail = "pulled-back bundle has an empty non-split locus";
    } else {
        std::ostringstream os;
        os << "pulled-back locus still has delta=" << B.delta << " at";
        for (const auto& rc : B.points) os << " " << point_str(rc.point);
        r.detail = os.str();
    }
    return r;
}

CheckResult verify_requiv(const covers::Cover& cover, const RatPoint& s0, const RatPoint& s1,
                          Rng& rng) {
    require(s0 != s1, "verify_requiv needs distinct points");
    CheckResult r{"fibre-rational-points", true, ""};
    std::ostringstream os;
    const Field& k = cover.field();
    for (const RatPoint& s : {s0, s1}) {
        bool has = false;
        for (const auto& fp : fibre(cover.map, ClosedPoint::rational(k, s), rng))
            if (fp.f == 1) has = true;
        if (!has) {
            r.pass = false;
            os << "no rational point in the fibre over "
               << point_str(ClosedPoint::rational(k, s)) << "; ";
        }
    }
    r.detail = r.pass ? "both designated fibres contain a rational point" : os.str();
    return r;
}

// ---------------------------------------------------------------------------
// pipelines
// ---------------------------------------------------------------------------

namespace {

Report analyze_impl(const conic::ConicBundle& X, u64 seed, Rng& rng) {
    Report rep;
    rep.k = X.k;
    rep.bundle = X;
    rep.seed = seed;
    const auto t0 = std::chrono::steady_clock::now();
    rep.locus = conic::nonsplit_locus(X, rng);
    rep.star = conic::condition_star(rep.locus);
    rep.star_star = conic::condition_star_star(rep.locus);
    rep.timings_ms.emplace_back("analyze", ms_since(t0));
    return rep;
}

}  // namespace

Report analyze(const conic::ConicBundle& X, u64 seed) {
    Rng rng = Rng::seeded(seed);
    Report rep = analyze_impl(X, seed, rng);
    rep.status = Status::ok;
    return rep;
}

Report certify_unirational(const conic::ConicBundle& X, u64 seed) {
    Rng rng = Rng::seeded(seed);
    Report rep = analyze_impl(X, seed, rng);
    if (!rep.star) {
        rep.status = Status::hypothesis_failed;
        rep.failure = "condition (star) does not hold for the non-split locus";
        return rep;
    }
    try {
        const auto t0 = std::chrono::steady_clock::now();
        covers::Cover cover = covers::synth_unirational_cover(X.k, rep.locus, rng);
        rep.timings_ms.emplace_back("synth", ms_since(t0));
        const auto t1 = std::chrono::steady_clock::now();
        rep.checks.push_back(verify_parity(cover, rep.locus, rng));
        rep.checks.push_back(verify_pullback_vanishing(X, cover, rng));
        rep.timings_ms.emplace_back("verify", ms_since(t1));
        bool all = true;
        for (const auto& c : rep.checks) all = all && c.pass;
        if (all) {
            rep.certificate = Certificate{cover, rep.checks};
            rep.status = Status::ok;
        } else {
            rep.status = Status::verification_failed;
            rep.failure = "a verifier rejected the synthesized cover";
        }
    } catch (const VerificationError& e) {
        rep.status = Status::verification_failed;
        rep.failure = e.what();
    }
    return rep;
}

Report certify_requiv(const conic::ConicBundle& X, const RatPoint& s0, const RatPoint& s1,
                      u64 seed) {
    Rng rng = Rng::seeded(seed);
    Report rep = analyze_impl(X, seed, rng);
    if (!rep.star_star) {
        rep.status = Status::hypothesis_failed;
        rep.failure = "condition (star star) does not hold for the non-split locus";
        return rep;
    }
    try {
        const auto t0 = std::chrono::steady_clock::now();
        covers::Cover cover =
            covers::synth_requiv_cover(X.k, rep.locus, s0, s1, rng, &rep.requiv_diag);
        rep.timings_ms.emplace_back("synth", ms_since(t0));
        const auto t1 = std::chrono::steady_clock::now();
        rep.checks.push_back(verify_parity(cover, rep.locus, rng));
        rep.checks.push_back(verify_pullback_vanishing(X, cover, rng));
        rep.checks.push_back(verify_requiv(cover, s0, s1, rng));
        rep.timings_ms.emplace_back("verify", ms_since(t1));
        bool all = true;
        for (const auto& c : rep.checks) all = all && c.pass;
        if (all) {
            rep.certificate = Certificate{cover, rep.checks};
            rep.status = Status::ok;
        } else {
            rep.status = Status::verification_failed;
            rep.failure = "a verifier rejected the synthesized cover";
        }
    } catch (const VerificationError& e) {
        rep.status = Status::verification_failed;
        rep.failure = e.what();
    }
    return rep;
}

// ---------------------------------------------------------------------------
// prescribed-locus generator
// ---------------------------------------------------------------------------

conic::ConicBundle bundle_with_prescribed_locus(const Field& k,
                                                const std::vector<ClosedPoint>& request, Rng& rng,
                                                std::vector<ClosedPoint>* added) {
    // distinctness
    for (size_t i = 0; i < request.size(); ++i)
        for (size_t j = i + 1; j < request.size(); ++j)
            require(!(request[i] == request[j]), "prescribed locus has repeated points");
    const Poly one = Poly::from_int(k, 1);
    if (request.empty())
        return conic::ConicBundle(k, one, one, Poly::from_int(k, -1));

    std::vector<ClosedPoint> target = request;
    bool want_inf = false;
    std::vector<Poly> finite;
    for (const auto& P : request) {
        if (P.is_infinite())
            want_inf = true;
        else
            finite.push_back(P.minpoly());
    }
    if (target.size() % 2 == 1) {
        // reciprocity: |B| must be even
        if (!want_inf) {
            ClosedPoint inf = ClosedPoint::infinity(k);
            target.push_back(inf);
            if (added) added->push_back(inf);
            want_inf = true;
        } else {
            for (u64 i = 0;; ++i) {
                ClosedPoint cand = ClosedPoint::rational(k, p1::rat_point_at_index(k, i));
                bool taken = false;
                for (const auto& P : target) taken = taken || P == cand;
                if (!taken) {
                    target.push_back(cand);
                    finite.push_back(cand.minpoly());
                    if (added) added->push_back(cand);
                    break;
                }
            }
        }
    }
    std::sort(target.begin(), target.end(), p1::point_less);

    // a = product of the finite request points, possibly scaled by the
    // nonsquare witness (the scaling controls the square class at infinity
    // and is invisible at the finite requested points); b == nonsquare mod
    // each requested point by CRT.
    Poly a = one;
    for (const auto& f : finite) a = a * f;
    Poly modulus = a;
    Poly b0 = Poly::zero(k);
    for (const auto& f : finite) {
        ClosedPoint P = ClosedPoint::finite_unchecked(f);
        Poly rest = modulus / f;
        Poly inv_rest = p1::kappa_inv(P, rest % f);
        Poly ns = p1::kappa_canonical_nonsquare(P);
        b0 = b0 + rest * p1::kappa_reduce(P, ns * inv_rest);
    }
    b0 = b0 % modulus;
    const Poly c = Poly::from_int(k, -1);
    const Poly a_twisted = a.scaled(k->nonsquare_witness());

    for (int attempt = 0; attempt < 4000; ++attempt) {
        Poly r = Poly::zero(k);
        if (attempt > 0) {
            const int extra = 1 + attempt / 200;
            std::vector<Element> rc(static_cast<size_t>(extra) + 1, k->zero());
            for (auto& e : rc) e = k->element_at(rng.below(k->q()));
            r = Poly(k, std::move(rc));
        }
        Poly b = b0 + r * modulus;
        if (b.is_zero()) continue;
        for (const Poly* ca : std::initializer_list<const Poly*>{&a, &a_twisted}) {
            conic::ConicBundle X(k, *ca, b, c);
            conic::NonSplitLocus B = conic::nonsplit_locus(X, rng);
            if (B.points.size() != target.size()) continue;
            bool same = true;
            for (size_t i = 0; i < target.size(); ++i)
                same = same && B.points[i].point == target[i];
            if (same) return X;
        }
    }
    throw SynthesisError("prescribed-locus generator exhausted its retry budget");
}

// ---------------------------------------------------------------------------
// section oracle
// ---------------------------------------------------------------------------

SectionResult section_search_oracle(const conic::ConicBundle& X, int max_deg, i64 budget_ms) {
    require(max_deg >= 0, "max_deg must be nonnegative");
    const Field& k = X.k;
    const int per = max_deg + 1;
    const int ncoords = 3 * per;
    const auto t0 = std::chrono::steady_clock::now();
    SectionResult res;
    res.status = SectionResult::Status::exhausted;

    std::vector<Element> coords(static_cast<size_t>(ncoords), k->zero());
    auto build = [&](int from, int len) {
        std::vector<Element> c(coords.begin() + from, coords.begin() + from + len);
        return Poly(k, std::move(c));
    };
    for (int lead = 0; lead < ncoords; ++lead) {
        // coords[0..lead) = 0, coords[lead] = 1, the rest run through F_q
        std::fill(coords.begin(), coords.end(), k->zero());
        coords[lead] = k->one();
        const int free = ncoords - lead - 1;
        u64 total = 1;
        for (int i = 0; i < free; ++i) {
            require(total <= (u64(1) << 62) / k->q(), "section search space too large");
            total *= k->q();
        }
        for (u64 idx = 0;; ++idx) {
            u64 v = idx;
            for (int i = 0; i < free; ++i) {
                coords[lead + 1 + i] = k->element_at(v % k->q());
                v /= k->q();
            }
            Poly x = build(0, per), y = build(per, per), z = build(2 * per, per);
            ++res.tested;
            Poly val = X.a * x * x + X.b * y * y + X.c * z * z;
            if (val.is_zero()) {
                res.status = SectionResult::Status::found;
                res.triple = {x, y, z};
                return res;
            }
            if (budget_ms > 0 && (res.tested & 1023) == 0 && ms_since(t0) > static_cast<double>(budget_ms)) {
                res.status = SectionResult::Status::budget_exceeded;
                return res;
            }
            if (idx + 1 == total) break;
        }
    }
    return res;
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

json field_to_json(const Field& k) {
    json j;
    j["p"] = k->p();
    j["n"] = k->n();
    if (k->kind() == gf::FieldSpec::Kind::ext) j["modulus"] = k->modulus();
    return j;
}

Field field_from_json(const json& j) {
    try {
        const i64 p = j.at("p").get<i64>();
        const int n = j.value("n", 1);
        if (n == 1) return gf::FieldSpec::make_prime(p);
        require(j.contains("modulus"), "extension field requires a modulus");
        return gf::FieldSpec::make_ext(p, j.at("modulus").get<std::vector<i64>>());
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw InputError(std::string("bad field description: ") + e.what());
    }
}

json element_to_json(const Field& k, const Element& e) {
    if (k->n() == 1) return e.c[0];
    return e.c;
}

Element element_from_json(const Field& k, const json& j) {
    std::vector<i64> c;
    if (j.is_number_integer())
        c.push_back(j.get<i64>());
    else if (j.is_array())
        c = j.get<std::vector<i64>>();
    else
        throw InputError("field element must be an integer or a coefficient list");
    require(static_cast<int>(c.size()) <= k->n(), "element coefficient list too long");
    c.resize(static_cast<size_t>(k->n()), 0);
    for (auto& x : c) x = gf::mod_pos(x, k->p());
    return Element{std::move(c)};
}

json poly_to_json(const Poly& f) {
    json j = json::array();
    for (int i = 0; i <= f.degree(); ++i) j.push_back(element_to_json(f.field(), f.coeff(i)));
    return j;
}

Poly poly_from_json(const Field& k, const json& j) {
    if (!j.is_array()) throw InputError("polynomial must be a coefficient array");
    std::vector<Element> c;
    for (const auto& e : j) c.push_back(element_from_json(k, e));
    return Poly(k, std::move(c));
}

json point_to_json(const ClosedPoint& P) {
    if (P.is_infinite()) return "inf";
    return poly_to_json(P.minpoly());
}

ClosedPoint point_from_json(const Field& k, const json& j) {
    if (j.is_string()) {
        require(j.get<std::string>() == "inf", "unknown point literal");
        return ClosedPoint::infinity(k);
    }
    Poly f = poly_from_json(k, j);
    if (f.degree() < 1 || !(f.lc() == k->one()) || !p1::is_irreducible(f))
        throw InputError("closed point polynomial must be monic irreducible");
    return ClosedPoint::finite_unchecked(std::move(f));
}

json map_to_json(const RationalMap& m) {
    json j;
    j["num"] = poly_to_json(m.num());
    j["den"] = poly_to_json(m.den());
    return j;
}

RationalMap map_from_json(const Field& k, const json& j) {
    try {
        return RationalMap(poly_from_json(k, j.at("num")), poly_from_json(k, j.at("den")));
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw InputError(std::string("bad rational map: ") + e.what());
    }
}

json cover_to_json(const covers::Cover& c) {
    json j;
    j["field"] = field_to_json(c.field());
    j["num"] = poly_to_json(c.map.num());
    j["den"] = poly_to_json(c.map.den());
    json chain = json::array();
    for (const auto& s : c.chain) {
        json js;
        js["kind"] = covers::step_kind_name(s.kind);
        js["params"] = s.params;
        js["map"] = map_to_json(s.map);
        chain.push_back(js);
    }
    j["chain"] = chain;
    return j;
}

covers::Cover cover_from_json(const json& j) {
    try {
        Field k = field_from_json(j.at("field"));
        covers::Cover c{map_from_json(k, j), {}};
        for (const auto& js : j.value("chain", json::array())) {
            covers::Step s{covers::step_kind_from_name(js.at("kind").get<std::string>()),
                           js.value("params", ""), map_from_json(k, js.at("map"))};
            c.chain.push_back(std::move(s));
        }
        if (!c.chain.empty())
            require(c.chain_consistent(), "cover audit chain does not recompose to the map");
        return c;
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw InputError(std::string("bad cover: ") + e.what());
    }
}

json bundle_to_json(const conic::ConicBundle& X) {
    json j;
    j["field"] = field_to_json(X.k);
    j["a"] = poly_to_json(X.a);
    j["b"] = poly_to_json(X.b);
    j["c"] = poly_to_json(X.c);
    return j;
}

conic::ConicBundle bundle_from_json(const json& j) {
    try {
        Field k = field_from_json(j.at("field"));
        return conic::ConicBundle(k, poly_from_json(k, j.at("a")), poly_from_json(k, j.at("b")),
                                  poly_from_json(k, j.at("c")));
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw InputError(std::string("bad bundle: ") + e.what());
    }
}

json locus_to_json(const conic::NonSplitLocus& B) {
    json j;
    json pts = json::array();
    for (const auto& r : B.points) {
        json e;
        e["point"] = point_to_json(r.point);
        e["degree"] = r.point.degree();
        e["residue_representative"] = poly_to_json(r.representative);
        e["trivial"] = r.trivial;
        pts.push_back(e);
    }
    j["points"] = pts;
    j["delta"] = B.delta;
    return j;
}

conic::NonSplitLocus locus_from_json(const Field& k, const json& j) {
    conic::NonSplitLocus B;
    for (const auto& e : j.at("points")) {
        conic::ResidueClass rc;
        rc.point = point_from_json(k, e.at("point"));
        rc.representative = poly_from_json(k, e.at("residue_representative"));
        rc.trivial = e.value("trivial", false);
        B.points.push_back(std::move(rc));
        B.delta += B.points.back().point.degree();
    }
    return B;
}

json report_to_json(const Report& r) {
    json j;
    j["field"] = field_to_json(r.k);
    if (r.bundle) j["bundle"] = bundle_to_json(*r.bundle);
    json locus = locus_to_json(r.locus)["points"];
    j["locus"] = locus;
    j["delta"] = r.locus.delta;
    j["star"] = r.star;
    j["star_star"] = r.star_star;
    if (r.certificate) {
        json c;
        c["cover"] = cover_to_json(r.certificate->cover);
        json checks = json::array();
        for (const auto& ck : r.certificate->checks)
            checks.push_back({{"name", ck.name}, {"pass", ck.pass}, {"detail", ck.detail}});
        c["checks"] = checks;
        j["certificate"] = c;
    } else {
        j["certificate"] = nullptr;
    }
    json checks = json::array();
    for (const auto& ck : r.checks)
        checks.push_back({{"name", ck.name}, {"pass", ck.pass}, {"detail", ck.detail}});
    j["checks"] = checks;
    j["status"] = r.status == Status::ok
                      ? "ok"
                      : (r.status == Status::hypothesis_failed ? "hypothesis-not-met"
                                                               : "verification-failed");
    if (!r.failure.empty()) j["failure"] = r.failure;
    if (r.requiv_diag.deg2_fallback_used) {
        j["deg2_fallback_used"] = true;
        j["deg2_fallback_exhausted"] = r.requiv_diag.deg2_fallback_exhausted;
    }
    j["seed"] = r.seed;
    json t;
    for (const auto& [name, ms] : r.timings_ms) t[name] = ms;
    j["timings"] = t;
    return j;
}

RatPoint parse_rat_point(const Field& k, const std::string& s) {
    if (s == "inf" || s == "infty" || s == "infinity") return RatPoint::infinity();
    json j;
    try {
        j = json::parse(s);
    } catch (const std::exception&) {
        throw InputError("cannot parse rational point: " + s);
    }
    Element e = element_from_json(k, j);
    return RatPoint::at(e);
}

}  // namespace conicover::certify
