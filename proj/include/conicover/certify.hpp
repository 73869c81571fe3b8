#pragma once

#include <optional>

#include <json.hpp>

#include "conicover/covers.hpp"

namespace conicover::certify {

using gf::Element;
using gf::Field;
using p1::ClosedPoint;
using p1::Poly;
using p1::RationalMap;
using p1::RatPoint;
using json = nlohmann::ordered_json;

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

/// Emitted only when every mandatory check passed.
struct Certificate {
    covers::Cover cover;
    std::vector<CheckResult> checks;
};

enum class Status { ok, hypothesis_failed, verification_failed };

struct Report {
    Field k;
    std::optional<conic::ConicBundle> bundle;
    conic::NonSplitLocus locus;
    bool star = false;
    bool star_star = false;
    std::optional<Certificate> certificate;
    std::vector<CheckResult> checks;
    Status status = Status::ok;
    std::string failure;
    u64 seed = 0;
    std::vector<std::pair<std::string, double>> timings_ms;
    covers::RequivDiagnostics requiv_diag;
};

// ---- independent verifiers (consume only (bundle, cover) data) ----
CheckResult verify_parity(const covers::Cover& cover, const conic::NonSplitLocus& B, Rng& rng);
CheckResult verify_pullback_vanishing(const conic::ConicBundle& X, const covers::Cover& cover,
                                      Rng& rng);
CheckResult verify_requiv(const covers::Cover& cover, const RatPoint& s0, const RatPoint& s1,
                          Rng& rng);

// ---- pipelines ----
Report analyze(const conic::ConicBundle& X, u64 seed);
Report certify_unirational(const conic::ConicBundle& X, u64 seed);
Report certify_requiv(const conic::ConicBundle& X, const RatPoint& s0, const RatPoint& s1,
                      u64 seed);

/// Test-support generator: a bundle whose non-split locus is exactly the
/// request. Reciprocity forces an even number of points; odd requests get the
/// infinite place (or, if taken, the first spare rational point) added, which
/// is reported through `added`.
conic::ConicBundle bundle_with_prescribed_locus(const Field& k,
                                                const std::vector<ClosedPoint>& request, Rng& rng,
                                                std::vector<ClosedPoint>* added = nullptr);

struct SectionResult {
    enum class Status { found, exhausted, budget_exceeded } status;
    std::array<Poly, 3> triple;  // valid when found
    u64 tested = 0;
};

/// Bounded-degree exhaustive search for nonzero (x, y, z) with
/// a x^2 + b y^2 + c z^2 = 0 identically; leading coefficient normalized to 1.
SectionResult section_search_oracle(const conic::ConicBundle& X, int max_deg, i64 budget_ms);

// ---- JSON (all polynomial data little-endian; elements are ints for prime
// fields and coefficient lists otherwise) ----
json field_to_json(const Field& k);
Field field_from_json(const json& j);
json element_to_json(const Field& k, const Element& e);
Element element_from_json(const Field& k, const json& j);
json poly_to_json(const Poly& f);
Poly poly_from_json(const Field& k, const json& j);
json point_to_json(const ClosedPoint& P);
ClosedPoint point_from_json(const Field& k, const json& j);
json map_to_json(const RationalMap& m);
RationalMap map_from_json(const Field& k, const json& j);
json cover_to_json(const covers::Cover& c);
covers::Cover cover_from_json(const json& j);  // expects a "field" entry
json bundle_to_json(const conic::ConicBundle& X);
conic::ConicBundle bundle_from_json(const json& j);
json locus_to_json(const conic::NonSplitLocus& B);
conic::NonSplitLocus locus_from_json(const Field& k, const json& j);
json report_to_json(const Report& r);

RatPoint parse_rat_point(const Field& k, const std::string& s);

}  // namespace conicover::certify
