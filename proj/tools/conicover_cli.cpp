// Command-line front end: analyze bundles, synthesize and verify covers,
// and run the bounded section search.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "conicover/certify.hpp"

namespace cc = conicover;
using cc::certify::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitHypothesis = 1;
constexpr int kExitVerification = 2;
constexpr int kExitInput = 3;

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw cc::InputError("cannot open file: " + path);
    try {
        return json::parse(in);
    } catch (const std::exception& e) {
        throw cc::InputError("malformed JSON in " + path + ": " + e.what());
    }
}

void print_report(const cc::certify::Report& rep, bool as_json) {
    if (as_json) {
        std::cout << cc::certify::report_to_json(rep).dump(2) << "\n";
        return;
    }
    std::cout << "field: F_" << rep.k->q() << "\n";
    std::cout << "non-split locus (delta=" << rep.locus.delta << "):";
    for (const auto& r : rep.locus.points)
        std::cout << " " << cc::certify::point_to_json(r.point).dump();
    std::cout << "\nstar=" << (rep.star ? "true" : "false")
              << " star_star=" << (rep.star_star ? "true" : "false") << "\n";
    if (rep.certificate) {
        std::cout << "certificate cover degree " << rep.certificate->cover.degree() << ": "
                  << cc::certify::map_to_json(rep.certificate->cover.map).dump() << "\n";
        for (const auto& ck : rep.certificate->checks)
            std::cout << "  [" << (ck.pass ? "pass" : "FAIL") << "] " << ck.name << ": "
                      << ck.detail << "\n";
    } else if (!rep.failure.empty()) {
        std::cout << "failure: " << rep.failure << "\n";
    }
}

int status_code(const cc::certify::Report& rep) {
    switch (rep.status) {
        case cc::certify::Status::ok: return kExitOk;
        case cc::certify::Status::hypothesis_failed: return kExitHypothesis;
        case cc::certify::Status::verification_failed: return kExitVerification;
    }
    return kExitVerification;
}

int run_selftest(cc::u64 seed) {
    cc::Rng rng = cc::Rng::seeded(seed);
    auto k = cc::gf::FieldSpec::make_prime(3);
    // (t, -1, -1): non-split exactly over t = 0 and infinity
    cc::conic::ConicBundle X(k, cc::p1::Poly::t(k), cc::p1::Poly::from_int(k, -1),
                             cc::p1::Poly::from_int(k, -1));
    auto B = cc::conic::nonsplit_locus(X, rng);
    if (B.delta != 2 || B.points.size() != 2) {
        std::cout << "selftest: unexpected locus\n";
        return kExitVerification;
    }
    auto rep = cc::certify::certify_unirational(X, seed);
    if (rep.status != cc::certify::Status::ok || !rep.certificate) {
        std::cout << "selftest: certification failed\n";
        return kExitVerification;
    }
    auto oracle = cc::certify::section_search_oracle(
        cc::conic::pullback_bundle_raw(X, rep.certificate->cover.map), 1, 5000);
    if (oracle.status != cc::certify::SectionResult::Status::found) {
        std::cout << "selftest: no section found for the pulled-back bundle\n";
        return kExitVerification;
    }
    std::cout << "selftest: ok\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"conic bundles over P^1(F_q): non-split loci, covers, certificates"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    cc::u64 seed = 0;
    bool as_json = false;
    cc::i64 budget_ms = 10000;
    app.add_option("--seed", seed, "RNG seed (default 0)");
    app.add_flag("--json", as_json, "emit the full report as JSON");
    app.add_option("--budget-ms", budget_ms, "time budget for bounded searches");

    std::string bundle_path, cover_path, s0_str, s1_str;
    int max_deg = 1;

    auto* cmd_analyze = app.add_subcommand("analyze", "non-split locus and hypothesis flags");
    cmd_analyze->add_option("file", bundle_path, "bundle JSON")->required();

    auto* cmd_uni = app.add_subcommand("certify-unirational", "synthesize and verify a cover");
    cmd_uni->add_option("file", bundle_path, "bundle JSON")->required();

    auto* cmd_req = app.add_subcommand("certify-requiv",
                                       "cover with rational points over two designated fibres");
    cmd_req->add_option("file", bundle_path, "bundle JSON")->required();
    cmd_req->add_option("--s0", s0_str, "first rational point (element or 'inf')")->required();
    cmd_req->add_option("--s1", s1_str, "second rational point")->required();

    auto* cmd_verify = app.add_subcommand("verify", "re-verify a (bundle, cover) pair");
    cmd_verify->add_option("file", bundle_path, "bundle JSON")->required();
    cmd_verify->add_option("--cover", cover_path, "cover JSON")->required();
    cmd_verify->add_option("--s0", s0_str, "optional rational point for the fibre check");
    cmd_verify->add_option("--s1", s1_str, "optional rational point for the fibre check");

    auto* cmd_oracle = app.add_subcommand("oracle-section", "bounded search for a section");
    cmd_oracle->add_option("file", bundle_path, "bundle JSON")->required();
    cmd_oracle->add_option("--max-deg", max_deg, "degree bound for the section polynomials");

    auto* cmd_selftest = app.add_subcommand("selftest", "small built-in end-to-end check");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_analyze->parsed()) {
            auto X = cc::certify::bundle_from_json(load_json(bundle_path));
            auto rep = cc::certify::analyze(X, seed);
            print_report(rep, as_json);
            return rep.star ? kExitOk : kExitHypothesis;
        }
        if (cmd_uni->parsed()) {
            auto X = cc::certify::bundle_from_json(load_json(bundle_path));
            auto rep = cc::certify::certify_unirational(X, seed);
            print_report(rep, as_json);
            return status_code(rep);
        }
        if (cmd_req->parsed()) {
            auto X = cc::certify::bundle_from_json(load_json(bundle_path));
            auto s0 = cc::certify::parse_rat_point(X.k, s0_str);
            auto s1 = cc::certify::parse_rat_point(X.k, s1_str);
            if (s0 == s1) throw cc::InputError("--s0 and --s1 must be distinct");
            auto rep = cc::certify::certify_requiv(X, s0, s1, seed);
            print_report(rep, as_json);
            return status_code(rep);
        }
        if (cmd_verify->parsed()) {
            auto X = cc::certify::bundle_from_json(load_json(bundle_path));
            auto cover = cc::certify::cover_from_json(load_json(cover_path));
            if (!X.k->same_as(*cover.field()))
                throw cc::InputError("bundle and cover live over different fields");
            cc::Rng rng = cc::Rng::seeded(seed);
            auto B = cc::conic::nonsplit_locus(X, rng);
            std::vector<cc::certify::CheckResult> checks;
            checks.push_back(cc::certify::verify_parity(cover, B, rng));
            checks.push_back(cc::certify::verify_pullback_vanishing(X, cover, rng));
            if (!s0_str.empty() || !s1_str.empty()) {
                if (s0_str.empty() || s1_str.empty())
                    throw cc::InputError("--s0 and --s1 must be given together");
                checks.push_back(cc::certify::verify_requiv(
                    cover, cc::certify::parse_rat_point(X.k, s0_str),
                    cc::certify::parse_rat_point(X.k, s1_str), rng));
            }
            bool all = true;
            json out = json::array();
            for (const auto& ck : checks) {
                all = all && ck.pass;
                out.push_back({{"name", ck.name}, {"pass", ck.pass}, {"detail", ck.detail}});
                if (!as_json)
                    std::cout << "[" << (ck.pass ? "pass" : "FAIL") << "] " << ck.name << ": "
                              << ck.detail << "\n";
            }
            if (as_json) std::cout << out.dump(2) << "\n";
            return all ? kExitOk : kExitVerification;
        }
        if (cmd_oracle->parsed()) {
            auto X = cc::certify::bundle_from_json(load_json(bundle_path));
            cc::Rng rng = cc::Rng::seeded(seed);
            auto B = cc::conic::nonsplit_locus(X, rng);
            auto res = cc::certify::section_search_oracle(X, max_deg, budget_ms);
            json out;
            out["tested"] = res.tested;
            switch (res.status) {
                case cc::certify::SectionResult::Status::found:
                    out["status"] = "found";
                    out["x"] = cc::certify::poly_to_json(res.triple[0]);
                    out["y"] = cc::certify::poly_to_json(res.triple[1]);
                    out["z"] = cc::certify::poly_to_json(res.triple[2]);
                    break;
                case cc::certify::SectionResult::Status::exhausted:
                    out["status"] = "exhausted";
                    out["note"] = B.points.empty()
                                      ? "no section of degree <= " + std::to_string(max_deg) +
                                            "; bounded evidence only"
                                      : "non-split locus is nonempty, so no section exists at "
                                        "any degree";
                    break;
                case cc::certify::SectionResult::Status::budget_exceeded:
                    out["status"] = "budget-exceeded";
                    break;
            }
            std::cout << out.dump(2) << "\n";
            return res.status == cc::certify::SectionResult::Status::budget_exceeded
                       ? kExitVerification
                       : kExitOk;
        }
        if (cmd_selftest->parsed()) return run_selftest(seed);
    } catch (const cc::InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const cc::HypothesisError& e) {
        std::cerr << "hypothesis not met: " << e.what() << "\n";
        return kExitHypothesis;
    } catch (const cc::VerificationError& e) {
        std::cerr << "verification failure: " << e.what() << "\n";
        return kExitVerification;
    } catch (const cc::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitVerification;
    }
    return kExitInput;
}
