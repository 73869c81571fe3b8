#pragma once

#include <memory>
#include <vector>

#include "conicover/common.hpp"

namespace conicover::gf {

// An element of a finite field, stored as its coefficient list over F_p
// (little-endian, length n, all entries in [0, p)).
struct Element {
    std::vector<i64> c;

    bool operator==(const Element& o) const { return c == o.c; }
    bool operator!=(const Element& o) const { return c != o.c; }
    // lexicographic on the coefficient list, index 0 first
    bool operator<(const Element& o) const { return c < o.c; }
};

/// F_q with q = p^n, p an odd prime.
///
/// Three flavours share one interface:
///   - prime:  Z/p (n = 1)
///   - ext:    F_p[x]/(modulus), modulus monic irreducible of degree n over F_p
///   - quad:   base(w)/(w^2 - alpha) for an existing FieldSpec `base` and a fixed
///             nonsquare alpha of the base; elements are pairs of base elements.
///
/// The quad flavour exists so that F_{q^2} carries a free embedding of F_q
/// (zero-pad) and a free arithmetic Frobenius x -> x^q ((x0,x1) -> (x0,-x1)).
class FieldSpec : public std::enable_shared_from_this<FieldSpec> {
  public:
    enum class Kind { prime, ext, quad };

    static std::shared_ptr<const FieldSpec> make_prime(i64 p);
    static std::shared_ptr<const FieldSpec> make_ext(i64 p, std::vector<i64> modulus);
    // quadratic extension of `base` by w^2 = base nonsquare witness
    static std::shared_ptr<const FieldSpec> make_quad(std::shared_ptr<const FieldSpec> base);

    Kind kind() const { return kind_; }
    i64 p() const { return p_; }
    int n() const { return n_; }              // degree over F_p
    u64 q() const { return q_; }              // p^n
    const std::vector<i64>& modulus() const { return modulus_; }
    const std::shared_ptr<const FieldSpec>& base() const { return base_; }
    const Element& quad_alpha() const { return quad_alpha_; }

    bool same_as(const FieldSpec& o) const;

    // --- elements ---
    Element zero() const;
    Element one() const;
    Element from_int(i64 v) const;            // v mod p, embedded as a constant
    Element element_at(u64 index) const;      // canonical enumeration, index < q
    u64 index_of(const Element& a) const;
    bool is_zero(const Element& a) const;
    void check(const Element& a) const;

    // --- arithmetic ---
    Element add(const Element& a, const Element& b) const;
    Element sub(const Element& a, const Element& b) const;
    Element neg(const Element& a) const;
    Element mul(const Element& a, const Element& b) const;
    Element inv(const Element& a) const;      // throws on zero
    Element pow(const Element& a, u64 e) const;
    // x -> x^(p^k); k defaults to one application of x -> x^p
    Element frobenius(const Element& a, int k = 1) const;

    // --- quadratic structure ---
    bool is_square(const Element& a) const;   // 0 counts as a square
    Element sqrt(const Element& a) const;     // canonical root, throws if not a square
    const Element& nonsquare_witness() const { return witness_; }

    // --- quad-only helpers ---
    Element embed_base(const Element& a) const;          // F_q -> F_{q^2}
    bool in_base(const Element& a) const;                // fixed by x -> x^q
    Element project_base(const Element& a) const;        // inverse of embed_base
    Element frobenius_q(const Element& a) const;         // x -> x^q, one flip
    Element norm_to_base(const Element& a) const;        // x * x^q, lands in base

  private:
    FieldSpec() = default;
    void init_witness();

    Kind kind_ = Kind::prime;
    i64 p_ = 0;
    int n_ = 1;
    u64 q_ = 0;
    std::vector<i64> modulus_;                // ext only, little-endian over F_p, monic
    std::shared_ptr<const FieldSpec> base_;   // quad only
    Element quad_alpha_;                      // quad only: w^2 = alpha (a base element)
    Element witness_;
};

using Field = std::shared_ptr<const FieldSpec>;

/// The pair (F_q, F_{q^2}) with the embedding and the Frobenius generator of
/// Gal(F_{q^2}/F_q) made explicit.
struct QuadExt {
    Field base;
    Field ext;

    explicit QuadExt(Field base_field);

    Element embed(const Element& a) const { return ext->embed_base(a); }
    Element sigma(const Element& a) const { return ext->frobenius_q(a); }
    Element norm(const Element& a) const { return ext->norm_to_base(a); }
    // the square root of the base nonsquare witness inside F_{q^2}
    Element sqrt_alpha() const;
};

/// u in F_{q^2}^x with u * u^q = v, for nonzero v in F_q.
Element solve_norm_equation(const QuadExt& E, const Element& v);

// modular scalar helpers shared by the polynomial layer
i64 mod_pos(i64 a, i64 m);
i64 mul_mod(i64 a, i64 b, i64 m);
i64 pow_mod_i64(i64 a, u64 e, i64 m);
bool is_prime_i64(i64 n);

}  // namespace conicover::gf
