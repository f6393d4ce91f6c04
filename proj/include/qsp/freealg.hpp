#pragma once

#include "qsp/linalg.hpp"
#include "qsp/rootdata.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <unordered_map>
#include <vector>

namespace qsp {

enum class Side { Plus, Minus };

/// Monomial in the generators of one triangular half, as its letter sequence.
using Word = std::vector<int>;

QVec word_weight(const Word& w, int rank);

/// Basis data of one weight space of U^+ (equivalently U^-): the full word
/// list, a subset of words whose mutual-pairing Gram matrix is invertible,
/// and that matrix with its inverse.  The same word subset serves both sides;
/// the radical of the Drinfeld pairing is exactly what gets quotiented away.
struct WeightBasis {
    QVec mu;
    std::vector<Word> words;      // all words of weight mu in the ambient order
    std::vector<int> sel;         // indices of the chosen basis words
    std::vector<Word> sel_words;
    Mat gram_sel;                 // pairings <F_s, E_t> over sel x sel
    Mat gram_sel_inv;
    std::map<Word, int> word_index;

    int dim() const { return static_cast<int>(sel.size()); }
};

/// Shared, append-only computation context for one root datum: weight bases,
/// word pairings and word reductions, all memoized under a lock
/// (compute-once-publish).
class AlgebraCtx {
public:
    explicit AlgebraCtx(const RootDatum& rd, bool reverse_lex = false)
        : rd_(rd), revlex_(reverse_lex) {}

    const RootDatum& rd() const { return rd_; }
    bool reverse_lex() const { return revlex_; }

    const WeightBasis& basis(const QVec& mu) const;
    /// <F_{wm}, E_{wp}> via the skew-derivation recursion.
    Scalar pair_words(const Word& wm, const Word& wp) const;
    /// coordinates of E_w (or F_w) over basis(mu).sel
    Vec reduce_word(const Word& w, Side side) const;
    /// -1/(q_i - q_i^{-1}), the pairing of the degree-one generators
    Scalar cFE(int i) const;

    /// number of multisets of positive roots summing to mu (finite type)
    long kostant_dim(const QVec& mu) const;

private:
    const RootDatum& rd_;
    bool revlex_;
    mutable std::mutex mu_;
    mutable std::map<QVec, std::unique_ptr<WeightBasis>> bases_;
    struct WordPairHash {
        size_t operator()(const std::pair<Word, Word>& p) const {
            size_t h = 1469598103934665603ULL;
            auto mix = [&](const Word& w) {
                h ^= w.size() + 0x9e3779b9;
                h *= 1099511628211ULL;
                for (int l : w) {
                    h ^= static_cast<size_t>(l) + 1;
                    h *= 1099511628211ULL;
                }
            };
            mix(p.first);
            mix(p.second);
            return h;
        }
    };
    mutable std::unordered_map<std::pair<Word, Word>, Scalar, WordPairHash> pair_memo_;
    mutable std::unordered_map<std::pair<Word, Word>, Rational, WordPairHash> pair_eval_memo_;
    mutable std::map<Word, Vec> reduce_plus_memo_, reduce_minus_memo_;

    const WeightBasis& basis_locked(const QVec& mu) const;
    Scalar pair_words_locked(const Word& wm, const Word& wp) const;
    // pairing evaluated at a fixed rational point: the cheap screen used to
    // pick candidate basis words; the exact Gram inverse stays the verdict
    Rational pair_eval_locked(const Word& wm, const Word& wp) const;
    std::vector<int> select_words_numeric(const std::vector<Word>& words, long expected) const;
};

/// Word-level skew derivations; the result is a word expansion.
std::vector<std::pair<Word, Scalar>> skew_r_word(const RootDatum& rd, int i, const Word& w);
std::vector<std::pair<Word, Scalar>> skew_ir_word(const RootDatum& rd, int i, const Word& w);

/// Weight-graded element of U^+ or U^- in reduced per-weight coordinates,
/// optionally right-multiplied by K_{ktag}.
class AlgebraElement {
public:
    AlgebraElement() = default;
    AlgebraElement(const AlgebraCtx* ctx, Side side);

    static AlgebraElement zero(const AlgebraCtx* ctx, Side side);
    static AlgebraElement one(const AlgebraCtx* ctx, Side side);
    static AlgebraElement generator(const AlgebraCtx* ctx, Side side, int i);
    static AlgebraElement from_words(const AlgebraCtx* ctx, Side side,
                                     const std::vector<std::pair<Word, Scalar>>& terms);

    const AlgebraCtx* ctx() const { return ctx_; }
    Side side() const { return side_; }
    bool is_zero() const;
    bool has_ktag() const { return !qvec_is_zero(ktag_); }
    const QVec& ktag() const { return ktag_; }
    AlgebraElement with_ktag(const QVec& beta) const;

    const std::map<QVec, Vec>& components() const { return comp_; }
    /// single-weight access; zero vector if absent
    Vec component(const QVec& mu) const;
    void set_component(const QVec& mu, Vec v);

    /// expansion as (word, coefficient) pairs, per weight — the debug dump
    std::vector<std::pair<Word, Scalar>> word_expansion() const;
    std::string dump() const;

    AlgebraElement operator-() const;
    AlgebraElement& operator+=(const AlgebraElement& o);
    AlgebraElement& operator-=(const AlgebraElement& o);
    friend AlgebraElement operator+(AlgebraElement a, const AlgebraElement& b) { return a += b; }
    friend AlgebraElement operator-(AlgebraElement a, const AlgebraElement& b) { return a -= b; }
    AlgebraElement scaled(const Scalar& c) const;
    friend AlgebraElement operator*(const AlgebraElement& a, const AlgebraElement& b);
    friend bool operator==(const AlgebraElement& a, const AlgebraElement& b);

    AlgebraElement power(int k) const;
    /// divided power of a single generator: E_i^{(k)} = E_i^k / [k]_{q_i}!
    static AlgebraElement divided_power(const AlgebraCtx* ctx, Side side, int i, int k);

    AlgebraElement bar() const;
    AlgebraElement sigma() const;

    friend AlgebraElement skew_r(int i, const AlgebraElement& x);
    friend AlgebraElement skew_ir(int i, const AlgebraElement& x);
    friend Scalar pairing(const AlgebraElement& y, const AlgebraElement& x);

private:
    const AlgebraCtx* ctx_ = nullptr;
    Side side_ = Side::Plus;
    std::map<QVec, Vec> comp_;
    QVec ktag_;
    void prune();
};

enum class BraidDir { Fwd, Inv };

/// Lusztig braid operator on one triangular half.  Permitted when every
/// letter differs from i, or in a root-vector context where one-sidedness of
/// the image is a theorem (allow_mixed); anything else throws.
AlgebraElement braid_T(int i, const AlgebraElement& x, BraidDir dir, bool allow_mixed = false);

/// T_i^{+-1}(E_j), T_i^{+-1}(F_j) for j != i as one-sided elements.
AlgebraElement braid_gen_plus(const AlgebraCtx* ctx, int i, int j, BraidDir dir);
AlgebraElement braid_gen_minus(const AlgebraCtx* ctx, int i, int j, BraidDir dir);

/// Normal-ordered element of U_q(g): sum of F-part * K_beta * E-part with
/// both parts in reduced coordinates.  Used to push braid operators through
/// mixed intermediates and to realize coideal generators on modules.
class MixedElement {
public:
    struct Key {
        QVec fmu, kbeta, enu;
        bool operator<(const Key& o) const {
            if (fmu != o.fmu) return fmu < o.fmu;
            if (kbeta != o.kbeta) return kbeta < o.kbeta;
            return enu < o.enu;
        }
    };

    MixedElement() = default;
    explicit MixedElement(const AlgebraCtx* ctx) : ctx_(ctx) {}

    static MixedElement zero(const AlgebraCtx* ctx) { return MixedElement(ctx); }
    static MixedElement from_scalar(const AlgebraCtx* ctx, const Scalar& c);
    static MixedElement gen_E(const AlgebraCtx* ctx, int i);
    static MixedElement gen_F(const AlgebraCtx* ctx, int i);
    static MixedElement gen_K(const AlgebraCtx* ctx, const QVec& beta);
    static MixedElement from_plus(const AlgebraElement& x);  // honors ktag
    static MixedElement from_minus(const AlgebraElement& y); // honors ktag

    const AlgebraCtx* ctx() const { return ctx_; }
    const std::map<Key, Mat>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    MixedElement operator-() const;
    MixedElement& operator+=(const MixedElement& o);
    MixedElement& operator-=(const MixedElement& o);
    friend MixedElement operator+(MixedElement a, const MixedElement& b) { return a += b; }
    friend MixedElement operator-(MixedElement a, const MixedElement& b) { return a -= b; }
    MixedElement scaled(const Scalar& c) const;
    friend MixedElement operator*(const MixedElement& a, const MixedElement& b);
    friend bool operator==(const MixedElement& a, const MixedElement& b);

    MixedElement bar() const;
    /// index relabeling by a diagram automorphism
    MixedElement relabel(const std::vector<int>& perm) const;
    /// the algebra automorphism tw: E_i -> -K_i^{-1}F_i, F_i -> -E_i K_i, K -> K^{-1}
    MixedElement tw() const;

    /// purely one-sided extraction; throws if F/K (resp. E/K) parts survive
    AlgebraElement pure_plus() const;
    AlgebraElement pure_minus() const;
    bool is_pure_plus() const;

    void add_term(const Key& k, int a, int b, const Scalar& c);
    void prune();

private:
    const AlgebraCtx* ctx_ = nullptr;
    std::map<Key, Mat> terms_;
};

/// T_i^{+-1} on the whole algebra via the normal-ordered representation.
MixedElement braid_T_mixed(int i, const MixedElement& x, BraidDir dir);

} // namespace qsp
