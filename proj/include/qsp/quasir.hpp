#pragma once

#include "qsp/freealg.hpp"

namespace qsp {

/// PBW root vectors E_gamma, F_gamma along a reduced word.
struct RootVectorTable {
    std::vector<int> word;
    std::vector<QVec> roots;              // gamma_j = s_{i_1}...s_{i_{j-1}}(alpha_{i_j})
    std::vector<AlgebraElement> Epos;     // E_{gamma_j}
    std::vector<AlgebraElement> Fneg;     // F_{gamma_j}
    std::vector<int> node;                // i_j (fixes q_{i_j} in the R factors)
};

RootVectorTable root_vectors(const AlgebraCtx* ctx, const std::vector<int>& word);

/// Weight components of an element of (a completion of) U^- ⊗ U^+; each
/// component is a sparse coefficient matrix over the two weight bases.
class QuasiR {
public:
    using Comp = std::map<std::pair<int, int>, Scalar>;

    QuasiR() = default;
    explicit QuasiR(const AlgebraCtx* ctx, int cutoff = 0) : ctx_(ctx), cutoff_(cutoff) {}

    const AlgebraCtx* ctx() const { return ctx_; }
    int cutoff() const { return cutoff_; }
    const std::map<QVec, Comp>& components() const { return comp_; }
    Comp component(const QVec& mu) const;
    bool has(const QVec& mu) const { return comp_.count(mu) != 0; }

    static QuasiR one(const AlgebraCtx* ctx, int cutoff);
    /// single PBW factor R^{[j]} truncated at the height cutoff
    static QuasiR pbw_factor(const AlgebraCtx* ctx, const AlgebraElement& Fg, const AlgebraElement& Eg,
                             int node, int cutoff);

    void add(const QVec& mu, int a, int b, const Scalar& c);
    QuasiR mul(const QuasiR& o) const; // truncated at min cutoff
    QuasiR bar() const;
    friend bool operator==(const QuasiR& a, const QuasiR& b);

private:
    const AlgebraCtx* ctx_ = nullptr;
    int cutoff_ = 0;
    std::map<QVec, Comp> comp_;
    void prune();
};

/// R_mu as the dual-basis sum of the Drinfeld pairing at weight mu.
QuasiR::Comp quasiR_dual(const AlgebraCtx* ctx, const QVec& mu);
/// The full quasi R-matrix by the dual-basis construction up to a cutoff.
QuasiR quasiR_dual_all(const AlgebraCtx* ctx, int cutoff);

/// The quasi R-matrix as the ordered product of PBW factors (finite type).
QuasiR quasiR_pbw(const AlgebraCtx* ctx, const RootVectorTable& rv, int cutoff);
/// The X-subsystem quasi R-matrix from the w_X-prefix factors.
QuasiR quasiR_X(const AlgebraCtx* ctx, const RootVectorTable& rv, size_t prefix_len, int cutoff);
/// R * bar(R_X) from the suffix factors; first legs live in T_{w_X}(U^-) ∩ U^-.
QuasiR R_times_RXbar(const AlgebraCtx* ctx, const RootVectorTable& rv, size_t prefix_len, int cutoff);

} // namespace qsp
