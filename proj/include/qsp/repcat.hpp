#pragma once

#include "qsp/quasir.hpp"

#include <functional>

namespace qsp {

/// Finite-dimensional integrable weight module with exact generator matrices.
/// Basis vectors are grouped by weight; matE[i]/matF[i] act by left
/// multiplication, K_h diagonally through the weights.
struct ModuleData {
    const AlgebraCtx* ctx = nullptr;
    PWeight highest;               // meaningful for irreducibles
    std::vector<PWeight> wts;      // weight of each basis vector
    std::vector<Mat> matE, matF;   // one matrix per node
    std::string name;

    int dim() const { return static_cast<int>(wts.size()); }
    Mat diag_K(const QVec& beta) const;       // K_beta
    Mat diag_K_weight(const PWeight& b) const; // K acting by q^{(b, wt)}
    Mat diag_fn(const std::function<Scalar(const PWeight&)>& f) const;
    /// height of (highest - lowest occurring weight): every weight-graded sum
    /// acting on the module is supported below this
    int weight_gap() const;
};

/// Irreducible V(lambda): F-words on a highest weight vector modulo the
/// radical of the contravariant form.
ModuleData build_irrep(const AlgebraCtx* ctx, const PWeight& lambda);
/// Tensor product with row-major pair ordering and coproduct action.
ModuleData tensor_module(const ModuleData& m, const ModuleData& n);

Mat act(const AlgebraElement& x, const ModuleData& m);
Mat act(const MixedElement& x, const ModuleData& m);

/// Lusztig operator T_{i,M}: the printed inverse formula is evaluated
/// directly; the forward operator is its exact matrix inverse (the printed
/// forward constraint annihilates the two-dimensional A1 module).
Mat lusztig_T(int i, const ModuleData& m, BraidDir dir);
Mat lusztig_T_word(const std::vector<int>& word, const ModuleData& m, BraidDir dir);

/// kappa_{M,N}: m ⊗ n -> q^{(mu,nu)} m ⊗ n, and its f-twisted variant
Mat kappa(const ModuleData& m, const ModuleData& n);
Mat kappa_f(const ModuleData& m, const ModuleData& n,
            const std::function<PWeight(const PWeight&)>& f);
Mat flip_matrix(const ModuleData& m, const ModuleData& n);

/// R = sum R_mu as an operator on M ⊗ N (first leg on M).
Mat quasiR_on(const QuasiR& R, const ModuleData& m, const ModuleData& n);
/// same with the plus leg relabeled by a diagram automorphism
Mat quasiR_on_relabel(const QuasiR& R, const ModuleData& m, const ModuleData& n,
                      const std::vector<int>& perm_minus_leg);

struct RhatVariant {
    bool twisted = false;                 // tau tau0 twist
};

/// Commutativity operator \hat R_{M,N}: M ⊗ N -> N ⊗ M (or its tau tau0
/// variant), built from a quasi R-matrix of sufficient cutoff.
Mat rhat(const QuasiR& R, const ModuleData& m, const ModuleData& n, const SatakeDatum* sd,
         RhatVariant variant = {});

/// act(E_w) with the word letters relabeled (diagram automorphism)
Mat act_relabeled(const AlgebraElement& x, const ModuleData& m, const std::vector<int>& perm);

} // namespace qsp
