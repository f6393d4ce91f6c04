#pragma once

#include "qsp/freealg.hpp"

#include <functional>
#include <mutex>
#include <optional>

namespace qsp {

/// Validated quantum-symmetric-pair parameters (c, s) plus everything the
/// K-matrix machinery derives from them: the generators X_i, the elements
/// Z_i, the group homomorphism gamma on P, and the weight function xi.
struct QspParams {
    const AlgebraCtx* ctx = nullptr;
    const SatakeDatum* sd = nullptr;
    std::vector<Scalar> c, s;       // per node; zero on X by convention
    std::vector<Scalar> gamma_fw;   // gamma(varpi_j) for every node j

    std::vector<AlgebraElement> Xi;        // X_i = -s(tau(i)) T_{wX}(E_{tau(i)}), i not in X
    std::vector<AlgebraElement> TwXinvE;   // T_{wX}^{-1}(E_{tau(i)})
    std::vector<AlgebraElement> Zi;        // r_{tau(i)}(X_i) K_i^{-1} K_{tau(i)}
    std::vector<Scalar> rho;               // rho_i = c_{tau(i)} s(i) q^{-(alpha_i, Theta alpha_i)}

    Scalar gamma_node(int i) const;                 // gamma(i)
    Scalar gamma_eval(const PWeight& lam) const;    // multiplicative extension to P
    /// bar(c_i X_i) = -rho_i T_{wX}^{-1}(E_{tau(i)})
    AlgebraElement bar_cX(int i) const;
    /// B_i = F_i + c_i X_i K_i^{-1} + s_i K_i^{-1} as a normal-ordered element
    MixedElement B(int i) const;
};

struct ParamError : std::domain_error {
    std::vector<std::string> violations;
    explicit ParamError(std::vector<std::string> v)
        : std::domain_error("parameter validation failed: " + (v.empty() ? std::string() : v.front())),
          violations(std::move(v)) {}
};

/// Check c in C, s in S, the bar-consistency constraints (Mparameters1/2 and
/// octau, the latter two cross-validated through the computed Z_i), and
/// Assumption (tau0).  With skip_checks the derived data is built but
/// violations are not raised (negative-control path).
QspParams validate_params(const AlgebraCtx* ctx, const SatakeDatum& sd,
                          const std::map<int, Scalar>& c_in, const std::map<int, Scalar>& s_in,
                          const std::optional<std::vector<Scalar>>& gamma_override = std::nullopt,
                          bool skip_checks = false);

/// The weight function xi(lambda) = gamma(lambda) q^{-(lam+,lam+) + sum_k
/// (alpha~_k, alpha~_k) lam(varpi_k^vee)}; memoized; the exponent is asserted
/// to lie in (1/d)Z at runtime.  In corrupt mode the recursion is broken on
/// purpose (negative control).
class XiFun {
public:
    XiFun() = default;
    XiFun(const QspParams* p, bool corrupt = false) : p_(p), corrupt_(corrupt) {}
    Scalar operator()(const PWeight& lam) const;

private:
    const QspParams* p_ = nullptr;
    bool corrupt_ = false;
    mutable std::mutex mu_;
    mutable std::map<PWeight, Scalar> memo_;
};

} // namespace qsp
