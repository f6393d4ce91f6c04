#pragma once

#include "qsp/quasik.hpp"
#include "qsp/repcat.hpp"

#include <chrono>

namespace qsp {

struct CheckResult {
    std::string name;
    bool pass = false;
    double ms = 0.0;
    int dim = 0;
    std::string detail; // bounded failure dump
};

/// Assembled K-matrix factors on one module.
struct KParts {
    Mat X;      // truncated quasi K-matrix action
    Mat xi;     // diagonal by xi(weight)
    Mat TwX, TwXinv;
    Mat Tw0, Tw0inv;
    Mat Kprime; // X xi TwX^{-1}
    Mat K;      // X xi TwX^{-1} Tw0^{-1}
};

/// Bundles the full verification state for one (datum, parameters) choice:
/// quasi K-matrix engine, PBW root vectors, quasi R-matrices, and every
/// operator-level check of the construction.
class KMachine {
public:
    KMachine(const QspParams* p, bool corrupt_xi = false);

    const QspParams& params() const { return *p_; }
    QuasiKEngine& quasik() { return qk_; }
    const RootVectorTable& rootvec() const { return rv_; }
    const XiFun& xi() const { return xi_; }

    /// quasi R-matrix (dual-basis construction) of at least this cutoff
    const QuasiR& R(int cutoff);
    /// X-subsystem quasi R-matrix and R·bar(R_X), PBW suffix products
    const QuasiR& RX(int cutoff);
    const QuasiR& RRXbar(int cutoff);

    KParts build_KParts(const ModuleData& M);

    /// named generator list of B_{c,s} together with its tau tau0 image and
    /// the tw(tau0(.)) image used by the twisted intertwining identity
    struct Gen {
        std::string name;
        MixedElement b, b_tautau0, b_twtau0;
    };
    std::vector<Gen> generators() const;

    /// K b = tau tau0(b) K over the full generator list
    CheckResult check_intertwining(const ModuleData& M);
    /// K' tw(tau0(b)) = tau0(tau(b)) K', the twisted-module identity
    CheckResult check_intertwining_Kprime(const ModuleData& M);
    /// the bar-intertwining identity of the quasi K-matrix itself
    CheckResult check_quasiK_intertwining(const ModuleData& M);

    Mat build_XK2(const ModuleData& M, const ModuleData& N);
    Mat build_RtauX(const ModuleData& M, const ModuleData& N, std::string* block_report = nullptr);

    CheckResult check_deltaX(const ModuleData& M, const ModuleData& N);
    /// Delta(xi) = (xi ⊗ xi) kappa^{-1} kappa^{-Theta}
    CheckResult check_deltaXi(const ModuleData& M, const ModuleData& N);
    /// conjugating XK2 by T_{wX} T_{w0} ⊗ 1 equals kappa-twisting 1 ⊗ X
    CheckResult check_KX1X(const ModuleData& M, const ModuleData& N);
    /// Delta(K) = (K ⊗ 1) Rhat^{tau tau0} (K ⊗ 1) Rhat, factor route
    CheckResult check_deltaK(const ModuleData& M, const ModuleData& N);
    /// the same identity with K evaluated directly on the tensor module
    CheckResult check_fusion(const ModuleData& M, const ModuleData& N);
    /// the reflection equation
    CheckResult check_reflection(const ModuleData& M, const ModuleData& N);
    /// Ad(xi) on weight vectors and on the X-subalgebra generators
    CheckResult check_adxi(const ModuleData& M, unsigned seed = 7);

    Mat rhat_plain(const ModuleData& M, const ModuleData& N);
    Mat rhat_twisted(const ModuleData& M, const ModuleData& N);

private:
    const QspParams* p_;
    XiFun xi_;
    QuasiKEngine qk_;
    RootVectorTable rv_;
    size_t prefix_ = 0;
    QuasiR R_, RX_, RRX_;

    Mat quasiK_on(const ModuleData& M);
    static CheckResult finish(const std::string& name, bool pass, std::chrono::steady_clock::time_point t0,
                              int dim, std::string detail = {});
};

/// bounded dump of mismatching entries, for failure reports
std::string diff_matrices(const Mat& a, const Mat& b, int max_entries = 8);

} // namespace qsp
