#pragma once

#include "qsp/qspalg.hpp"

#include <mutex>

namespace qsp {

struct SolvabilityError : std::runtime_error {
    QVec mu;
    int i = -1, j = -1;
    std::string condition;
    SolvabilityError(const QVec& mu_, int i_, int j_, std::string cond)
        : std::runtime_error("quasi K-matrix solvability condition " + cond + " fails at mu=" + qvec_str(mu_) +
                             " (i=" + std::to_string(i_ + 1) + ", j=" + std::to_string(j_ + 1) + ")"),
          mu(mu_), i(i_), j(j_), condition(std::move(cond)) {}
};

struct StepLog {
    QVec mu;
    bool solvable = false;
    bool nonzero = false;
};

/// Height-by-height construction of the quasi K-matrix.  Each step solves the
/// stacked linear system r_i(X_mu) = A_i over the weight basis, after the two
/// exact solvability conditions are verified; the redundant half ir(X_mu) =
/// iA is asserted afterwards.
class QuasiKEngine {
public:
    QuasiKEngine(const QspParams* params) : p_(params) {}

    const QspParams& params() const { return *p_; }
    int cutoff() const { return cutoff_; }

    /// extend the computation to all weights of height <= cutoff
    void ensure(int cutoff);
    /// component at mu (zero element if off-support or beyond the cutoff)
    AlgebraElement component(const QVec& mu) const;
    const std::map<QVec, AlgebraElement>& components() const { return comp_; }
    const std::vector<StepLog>& log() const { return log_; }

    /// right-hand sides A_i and iA of the recursion at mu for node i
    std::pair<AlgebraElement, AlgebraElement> rhs_pair(const QVec& mu, int i) const;
    /// the two conditions of the solvability criterion; throws SolvabilityError
    void check_solvable(const QVec& mu, const std::vector<AlgebraElement>& A,
                        const std::vector<AlgebraElement>& iA) const;
    /// unique solution of r_i(X) = A_i for all i at weight mu
    AlgebraElement solve_step(const QVec& mu, const std::vector<AlgebraElement>& A) const;

    /// fingerprint of (datum, params, reduced words, basis order) for caching
    std::string fingerprint() const;
    bool load_cache(const std::string& path);
    void save_cache(const std::string& path) const;

private:
    const QspParams* p_;
    int cutoff_ = -1;
    std::map<QVec, AlgebraElement> comp_;
    std::vector<StepLog> log_;
};

} // namespace qsp
