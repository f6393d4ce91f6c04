#pragma once

#include "qsp/scalar.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace qsp {

/// Root-lattice element, coordinates over the simple roots.
using QVec = std::vector<int>;
/// Weight-lattice element, rational coordinates over the simple roots.
using PWeight = std::vector<Rational>;

QVec qvec_add(const QVec& a, const QVec& b);
QVec qvec_sub(const QVec& a, const QVec& b);
QVec qvec_neg(const QVec& a);
bool qvec_is_zero(const QVec& a);
bool qvec_nonneg(const QVec& a);
int qvec_height(const QVec& a);
QVec qvec_zero(int n);
PWeight pw_from_qvec(const QVec& a);
PWeight pw_add(const PWeight& a, const PWeight& b);
PWeight pw_sub(const PWeight& a, const PWeight& b);
PWeight pw_neg(const PWeight& a);
PWeight pw_scale(const PWeight& a, const Rational& c);
bool pw_is_zero(const PWeight& a);
std::string qvec_str(const QVec& a);
std::string pw_str(const PWeight& a);

/// Cartan datum: matrix, symmetrizers, bilinear form, lattices, Weyl words.
class RootDatum {
public:
    explicit RootDatum(std::vector<std::vector<int>> cartan);

    int rank() const { return n_; }
    int a(int i, int j) const { return cartan_[i][j]; }
    long eps(int i) const { return eps_[i]; }
    int d() const { return d_; }
    long det_aext() const { return det_; }
    bool finite_type() const { return finite_; }
    void require_finite(const char* what) const;

    // bilinear form (.,.) with (alpha_i, alpha_j) = eps_i a_ij
    long pair_qq(const QVec& a, const QVec& b) const;
    Rational pair(const PWeight& a, const PWeight& b) const;
    Rational hpair(const PWeight& lam, int i) const; // lam(h_i)
    long hpair_q(const QVec& lam, int i) const;
    Scalar q_power(const Rational& exponent) const; // q^e as v^{d e}
    Scalar q_pair(const PWeight& a, const PWeight& b) const;
    Scalar qi(int i) const;        // q_i = q^{eps_i}
    Scalar qi_bracket(int i) const; // q_i - q_i^{-1}

    PWeight reflect(int i, const PWeight& lam) const;
    QVec reflect_q(int i, const QVec& lam) const;
    PWeight apply_word(const std::vector<int>& word, const PWeight& lam) const;
    QVec apply_word_q(const std::vector<int>& word, const QVec& lam) const;

    PWeight fundamental_weight(int i) const { return fw_[i]; }
    PWeight rho() const;
    bool is_dominant(const PWeight& lam) const;
    QVec simple_root(int i) const;

    const std::vector<QVec>& positive_roots() const;

    /// Lexicographically smallest reduced word of the longest element of the
    /// parabolic W_X (X given as a sorted node list).
    std::vector<int> longest_word(const std::vector<int>& X) const;
    /// Reduced word for w0 having `prefix` as its initial segment.
    std::vector<int> longest_word_with_prefix(const std::vector<int>& prefix) const;

    /// Weyl dimension formula, finite type.
    long weyl_dim(const PWeight& lam) const;

    std::string describe() const;

private:
    int n_;
    std::vector<std::vector<int>> cartan_;
    std::vector<long> eps_;
    long det_ = 0;
    int d_ = 1;
    bool finite_ = false;
    std::vector<PWeight> fw_;
    mutable std::vector<QVec> posroots_;
    void compute_symmetrizers();
};

/// Admissible pair (X, tau) together with everything derived from it.
struct SatakeDatum {
    const RootDatum* rd = nullptr;
    std::vector<int> X;          // sorted subset of nodes
    std::vector<int> tau;        // involutive permutation of nodes
    std::vector<int> tau0;       // from w0(alpha_i) = -alpha_{tau0(i)}
    std::vector<int> sfun;       // s : I -> {+1,-1}
    PWeight rhoX, rhoXvee;       // half sums for the X subsystem
    std::vector<int> wX_word, w0_word;
    std::vector<bool> inX;
    std::vector<int> Ins;        // the set I_ns

    bool in_X(int i) const { return inX[static_cast<size_t>(i)]; }
    PWeight theta(const PWeight& lam) const; // -w_X(tau(lam))
    QVec theta_q(const QVec& lam) const;
    int tautau0(int i) const { return tau[static_cast<size_t>(tau0[static_cast<size_t>(i)])]; }
    PWeight tau_weight(const PWeight& lam) const;
    QVec tau_q(const QVec& lam) const;
    QVec tautau0_q(const QVec& lam) const;
    PWeight tautau0_weight(const PWeight& lam) const;
    /// Spanning set of the Theta-fixed sublattice Q^Theta used by the
    /// generator checks: alpha_i + Theta(alpha_i) (nonzero) and alpha_i, i in X.
    std::vector<QVec> qtheta_span() const;
    /// mu in w_X Q^+ ∩ Q^+ ?
    bool in_wXQplus(const QVec& mu) const;
};

struct AdmissibilityReport {
    bool admissible = false;
    std::vector<std::string> failures; // named failed conditions
};

/// Check Definition-2.3 admissibility plus the rank-two Cartan conditions
/// (i)/(ii) needed for the bar involution; throws on failure unless
/// `report` is supplied.
SatakeDatum validate_admissible(const RootDatum& rd, const std::vector<int>& X,
                                const std::vector<int>& tau,
                                AdmissibilityReport* report = nullptr);

/// Cartan matrix of a standard type ("A", "B", "C", "D") and rank.
std::vector<std::vector<int>> cartan_of_type(const std::string& type, int rank);

} // namespace qsp
