#pragma once

#include "qsp/scalar.hpp"

#include <Eigen/Core>
#include <optional>
#include <random>

namespace Eigen {

template <>
struct NumTraits<qsp::Scalar> {
    using Real = qsp::Scalar;
    using NonInteger = qsp::Scalar;
    using Literal = qsp::Scalar;
    using Nested = qsp::Scalar;
    enum {
        IsComplex = 0,
        IsInteger = 0,
        IsSigned = 1,
        RequireInitialization = 1,
        ReadCost = 8,
        AddCost = 60,
        MulCost = 60
    };
    static inline qsp::Scalar epsilon() { return qsp::Scalar(0); }
    static inline qsp::Scalar dummy_precision() { return qsp::Scalar(0); }
    static inline int digits10() { return 0; }
};

} // namespace Eigen

namespace qsp {

using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

Mat mat_zero(int r, int c);
Mat mat_identity(int n);
bool mat_is_zero(const Mat& a);

/// Kronecker product in row-major pair order: (a ⊗ b)[(i1*rb+i2),(j1*cb+j2)].
Mat kron(const Mat& a, const Mat& b);

/// Exact rank via Gaussian elimination over Q(v).
int exact_rank(Mat a);

/// Solve A X = B exactly.  Returns false when the system is inconsistent;
/// when the solution space is positive-dimensional an arbitrary solution is
/// produced (free variables set to zero).  unique, if supplied, reports
/// whether the solution was unique.
bool exact_solve(Mat a, Mat b, Mat& x, bool* unique = nullptr);

/// Exact inverse; throws on singular input.
Mat exact_inverse(const Mat& a);

/// Probabilistic equality screen: evaluate both sides at random rational
/// points.  False means definitely unequal; true means "exact check worth
/// running".  The exact comparison must stay the verdict.
bool probably_equal(const Mat& a, const Mat& b, std::mt19937_64& rng);

/// Exact equality, with the probabilistic screen applied first.
bool mat_equal(const Mat& a, const Mat& b);

/// Incremental invertible-principal-minor selector for symmetric Gram
/// matrices: greedily grows a set S with G[S,S] invertible.  On success the
/// candidate joins S and the cached inverse is extended by the block formula.
class PrincipalMinorSelector {
public:
    /// pair_with_selected(k) = G(s_k, j) for the current S, self = G(j, j)
    bool try_add(const Vec& pair_with_selected, const Scalar& self);
    int size() const { return static_cast<int>(inv_.rows()); }
    const Mat& inv() const { return inv_; }

private:
    Mat inv_{0, 0}; // inverse of G[S,S]
};

} // namespace qsp
