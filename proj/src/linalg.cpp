#include "qsp/linalg.hpp"

#include <stdexcept>

namespace qsp {

Mat mat_zero(int r, int c) {
    Mat m(r, c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) m(i, j) = Scalar(0);
    return m;
}

Mat mat_identity(int n) {
    Mat m = mat_zero(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = Scalar(1);
    return m;
}

bool mat_is_zero(const Mat& a) {
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            if (!a(i, j).is_zero()) return false;
    return true;
}

Mat kron(const Mat& a, const Mat& b) {
    Mat r = mat_zero(static_cast<int>(a.rows() * b.rows()), static_cast<int>(a.cols() * b.cols()));
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) {
            if (a(i, j).is_zero()) continue;
            for (int k = 0; k < b.rows(); ++k)
                for (int l = 0; l < b.cols(); ++l) {
                    if (b(k, l).is_zero()) continue;
                    r(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
                }
        }
    return r;
}

namespace {

// cheap complexity measure for pivot choice
long scalar_size(const Scalar& s) {
    return s.num().degree() + s.den().degree();
}

} // namespace

int exact_rank(Mat a) {
    int rows = static_cast<int>(a.rows()), cols = static_cast<int>(a.cols());
    int rank = 0;
    for (int col = 0; col < cols && rank < rows; ++col) {
        int piv = -1;
        long best = -1;
        for (int r = rank; r < rows; ++r) {
            if (a(r, col).is_zero()) continue;
            long sz = scalar_size(a(r, col));
            if (piv < 0 || sz < best) {
                piv = r;
                best = sz;
            }
        }
        if (piv < 0) continue;
        if (piv != rank) a.row(piv).swap(a.row(rank));
        Scalar ip = a(rank, col).inv();
        for (int r = rank + 1; r < rows; ++r) {
            if (a(r, col).is_zero()) continue;
            Scalar f = a(r, col) * ip;
            for (int c = col; c < cols; ++c) a(r, c) -= f * a(rank, c);
        }
        ++rank;
    }
    return rank;
}

bool exact_solve(Mat a, Mat b, Mat& x, bool* unique) {
    const int rows = static_cast<int>(a.rows());
    const int cols = static_cast<int>(a.cols());
    const int nrhs = static_cast<int>(b.cols());
    std::vector<int> pivot_col;
    int rank = 0;
    for (int col = 0; col < cols && rank < rows; ++col) {
        int piv = -1;
        long best = -1;
        for (int r = rank; r < rows; ++r) {
            if (a(r, col).is_zero()) continue;
            long sz = scalar_size(a(r, col));
            if (piv < 0 || sz < best) {
                piv = r;
                best = sz;
            }
        }
        if (piv < 0) continue;
        if (piv != rank) {
            a.row(piv).swap(a.row(rank));
            b.row(piv).swap(b.row(rank));
        }
        Scalar ip = a(rank, col).inv();
        for (int c = col; c < cols; ++c) a(rank, c) *= ip;
        for (int c = 0; c < nrhs; ++c) b(rank, c) *= ip;
        for (int r = 0; r < rows; ++r) {
            if (r == rank || a(r, col).is_zero()) continue;
            Scalar f = a(r, col);
            for (int c = col; c < cols; ++c) a(r, c) -= f * a(rank, c);
            for (int c = 0; c < nrhs; ++c) b(r, c) -= f * b(rank, c);
        }
        pivot_col.push_back(col);
        ++rank;
    }
    // consistency: zero rows of a must have zero rhs
    for (int r = rank; r < rows; ++r)
        for (int c = 0; c < nrhs; ++c)
            if (!b(r, c).is_zero()) return false;
    x = mat_zero(cols, nrhs);
    for (int k = 0; k < rank; ++k)
        for (int c = 0; c < nrhs; ++c) x(pivot_col[k], c) = b(k, c);
    if (unique) *unique = (rank == cols);
    return true;
}

Mat exact_inverse(const Mat& a) {
    if (a.rows() != a.cols()) throw std::domain_error("exact_inverse: non-square");
    Mat x;
    bool unique = false;
    if (!exact_solve(a, mat_identity(static_cast<int>(a.rows())), x, &unique) || !unique)
        throw std::domain_error("exact_inverse: singular matrix");
    return x;
}

bool probably_equal(const Mat& a, const Mat& b, std::mt19937_64& rng) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    std::uniform_int_distribution<long> num(2, 97), den(1, 19);
    for (int attempt = 0; attempt < 4; ++attempt) {
        Rational x(num(rng), den(rng));
        x.canonicalize();
        try {
            for (int i = 0; i < a.rows(); ++i)
                for (int j = 0; j < a.cols(); ++j)
                    if (a(i, j).eval_at(x) != b(i, j).eval_at(x)) return false;
            return true;
        } catch (const std::domain_error&) {
            continue; // denominator hit; retry at another point
        }
    }
    return true;
}

bool mat_equal(const Mat& a, const Mat& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    static thread_local std::mt19937_64 rng(0x51c0ffee);
    if (!probably_equal(a, b, rng)) return false;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            if (a(i, j) != b(i, j)) return false;
    return true;
}

bool PrincipalMinorSelector::try_add(const Vec& pair_with_selected, const Scalar& self) {
    const int r = size();
    if (r == 0) {
        if (self.is_zero()) return false;
        inv_ = Mat(1, 1);
        inv_(0, 0) = self.inv();
        return true;
    }
    // Schur complement of the candidate against G[S,S]
    Vec u = pair_with_selected; // column G(S, j) = row G(j, S) by symmetry
    Vec iu(r);
    for (int i = 0; i < r; ++i) {
        Scalar acc(0);
        for (int k = 0; k < r; ++k) acc += inv_(i, k) * u(k);
        iu(i) = acc;
    }
    Scalar schur = self;
    for (int i = 0; i < r; ++i) schur -= u(i) * iu(i);
    if (schur.is_zero()) return false;
    // block inverse update
    Scalar si = schur.inv();
    Mat ninv = mat_zero(r + 1, r + 1);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) ninv(i, j) = inv_(i, j) + si * iu(i) * iu(j);
    for (int i = 0; i < r; ++i) {
        ninv(i, r) = -si * iu(i);
        ninv(r, i) = -si * iu(i);
    }
    ninv(r, r) = si;
    inv_ = std::move(ninv);
    return true;
}

} // namespace qsp
