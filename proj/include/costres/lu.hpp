#pragma once

// Basis factorization for the simplex: sparse LU of the basis matrix (KLU) followed by
// product-form eta updates, one per basis change since the last refactorization.

#include <cmath>
#include <vector>

#include <Eigen/Core>
#include <suitesparse/klu.h>

namespace costres::lp {

class BasisFactor {
public:
    using Vector = Eigen::VectorXd;

    BasisFactor() { klu_defaults(&common_); }
    BasisFactor(const BasisFactor&) = delete;
    BasisFactor& operator=(const BasisFactor&) = delete;
    ~BasisFactor() { release(); }

    /// Factorizes the m x m matrix given in compressed-column form. Returns false when
    /// the matrix is numerically singular.
    bool factorize(int m, std::vector<int> col_start, std::vector<int> row_index, std::vector<double> values) {
        release();
        m_ = m;
        etas_.clear();
        eta_rows_.clear();
        eta_vals_.clear();
        eta_start_.assign(1, 0);
        if (m == 0) return true;
        ap_ = std::move(col_start);
        ai_ = std::move(row_index);
        ax_ = std::move(values);
        symbolic_ = klu_analyze(m, ap_.data(), ai_.data(), &common_);
        if (!symbolic_) return false;
        numeric_ = klu_factor(ap_.data(), ai_.data(), ax_.data(), symbolic_, &common_);
        if (!numeric_ || common_.status != KLU_OK) return false;
        if (!klu_rcond(symbolic_, numeric_, &common_) || !(common_.rcond > 1e-13)) return false;
        return true;
    }

    /// v := B^{-1} v
    void ftran(Vector& v) const {
        if (m_ == 0) return;
        klu_solve(symbolic_, numeric_, m_, 1, v.data(), &common_);
        for (std::size_t k = 0; k < etas_.size(); ++k) {
            const auto& e = etas_[k];
            double vr = v[e.row] / e.pivot;
            v[e.row] = vr;
            if (vr == 0.0) continue;
            for (int p = eta_start_[k]; p < eta_start_[k + 1]; ++p)
                v[eta_rows_[static_cast<std::size_t>(p)]] -= eta_vals_[static_cast<std::size_t>(p)] * vr;
        }
    }

    /// v := B^{-T} v
    void btran(Vector& v) const {
        if (m_ == 0) return;
        for (std::size_t k = etas_.size(); k-- > 0;) {
            const auto& e = etas_[k];
            double s = v[e.row];
            for (int p = eta_start_[k]; p < eta_start_[k + 1]; ++p)
                s -= eta_vals_[static_cast<std::size_t>(p)] * v[eta_rows_[static_cast<std::size_t>(p)]];
            v[e.row] = s / e.pivot;
        }
        klu_tsolve(symbolic_, numeric_, m_, 1, v.data(), &common_);
    }
    /// Returns the buffers passed to the last factorize call so they can be reused.
    void recycle(std::vector<int>& col_start, std::vector<int>& row_index, std::vector<double>& values) {
        release();
        m_ = 0;
        col_start = std::move(ap_);
        row_index = std::move(ai_);
        values = std::move(ax_);
    }

    /// Records the basis change at position `row`, where `alpha` = B^{-1} a_entering.
    void update(int row, const Vector& alpha) {
        etas_.push_back({row, alpha[row]});
        for (int i = 0; i < m_; ++i) {
            if (i == row) continue;
            double a = alpha[i];
            if (std::abs(a) > 1e-13) {
                eta_rows_.push_back(i);
                eta_vals_.push_back(a);
            }
        }
        eta_start_.push_back(static_cast<int>(eta_rows_.size()));
    }

    [[nodiscard]] std::size_t updates() const { return etas_.size(); }

private:
    struct Eta {
        int row;
        double pivot;
    };

    void release() {
        if (numeric_) klu_free_numeric(&numeric_, &common_);
        if (symbolic_) klu_free_symbolic(&symbolic_, &common_);
        numeric_ = nullptr;
        symbolic_ = nullptr;
    }

    int m_ = 0;
    mutable klu_common common_{};
    klu_symbolic* symbolic_ = nullptr;
    klu_numeric* numeric_ = nullptr;
    std::vector<int> ap_, ai_;
    std::vector<double> ax_;
    std::vector<Eta> etas_;
    std::vector<int> eta_rows_;
    std::vector<double> eta_vals_;
    std::vector<int> eta_start_{0};
};

}  // namespace costres::lp
