#pragma once

// Cubic B-spline marginal bases with quantile-placed interior knots and
// second-difference coefficient penalties. Basis dimension k means k - 4
// interior knots plus order-4 padded boundary knots, giving exactly k
// basis functions.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace parksent::regress {

class BsplineBasis {
  public:
    static constexpr int kDegree = 3;

    static BsplineBasis from_data(std::span<const double> xs, int dim) {
        if (dim < 4)
            throw std::invalid_argument("BsplineBasis: dim must be >= 4");
        if (xs.empty())
            throw std::invalid_argument("BsplineBasis: empty data");
        std::vector<double> sorted(xs.begin(), xs.end());
        std::sort(sorted.begin(), sorted.end());
        double lo = sorted.front(), hi = sorted.back();
        if (hi <= lo) hi = lo + 1.0;  // degenerate data: widen the support

        BsplineBasis b;
        b.dim_ = dim;
        for (int i = 0; i <= kDegree; ++i) b.knots_.push_back(lo);
        const int n_interior = dim - kDegree - 1;
        for (int i = 0; i < n_interior; ++i) {
            const double frac = double(i + 1) / double(n_interior + 1);
            b.knots_.push_back(quantile(sorted, frac));
        }
        for (int i = 0; i <= kDegree; ++i) b.knots_.push_back(hi);
        // strictly nondecreasing knots; nudge duplicates in the interior
        for (std::size_t i = kDegree + 1;
             i + kDegree + 1 < b.knots_.size(); ++i)
            if (b.knots_[i] <= b.knots_[i - 1])
                b.knots_[i] = b.knots_[i - 1] + (hi - lo) * 1e-9;
        return b;
    }

    int dim() const { return dim_; }

    // one row of the design: values of all k basis functions at x
    Eigen::RowVectorXd row(double x) const {
        const int p = kDegree;
        const double lo = knots_[p];
        const double hi = knots_[knots_.size() - p - 1];
        if (x < lo) x = lo;
        if (x > hi) x = hi;

        // find the knot span
        int span = p;
        {
            int hi_span = static_cast<int>(knots_.size()) - p - 2;
            while (span < hi_span && x >= knots_[span + 1]) ++span;
        }

        // de Boor triangular scheme: N[0..p] for functions span-p..span
        std::vector<double> nvals(p + 1, 0.0), left(p + 1), right(p + 1);
        nvals[0] = 1.0;
        for (int j = 1; j <= p; ++j) {
            left[j] = x - knots_[span + 1 - j];
            right[j] = knots_[span + j] - x;
            double saved = 0.0;
            for (int r = 0; r < j; ++r) {
                const double denom = right[r + 1] + left[j - r];
                const double temp = denom != 0.0 ? nvals[r] / denom : 0.0;
                nvals[r] = saved + right[r + 1] * temp;
                saved = left[j - r] * temp;
            }
            nvals[j] = saved;
        }

        Eigen::RowVectorXd out = Eigen::RowVectorXd::Zero(dim_);
        for (int r = 0; r <= p; ++r) {
            const int idx = span - p + r;
            if (idx >= 0 && idx < dim_) out(idx) = nvals[r];
        }
        return out;
    }

    Eigen::MatrixXd design(std::span<const double> xs) const {
        Eigen::MatrixXd out(xs.size(), dim_);
        for (std::size_t i = 0; i < xs.size(); ++i) out.row(i) = row(xs[i]);
        return out;
    }

    // S = D'D with D the second-difference operator on coefficients
    Eigen::MatrixXd difference_penalty() const {
        const int k = dim_;
        Eigen::MatrixXd d = Eigen::MatrixXd::Zero(k - 2, k);
        for (int i = 0; i < k - 2; ++i) {
            d(i, i) = 1.0;
            d(i, i + 1) = -2.0;
            d(i, i + 2) = 1.0;
        }
        return d.transpose() * d;
    }

  private:
    static double quantile(const std::vector<double>& sorted, double frac) {
        const double pos = frac * double(sorted.size() - 1);
        const std::size_t i = static_cast<std::size_t>(pos);
        if (i + 1 >= sorted.size()) return sorted.back();
        const double w = pos - double(i);
        return sorted[i] * (1.0 - w) + sorted[i + 1] * w;
    }

    std::vector<double> knots_;
    int dim_ = 0;
};

}  // namespace parksent::regress
