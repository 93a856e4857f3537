#include <dyadic/spatial_index.hpp>

#include <algorithm>
#include <limits>
#include <numeric>

namespace dyadic {

KdTree::KdTree(const Eigen::MatrixXd& points, int leaf_size)
    : dim_(static_cast<int>(points.cols())), leaf_size_(std::max(1, leaf_size)) {
    const int n = static_cast<int>(points.rows());
    order_.resize(n);
    std::iota(order_.begin(), order_.end(), 0);
    pts_.resize(static_cast<std::size_t>(n) * dim_);
    for (int i = 0; i < n; ++i)
        for (int d = 0; d < dim_; ++d) pts_[static_cast<std::size_t>(i) * dim_ + d] = points(i, d);
    if (n > 0) build(0, n);
}

int KdTree::build(int begin, int end) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back({begin, end, -1, -1});
    lo_.resize(lo_.size() + dim_);
    hi_.resize(hi_.size() + dim_);

    double* lo = &lo_[static_cast<std::size_t>(id) * dim_];
    double* hi = &hi_[static_cast<std::size_t>(id) * dim_];
    std::fill(lo, lo + dim_, std::numeric_limits<double>::infinity());
    std::fill(hi, hi + dim_, -std::numeric_limits<double>::infinity());
    for (int i = begin; i < end; ++i) {
        for (int d = 0; d < dim_; ++d) {
            const double v = pts_[static_cast<std::size_t>(i) * dim_ + d];
            lo[d] = std::min(lo[d], v);
            hi[d] = std::max(hi[d], v);
        }
    }
    if (end - begin <= leaf_size_) return id;

    int axis = 0;
    for (int d = 1; d < dim_; ++d)
        if (hi[d] - lo[d] > hi[axis] - lo[axis]) axis = d;
    if (hi[axis] == lo[axis]) return id;

    // Median split on the widest axis; rows move with their original ids.
    const int mid = begin + (end - begin) / 2;
    std::vector<int> perm(end - begin);
    std::iota(perm.begin(), perm.end(), begin);
    std::nth_element(perm.begin(), perm.begin() + (mid - begin), perm.end(), [&](int a, int b) {
        return pts_[static_cast<std::size_t>(a) * dim_ + axis] < pts_[static_cast<std::size_t>(b) * dim_ + axis];
    });
    std::vector<double> rows(static_cast<std::size_t>(end - begin) * dim_);
    std::vector<int> ids(end - begin);
    for (int k = 0; k < end - begin; ++k) {
        std::copy_n(&pts_[static_cast<std::size_t>(perm[k]) * dim_], dim_, &rows[static_cast<std::size_t>(k) * dim_]);
        ids[k] = order_[perm[k]];
    }
    std::copy(rows.begin(), rows.end(), pts_.begin() + static_cast<std::ptrdiff_t>(begin) * dim_);
    std::copy(ids.begin(), ids.end(), order_.begin() + begin);

    const int left = build(begin, mid);
    const int right = build(mid, end);
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
}

double KdTree::box_gap2(int node, const double* q) const {
    const double* lo = &lo_[static_cast<std::size_t>(node) * dim_];
    const double* hi = &hi_[static_cast<std::size_t>(node) * dim_];
    double g = 0.0;
    for (int d = 0; d < dim_; ++d) {
        double t = 0.0;
        if (q[d] < lo[d]) t = lo[d] - q[d];
        else if (q[d] > hi[d]) t = q[d] - hi[d];
        g += t * t;
    }
    return g;
}

void KdTree::radius_candidates(const double* q, double r2, std::vector<int>& out) const {
    if (nodes_.empty()) return;
    std::vector<int> stack{0};
    while (!stack.empty()) {
        const int id = stack.back();
        stack.pop_back();
        if (box_gap2(id, q) > r2) continue;
        const Node& nd = nodes_[id];
        if (nd.left < 0) {
            for (int i = nd.begin; i < nd.end; ++i) {
                const double* p = &pts_[static_cast<std::size_t>(i) * dim_];
                double s = 0.0;
                for (int d = 0; d < dim_; ++d) s += (p[d] - q[d]) * (p[d] - q[d]);
                if (s <= r2) out.push_back(order_[i]);
            }
        } else {
            stack.push_back(nd.left);
            stack.push_back(nd.right);
        }
    }
}

}  // namespace dyadic
