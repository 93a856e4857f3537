#pragma once

#include <Eigen/Core>

#include <vector>

namespace dyadic {

/// Static kd-tree over the rows of a coordinate matrix. Radius queries
/// return candidates by squared distance; callers apply the exact metric.
class KdTree {
public:
    explicit KdTree(const Eigen::MatrixXd& points, int leaf_size = 16);

    /// Appends every index i with |p_i - q|^2 <= r2.
    void radius_candidates(const double* q, double r2, std::vector<int>& out) const;

    int dim() const { return dim_; }

private:
    struct Node {
        int begin = 0;
        int end = 0;
        int left = -1;
        int right = -1;
    };

    int build(int begin, int end);
    double box_gap2(int node, const double* q) const;

    int dim_ = 0;
    int leaf_size_;
    std::vector<double> pts_;    // row-major copy, permuted by order_
    std::vector<int> order_;     // original index of each stored row
    std::vector<Node> nodes_;
    std::vector<double> lo_, hi_;  // per-node bounding boxes, dim_ entries each
};

}  // namespace dyadic
