#pragma once
// Node sets: finite point clouds with per-node cell sizes, subset masks, and
// nested set families for monotone-limit experiments. All constructions are
// deterministic; sphere layouts use a generalized spiral, volume shapes use
// lattice clipping, and CSV clouds pass through.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace capax {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct SubsetMask {
    std::vector<int> indices;  // sorted, unique

    SubsetMask() = default;
    explicit SubsetMask(std::vector<int> idx) : indices(std::move(idx)) {
        std::sort(indices.begin(), indices.end());
        indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
    }

    static SubsetMask full(int n) {
        std::vector<int> idx(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
        return SubsetMask(std::move(idx));
    }

    std::size_t size() const { return indices.size(); }
    bool empty() const { return indices.empty(); }

    bool contains(int i) const {
        return std::binary_search(indices.begin(), indices.end(), i);
    }

    bool is_subset_of(const SubsetMask& other) const {
        return std::includes(other.indices.begin(), other.indices.end(), indices.begin(),
                             indices.end());
    }

    SubsetMask complement(int n) const {
        std::vector<int> out;
        for (int i = 0; i < n; ++i)
            if (!contains(i)) out.push_back(i);
        return SubsetMask(std::move(out));
    }

    bool operator==(const SubsetMask& other) const { return indices == other.indices; }
};

struct NodeSet {
    Matrix points;      // one node per row
    Vector cell_sizes;  // nearest-neighbor distance per node
    int dim = 0;
    enum class CellShape { cube, disc };
    CellShape cell_shape = CellShape::cube;
    int cell_dim = 0;  // intrinsic dimension of the reference cell
    std::string id;
    std::map<std::string, SubsetMask> labels;

    int size() const { return static_cast<int>(points.rows()); }
};

struct ShapeSpec {
    enum class Kind { ball, sphere, box, annulus, cloud };
    Kind kind = Kind::ball;
    Vector center;  // ball, sphere, annulus
    double r = 0.0;
    double r_in = 0.0, r_out = 0.0;  // annulus
    Vector lo, hi;                   // box
    std::string path;                // cloud
    int dim = 0;                     // cloud: coordinate columns (0 = all)
};

enum class ExhaustionMode { increasing, decreasing };
enum class ExhaustionStrategy { index, radial };

struct Exhaustion {
    std::vector<SubsetMask> stages;  // strictly monotone by inclusion per mode
    SubsetMask union_mask;           // union of all stages
    ExhaustionMode mode = ExhaustionMode::increasing;
};

namespace detail {

inline void fill_cell_sizes(NodeSet& nodes, double lone_node_scale) {
    const int n = nodes.size();
    nodes.cell_sizes.resize(n);
    if (n == 1) {
        nodes.cell_sizes(0) = lone_node_scale;
        return;
    }
    for (int i = 0; i < n; ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            double d = (nodes.points.row(i) - nodes.points.row(j)).norm();
            best = std::min(best, d);
        }
        if (best <= 0.0) throw std::invalid_argument("node set has duplicate points");
        nodes.cell_sizes(i) = best;
    }
}

// Generalized spiral on the unit 2-sphere: latitudes advance uniformly in
// height, longitudes by an increment shrinking with circumference.
inline Matrix sphere_spiral(int n) {
    Matrix pts(n, 3);
    double phi = 0.0;
    for (int k = 0; k < n; ++k) {
        double h = -1.0 + 2.0 * static_cast<double>(k) / static_cast<double>(n - 1);
        double s = std::sqrt(std::max(0.0, 1.0 - h * h));
        if (k == 0 || k == n - 1)
            phi = 0.0;
        else
            phi += 3.6 / (std::sqrt(static_cast<double>(n)) * s);
        pts(k, 0) = s * std::cos(phi);
        pts(k, 1) = s * std::sin(phi);
        pts(k, 2) = h;
    }
    return pts;
}

inline Matrix grid_points(const Vector& lo, const Vector& hi, int res) {
    const int dim = static_cast<int>(lo.size());
    const int total = static_cast<int>(std::pow(static_cast<double>(res), dim) + 0.5);
    Matrix pts(total, dim);
    for (int idx = 0; idx < total; ++idx) {
        int rem = idx;
        for (int d = 0; d < dim; ++d) {
            int k = rem % res;
            rem /= res;
            pts(idx, d) = res == 1 ? 0.5 * (lo(d) + hi(d))
                                   : lo(d) + (hi(d) - lo(d)) * static_cast<double>(k) /
                                                 static_cast<double>(res - 1);
        }
    }
    return pts;
}

inline Matrix read_csv_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open point-cloud file: " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        std::vector<double> row;
        double v;
        while (ss >> v) row.push_back(v);
        if (row.empty()) continue;
        if (!rows.empty() && rows.front().size() != row.size())
            throw std::invalid_argument("ragged rows in point-cloud file: " + path);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::invalid_argument("empty point-cloud file: " + path);
    Matrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return out;
}

}  // namespace detail

inline NodeSet discretize(const ShapeSpec& shape, int resolution) {
    if (resolution < 1) throw std::invalid_argument("resolution must be >= 1");
    NodeSet nodes;
    switch (shape.kind) {
        case ShapeSpec::Kind::sphere: {
            if (shape.r <= 0.0) throw std::invalid_argument("sphere radius must be positive");
            const int dim = static_cast<int>(shape.center.size());
            nodes.dim = dim;
            if (dim == 3) {
                if (resolution < 2)
                    throw std::invalid_argument("sphere resolution must be >= 2 points");
                nodes.points = detail::sphere_spiral(resolution);
                nodes.cell_shape = NodeSet::CellShape::disc;
                nodes.cell_dim = 2;
            } else if (dim == 2) {
                nodes.points.resize(resolution, 2);
                for (int k = 0; k < resolution; ++k) {
                    double a = 2.0 * M_PI * static_cast<double>(k) / resolution;
                    nodes.points(k, 0) = std::cos(a);
                    nodes.points(k, 1) = std::sin(a);
                }
                nodes.cell_shape = NodeSet::CellShape::cube;
                nodes.cell_dim = 1;
            } else {
                throw std::invalid_argument("sphere supported in dimensions 2 and 3");
            }
            nodes.points *= shape.r;
            nodes.points.rowwise() += shape.center.transpose();
            nodes.id = "sphere_n" + std::to_string(resolution);
            detail::fill_cell_sizes(nodes, shape.r);
            return nodes;
        }
        case ShapeSpec::Kind::ball:
        case ShapeSpec::Kind::annulus: {
            double r_out = shape.kind == ShapeSpec::Kind::ball ? shape.r : shape.r_out;
            double r_in = shape.kind == ShapeSpec::Kind::ball ? 0.0 : shape.r_in;
            if (r_out <= 0.0 || r_in < 0.0 || (shape.kind == ShapeSpec::Kind::annulus && r_in >= r_out))
                throw std::invalid_argument("degenerate radii");
            const int dim = static_cast<int>(shape.center.size());
            Vector lo = Vector::Constant(dim, -r_out), hi = Vector::Constant(dim, r_out);
            Matrix raw = detail::grid_points(lo, hi, resolution);
            std::vector<int> keep;
            for (Eigen::Index i = 0; i < raw.rows(); ++i) {
                double rr = raw.row(i).norm();
                if (rr <= r_out + 1e-12 && rr >= r_in - 1e-12) keep.push_back(static_cast<int>(i));
            }
            if (keep.empty()) throw std::invalid_argument("no lattice nodes inside shape");
            nodes.dim = dim;
            nodes.points.resize(static_cast<Eigen::Index>(keep.size()), dim);
            for (std::size_t i = 0; i < keep.size(); ++i)
                nodes.points.row(static_cast<Eigen::Index>(i)) = raw.row(keep[i]);
            nodes.points.rowwise() += shape.center.transpose();
            nodes.cell_shape = NodeSet::CellShape::cube;
            nodes.cell_dim = dim;
            nodes.id = (shape.kind == ShapeSpec::Kind::ball ? "ball_res" : "annulus_res") +
                       std::to_string(resolution);
            detail::fill_cell_sizes(nodes, r_out);
            return nodes;
        }
        case ShapeSpec::Kind::box: {
            const int dim = static_cast<int>(shape.lo.size());
            if (dim == 0 || shape.hi.size() != dim)
                throw std::invalid_argument("box bounds dimension mismatch");
            for (int d = 0; d < dim; ++d)
                if (shape.lo(d) >= shape.hi(d))
                    throw std::invalid_argument("box bounds must satisfy lo < hi");
            nodes.dim = dim;
            nodes.points = detail::grid_points(shape.lo, shape.hi, resolution);
            nodes.cell_shape = NodeSet::CellShape::cube;
            nodes.cell_dim = dim;
            nodes.id = "box_res" + std::to_string(resolution);
            detail::fill_cell_sizes(nodes, (shape.hi - shape.lo).maxCoeff());
            return nodes;
        }
        case ShapeSpec::Kind::cloud: {
            Matrix raw = detail::read_csv_matrix(shape.path);
            int cols = static_cast<int>(raw.cols());
            int dim = shape.dim > 0 ? shape.dim : cols;
            bool has_cell = shape.dim > 0 && cols == dim + 1;
            if (shape.dim > 0 && cols != dim && !has_cell)
                throw std::invalid_argument("point-cloud column count does not match dim");
            nodes.dim = dim;
            nodes.points = raw.leftCols(dim);
            nodes.cell_shape = NodeSet::CellShape::cube;
            nodes.cell_dim = dim;
            nodes.id = "cloud";
            if (has_cell) {
                nodes.cell_sizes = raw.col(dim);
                if (nodes.cell_sizes.minCoeff() <= 0.0)
                    throw std::invalid_argument("cell sizes must be positive");
            } else {
                detail::fill_cell_sizes(nodes, 1.0);
            }
            return nodes;
        }
    }
    throw std::logic_error("unknown shape kind");
}

// Nested stage masks: increasing families grow to the target along the chosen
// ordering; decreasing families shrink from the full node set to the target.
inline Exhaustion build_exhaustion(const NodeSet& nodes, const SubsetMask& target, int stages,
                                   ExhaustionMode mode,
                                   ExhaustionStrategy strategy = ExhaustionStrategy::index) {
    if (stages < 2) throw std::invalid_argument("need at least 2 stages");
    if (target.empty()) throw std::invalid_argument("target must be nonempty");
    const int n = nodes.size();

    auto ordered = [&](const std::vector<int>& idx) {
        std::vector<int> out = idx;
        if (strategy == ExhaustionStrategy::radial) {
            Eigen::RowVectorXd centroid = Eigen::RowVectorXd::Zero(nodes.dim);
            for (int i : target.indices) centroid += nodes.points.row(i);
            centroid /= static_cast<double>(target.size());
            std::stable_sort(out.begin(), out.end(), [&](int a, int b) {
                return (nodes.points.row(a) - centroid).norm() <
                       (nodes.points.row(b) - centroid).norm();
            });
        }
        return out;
    };

    Exhaustion ex;
    ex.mode = mode;
    if (mode == ExhaustionMode::increasing) {
        if (stages > static_cast<int>(target.size()))
            throw std::invalid_argument("more stages than target nodes");
        std::vector<int> order = ordered(target.indices);
        for (int j = 1; j <= stages; ++j) {
            std::size_t k = (target.size() * static_cast<std::size_t>(j)) /
                            static_cast<std::size_t>(stages);
            ex.stages.emplace_back(std::vector<int>(order.begin(),
                                                    order.begin() + static_cast<long>(k)));
        }
        ex.union_mask = ex.stages.back();
    } else {
        std::vector<int> extras;
        for (int i = 0; i < n; ++i)
            if (!target.contains(i)) extras.push_back(i);
        if (stages - 1 > static_cast<int>(extras.size()))
            throw std::invalid_argument("more stages than removable nodes");
        std::vector<int> order = ordered(extras);
        for (int j = 0; j < stages; ++j) {
            std::size_t keep = (extras.size() * static_cast<std::size_t>(stages - 1 - j)) /
                               static_cast<std::size_t>(stages - 1);
            std::vector<int> idx = target.indices;
            idx.insert(idx.end(), order.begin(), order.begin() + static_cast<long>(keep));
            ex.stages.emplace_back(std::move(idx));
        }
        ex.union_mask = ex.stages.front();
    }
    for (std::size_t j = 1; j < ex.stages.size(); ++j) {
        const SubsetMask& small_mask =
            mode == ExhaustionMode::increasing ? ex.stages[j - 1] : ex.stages[j];
        const SubsetMask& big_mask =
            mode == ExhaustionMode::increasing ? ex.stages[j] : ex.stages[j - 1];
        if (!(small_mask.is_subset_of(big_mask) && small_mask.size() < big_mask.size()))
            throw std::invalid_argument("exhaustion stages are not strictly nested");
    }
    return ex;
}

}  // namespace capax
