#pragma once

#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "starwm/observation.hpp"

namespace starwm {

/// Dense square cost matrix. Disallowed pairs hold kForbidden.
class CostMatrix {
public:
    static constexpr double kForbidden = std::numeric_limits<double>::infinity();

    CostMatrix() = default;
    explicit CostMatrix(size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {}

    size_t size() const noexcept { return n_; }
    double& operator()(size_t r, size_t c) { return data_[r * n_ + c]; }
    double operator()(size_t r, size_t c) const { return data_[r * n_ + c]; }
    bool forbidden(size_t r, size_t c) const { return (*this)(r, c) == kForbidden; }

private:
    size_t n_ = 0;
    std::vector<double> data_;
};

class InfeasibleAssignment : public std::runtime_error {
public:
    InfeasibleAssignment() : std::runtime_error("no perfect assignment avoids forbidden entries") {}
};

struct Assignment {
    /// row -> column
    std::vector<size_t> column_of_row;
    double total_cost = 0.0;
};

/// Exact minimum-cost perfect assignment (shortest augmenting path with potentials, O(n^3)).
/// Throws InfeasibleAssignment when every perfect assignment uses a forbidden entry.
Assignment hungarian_solve(const CostMatrix& cost);

/// Anything with a kind and a position; Entity and SnapshotEntity both qualify.
struct TypedPoint {
    std::string kind;
    Point pos;
};

std::vector<TypedPoint> typed_points(const std::vector<Entity>& entities);
std::vector<TypedPoint> typed_points(const std::vector<SnapshotEntity>& snapshots);

/// [[D_match, D_miss], [D_halluc, 0]] of size (M+N) x (N+M): match block holds same-kind
/// Euclidean distances, miss/halluc diagonals hold lambda.
CostMatrix build_augmented_cost(const std::vector<TypedPoint>& gt, const std::vector<TypedPoint>& pred,
                                double lambda);

struct AwdResult {
    double total_cost = 0.0;
    double awd = 0.0;
    std::vector<std::pair<size_t, size_t>> matches;  // (gt index, pred index)
    std::vector<size_t> misses;
    std::vector<size_t> hallucinations;
};

/// Augmented Wasserstein distance; awd({}, {}) is defined as 0.
AwdResult awd(const std::vector<TypedPoint>& gt, const std::vector<TypedPoint>& pred, double lambda);

/// Diagonal of a map, the default lambda (Flat64's 64x64 playable area gives 90.5).
double default_lambda(int width = 64, int height = 64);

}  // namespace starwm
