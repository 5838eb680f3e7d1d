#include "starwm/assignment.hpp"

#include <algorithm>
#include <cmath>

namespace starwm {

Assignment hungarian_solve(const CostMatrix& cost) {
    const size_t n = cost.size();
    Assignment result;
    if (n == 0) return result;

    double max_finite = 0.0;
    for (size_t r = 0; r < n; ++r) {
        for (size_t c = 0; c < n; ++c) {
            if (!cost.forbidden(r, c)) max_finite = std::max(max_finite, std::abs(cost(r, c)));
        }
    }
    // Any assignment touching a sentinel costs more than every all-finite one.
    const double sentinel = 10.0 * (static_cast<double>(n) * max_finite + 1.0);
    auto at = [&](size_t r, size_t c) { return cost.forbidden(r, c) ? sentinel : cost(r, c); };

    // 1-based potentials; p[j] is the row matched to column j, 0 meaning free.
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<size_t> p(n + 1, 0), way(n + 1, 0);
    for (size_t i = 1; i <= n; ++i) {
        p[0] = i;
        size_t j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const size_t i0 = p[j0];
            double delta = inf;
            size_t j1 = 0;
            for (size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = at(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    result.column_of_row.assign(n, 0);
    for (size_t j = 1; j <= n; ++j) result.column_of_row[p[j] - 1] = j - 1;
    for (size_t r = 0; r < n; ++r) {
        const size_t c = result.column_of_row[r];
        if (cost.forbidden(r, c)) throw InfeasibleAssignment();
        result.total_cost += cost(r, c);
    }
    return result;
}

std::vector<TypedPoint> typed_points(const std::vector<Entity>& entities) {
    std::vector<TypedPoint> out;
    out.reserve(entities.size());
    for (const auto& e : entities) out.push_back({e.kind, e.pos});
    return out;
}

std::vector<TypedPoint> typed_points(const std::vector<SnapshotEntity>& snapshots) {
    std::vector<TypedPoint> out;
    out.reserve(snapshots.size());
    for (const auto& s : snapshots) out.push_back({s.kind, s.pos});
    return out;
}

CostMatrix build_augmented_cost(const std::vector<TypedPoint>& gt, const std::vector<TypedPoint>& pred,
                                double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
    const size_t m = gt.size();
    const size_t n = pred.size();
    CostMatrix c(m + n, CostMatrix::kForbidden);
    for (size_t i = 0; i < m; ++i) {
        for (size_t j = 0; j < n; ++j) {
            if (gt[i].kind == pred[j].kind) c(i, j) = distance(gt[i].pos, pred[j].pos);
        }
        c(i, n + i) = lambda;
    }
    for (size_t j = 0; j < n; ++j) {
        c(m + j, j) = lambda;
        for (size_t k = 0; k < m; ++k) c(m + j, n + k) = 0.0;
    }
    return c;
}

AwdResult awd(const std::vector<TypedPoint>& gt, const std::vector<TypedPoint>& pred, double lambda) {
    AwdResult r;
    const size_t m = gt.size();
    const size_t n = pred.size();
    if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
    if (m + n == 0) return r;
    if (m == 0 || n == 0) {
        for (size_t i = 0; i < m; ++i) r.misses.push_back(i);
        for (size_t j = 0; j < n; ++j) r.hallucinations.push_back(j);
        r.total_cost = lambda * static_cast<double>(m + n);
        r.awd = lambda;
        return r;
    }

    const auto solved = hungarian_solve(build_augmented_cost(gt, pred, lambda));
    std::vector<char> pred_matched(n, 0);
    for (size_t i = 0; i < m; ++i) {
        const size_t col = solved.column_of_row[i];
        if (col < n) {
            r.matches.emplace_back(i, col);
            pred_matched[col] = 1;
        } else {
            r.misses.push_back(i);
        }
    }
    for (size_t j = 0; j < n; ++j) {
        if (!pred_matched[j]) r.hallucinations.push_back(j);
    }
    r.total_cost = solved.total_cost;
    r.awd = r.total_cost / static_cast<double>(m + n);
    return r;
}

double default_lambda(int width, int height) {
    return std::hypot(static_cast<double>(width), static_cast<double>(height));
}

}  // namespace starwm
