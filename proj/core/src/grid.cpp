#include "relent/grid.hpp"

#include <cmath>

namespace relent {

Grid1D Grid1D::make(int N, double L) {
    if (N < 8) throw Error("grid: need at least 8 cells, got " + std::to_string(N));
    if (!(L > 0.0)) throw Error("grid: domain length must be positive");
    return Grid1D{N, L};
}

int Grid1D::cell_of(double x) const {
    const double dxi = dx();
    int i = static_cast<int>(std::floor(x / dxi));
    return wrap(i);
}

Field Field::make(const Grid1D& grid, int n, double t) {
    Field f;
    f.grid = grid;
    f.U.assign(grid.N, Vec::Zero(n));
    f.time = t;
    return f;
}

double l2_distance(const Field& a, const Field& b) {
    if (!(a.grid == b.grid)) throw LedgerError("l2_distance: fields on different grids");
    double acc = 0.0;
    for (int i = 0; i < a.grid.N; ++i) acc += (a.U[i] - b.U[i]).squaredNorm();
    return std::sqrt(acc * a.grid.dx());
}

double max_gradient(const Field& f) {
    const int N = f.grid.N;
    const double two_dx = 2.0 * f.grid.dx();
    double worst = 0.0;
    for (int i = 0; i < N; ++i) {
        const Vec g = (f.U[f.grid.wrap(i + 1)] - f.U[f.grid.wrap(i - 1)]) / two_dx;
        worst = std::max(worst, g.lpNorm<Eigen::Infinity>());
    }
    return worst;
}

Field restrict_to(const Field& fine, const Grid1D& coarse) {
    if (fine.grid.L != coarse.L || fine.grid.N % coarse.N != 0)
        throw LedgerError("restrict_to: grids are not nested");
    const int k = fine.grid.N / coarse.N;
    Field out = Field::make(coarse, static_cast<int>(fine.U.front().size()), fine.time);
    for (int i = 0; i < coarse.N; ++i) {
        Vec acc = Vec::Zero(fine.U.front().size());
        for (int j = 0; j < k; ++j) acc += fine.U[i * k + j];
        out.U[i] = acc / k;
    }
    return out;
}

}  // namespace relent
