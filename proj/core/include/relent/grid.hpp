#pragma once

#include <vector>

#include "relent/types.hpp"

namespace relent {

/// Uniform periodic 1-D grid of N cells on [0, L); centers at (i+1/2)dx.
struct Grid1D {
    int N = 0;
    double L = 0.0;

    static Grid1D make(int N, double L);  // enforces N >= 8, L > 0

    double dx() const { return L / N; }
    double center(int i) const { return (i + 0.5) * dx(); }
    int wrap(int i) const { return ((i % N) + N) % N; }
    int cell_of(double x) const;

    bool operator==(const Grid1D& other) const { return N == other.N && L == other.L; }
};

/// Cell-indexed state array at one time.
struct Field {
    Grid1D grid;
    std::vector<Vec> U;
    double time = 0.0;

    static Field make(const Grid1D& grid, int n, double t = 0.0);
    int cells() const { return grid.N; }
};

/// sqrt( sum_i |a_i - b_i|^2 dx )
double l2_distance(const Field& a, const Field& b);

/// max_i |dU/dx| by central differences (shock-formation heuristic).
double max_gradient(const Field& f);

/// Conservative restriction of a field on a k-times finer grid (same L,
/// N_fine = k*N_coarse) onto the coarse grid by cell averaging.
Field restrict_to(const Field& fine, const Grid1D& coarse);

}  // namespace relent
