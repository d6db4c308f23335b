#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace gradflow {

using Vec = std::vector<double>;
using StateView = std::span<const double>;
using StateOut = std::span<double>;

double dot(StateView a, StateView b);
double norm(StateView a);
double dist(StateView a, StateView b);

// Smallest eigenvalue of a symmetric n x n matrix (row-major), cyclic Jacobi.
double smallest_eigenvalue_sym(std::span<const double> a, int n);

// Solves a(n x n, row-major) * x = b in place via Gaussian elimination with
// partial pivoting. Returns false if the matrix is numerically singular.
bool solve_dense(std::vector<double> a, Vec b, Vec& x);

bool all_finite(StateView a);

}  // namespace gradflow
