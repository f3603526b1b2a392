#pragma once

// Sparse/dense linear algebra used by the assembly and solver layers.
// Matrices live in CSR with sorted column indices; construction goes through
// triplet lists so assembly can stay order-independent.

#include <cstdint>
#include <memory>
#include <vector>

namespace chmhd {

using Vector = std::vector<double>;

struct Triplet {
  int row = 0;
  int col = 0;
  double value = 0.0;
};

using TripletList = std::vector<Triplet>;

struct SparseMatrix {
  int n_rows = 0;
  int n_cols = 0;
  std::vector<int> row_ptr;   // size n_rows + 1, nondecreasing
  std::vector<int> col_idx;   // strictly increasing within each row
  std::vector<double> values;

  int nnz() const { return static_cast<int>(values.size()); }
};

struct SolveReport {
  bool converged = false;
  int iterations = 0;
  double residual_norm = 0.0; // relative, recomputed from the returned x
};

// Sums duplicate entries. The result is bit-identical for any permutation of
// the input list: entries are canonically ordered before accumulation.
SparseMatrix triplets_to_csr(const TripletList& entries, int n_rows, int n_cols);

Vector matvec(const SparseMatrix& A, const Vector& x);

// Transpose as a new CSR matrix (exact: values are moved, never recombined).
SparseMatrix transpose(const SparseMatrix& A);

// y += alpha * x
void axpy(double alpha, const Vector& x, Vector& y);
double dot(const Vector& a, const Vector& b);
double norm2(const Vector& v);

// Direct solve via sparse LU with one round of iterative refinement.
// Throws SolverError on singular factorization or if the relative residual
// cannot be pushed below 1e-12 on a consistent system.
Vector sparse_lu_solve(const SparseMatrix& A, const Vector& b);

// Reusable LU factorization: the monolithic pattern is time-invariant, so the
// symbolic analysis is done once and only the numeric factorization repeats.
class SparseLUSolver {
public:
  SparseLUSolver();
  ~SparseLUSolver();
  SparseLUSolver(SparseLUSolver&&) noexcept;
  SparseLUSolver& operator=(SparseLUSolver&&) noexcept;

  // Factorizes A; reuses the symbolic analysis when the pattern matches the
  // previously analyzed one.
  void factorize(const SparseMatrix& A);
  // Back-substitution only; requires a prior factorize().
  Vector solve(const Vector& b) const;
  bool factorized() const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

enum class Preconditioner { none, ilu0 };

// Restarted GMRES. The report's residual_norm is the true relative residual
// recomputed from the returned iterate, and `converged` is derived from it.
std::pair<Vector, SolveReport> gmres_solve(const SparseMatrix& A, const Vector& b,
                                           double tol = 1e-12, int restart = 50,
                                           int max_iter = 1000,
                                           Preconditioner precond = Preconditioner::ilu0);

} // namespace chmhd
