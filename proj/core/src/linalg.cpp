#include "chmhd/linalg.hpp"

#include "chmhd/error.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#ifdef CHMHD_HAVE_UMFPACK
#include <Eigen/UmfPackSupport>
#endif

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>

namespace chmhd {

SparseMatrix triplets_to_csr(const TripletList& entries, int n_rows, int n_cols) {
  if (n_rows < 0 || n_cols < 0) throw Error("triplets_to_csr: negative dimension");
  for (const Triplet& t : entries) {
    if (t.row < 0 || t.row >= n_rows || t.col < 0 || t.col >= n_cols)
      throw Error("triplets_to_csr: entry (" + std::to_string(t.row) + "," +
                  std::to_string(t.col) + ") out of range");
  }

  TripletList sorted = entries;
  // Value bits participate in the ordering so that duplicate (row, col) groups
  // are accumulated in a canonical order: the result is then bit-identical for
  // any permutation of the input.
  std::sort(sorted.begin(), sorted.end(), [](const Triplet& a, const Triplet& b) {
    if (a.row != b.row) return a.row < b.row;
    if (a.col != b.col) return a.col < b.col;
    return std::bit_cast<std::uint64_t>(a.value) < std::bit_cast<std::uint64_t>(b.value);
  });

  SparseMatrix A;
  A.n_rows = n_rows;
  A.n_cols = n_cols;
  A.row_ptr.assign(static_cast<size_t>(n_rows) + 1, 0);

  size_t i = 0;
  while (i < sorted.size()) {
    const int r = sorted[i].row;
    const int c = sorted[i].col;
    double sum = 0.0;
    while (i < sorted.size() && sorted[i].row == r && sorted[i].col == c) {
      sum += sorted[i].value;
      ++i;
    }
    A.col_idx.push_back(c);
    A.values.push_back(sum);
    A.row_ptr[static_cast<size_t>(r) + 1]++;
  }
  for (int r = 0; r < n_rows; ++r) A.row_ptr[r + 1] += A.row_ptr[r];
  return A;
}

Vector matvec(const SparseMatrix& A, const Vector& x) {
  if (static_cast<int>(x.size()) != A.n_cols) throw Error("matvec: size mismatch");
  Vector y(static_cast<size_t>(A.n_rows), 0.0);
  for (int r = 0; r < A.n_rows; ++r) {
    double s = 0.0;
    for (int k = A.row_ptr[r]; k < A.row_ptr[r + 1]; ++k) s += A.values[k] * x[A.col_idx[k]];
    y[r] = s;
  }
  return y;
}

SparseMatrix transpose(const SparseMatrix& A) {
  SparseMatrix T;
  T.n_rows = A.n_cols;
  T.n_cols = A.n_rows;
  T.row_ptr.assign(static_cast<size_t>(T.n_rows) + 1, 0);
  T.col_idx.resize(A.values.size());
  T.values.resize(A.values.size());
  for (int c : A.col_idx) T.row_ptr[c + 1]++;
  for (int r = 0; r < T.n_rows; ++r) T.row_ptr[r + 1] += T.row_ptr[r];
  std::vector<int> next(T.row_ptr.begin(), T.row_ptr.end() - 1);
  for (int r = 0; r < A.n_rows; ++r) {
    for (int k = A.row_ptr[r]; k < A.row_ptr[r + 1]; ++k) {
      const int pos = next[A.col_idx[k]]++;
      T.col_idx[pos] = r;
      T.values[pos] = A.values[k];
    }
  }
  return T;
}

void axpy(double alpha, const Vector& x, Vector& y) {
  if (x.size() != y.size()) throw Error("axpy: size mismatch");
  for (size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

double dot(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw Error("dot: size mismatch");
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const Vector& v) { return std::sqrt(dot(v, v)); }

namespace {

using EigenSparse = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

EigenSparse to_eigen(const SparseMatrix& A) {
  Eigen::Map<const Eigen::SparseMatrix<double, Eigen::RowMajor, int>> mapped(
      A.n_rows, A.n_cols, A.nnz(), A.row_ptr.data(), A.col_idx.data(), A.values.data());
  return EigenSparse(mapped);
}

} // namespace

struct SparseLUSolver::Impl {
#ifdef CHMHD_HAVE_UMFPACK
  Eigen::UmfPackLU<EigenSparse> lu;
  EigenSparse mat; // umfpack's refinement reads the matrix during solve()
#else
  Eigen::SparseLU<EigenSparse, Eigen::COLAMDOrdering<int>> lu;
#endif
  std::vector<int> pattern_row_ptr;
  std::vector<int> pattern_col_idx;
  bool analyzed = false;
  bool factorized = false;
  int n = 0;
};

SparseLUSolver::SparseLUSolver() : impl_(std::make_unique<Impl>()) {}
SparseLUSolver::~SparseLUSolver() = default;
SparseLUSolver::SparseLUSolver(SparseLUSolver&&) noexcept = default;
SparseLUSolver& SparseLUSolver::operator=(SparseLUSolver&&) noexcept = default;

void SparseLUSolver::factorize(const SparseMatrix& A) {
  if (A.n_rows != A.n_cols) throw SolverError("sparse LU: matrix not square");
  const bool same_pattern = impl_->analyzed && impl_->pattern_row_ptr == A.row_ptr &&
                            impl_->pattern_col_idx == A.col_idx;
#ifdef CHMHD_HAVE_UMFPACK
  // The solver aliases the matrix it factorized, so keep it in the Impl.
  impl_->mat = to_eigen(A);
  EigenSparse& ea = impl_->mat;
  if (!same_pattern) {
    // Nested dissection pays off handily on the widely coupled systems
    // assembled here; the analysis runs once per sparsity pattern.
    impl_->lu.umfpackControl()[UMFPACK_ORDERING] = UMFPACK_ORDERING_METIS;
    impl_->lu.analyzePattern(ea);
  }
  impl_->lu.factorize(ea);
  if (impl_->lu.info() != Eigen::Success) {
    impl_->factorized = false;
    throw SolverError("sparse LU factorization failed (singular or structurally "
                      "deficient matrix)");
  }
#else
  EigenSparse ea = to_eigen(A);
  if (!same_pattern) impl_->lu.analyzePattern(ea);
  impl_->lu.factorize(ea);
  if (impl_->lu.info() != Eigen::Success) {
    impl_->factorized = false;
    throw SolverError("sparse LU factorization failed (singular or structurally "
                      "deficient matrix): " + std::string(impl_->lu.lastErrorMessage()));
  }
#endif
  if (!same_pattern) {
    impl_->pattern_row_ptr = A.row_ptr;
    impl_->pattern_col_idx = A.col_idx;
    impl_->analyzed = true;
  }
  impl_->factorized = true;
  impl_->n = A.n_rows;
}

Vector SparseLUSolver::solve(const Vector& b) const {
  if (!impl_->factorized) throw SolverError("sparse LU: solve before factorize");
  if (static_cast<int>(b.size()) != impl_->n) throw SolverError("sparse LU: rhs size mismatch");
  Eigen::Map<const Eigen::VectorXd> eb(b.data(), b.size());
  Eigen::VectorXd ex = impl_->lu.solve(eb);
  if (impl_->lu.info() != Eigen::Success) throw SolverError("sparse LU: back-substitution failed");
  return Vector(ex.data(), ex.data() + ex.size());
}

bool SparseLUSolver::factorized() const { return impl_->factorized; }

Vector sparse_lu_solve(const SparseMatrix& A, const Vector& b) {
  if (A.n_rows != A.n_cols) throw SolverError("sparse_lu_solve: matrix not square");
  if (static_cast<int>(b.size()) != A.n_rows) throw SolverError("sparse_lu_solve: rhs size mismatch");
  SparseLUSolver lu;
  lu.factorize(A);
  Vector x = lu.solve(b);

  const double bnorm = norm2(b);
  if (bnorm == 0.0) return Vector(b.size(), 0.0);
  for (int round = 0; round < 2; ++round) {
    Vector r = matvec(A, x);
    for (size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
    if (norm2(r) / bnorm <= 1e-13) break;
    Vector dx = lu.solve(r);
    axpy(1.0, dx, x);
  }
  Vector r = matvec(A, x);
  for (size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
  if (norm2(r) / bnorm > 1e-12)
    throw SolverError("sparse_lu_solve: relative residual " + std::to_string(norm2(r) / bnorm) +
                      " above 1e-12 after refinement");
  return x;
}

namespace {

// ILU(0): incomplete factorization restricted to the pattern of A, stored as a
// modified copy of the CSR values (strict lower part holds L, diagonal+upper U).
struct Ilu0 {
  SparseMatrix f;      // factored values on the pattern of A
  std::vector<int> diag; // index of the diagonal entry in each row

  explicit Ilu0(const SparseMatrix& A) : f(A), diag(A.n_rows, -1) {
    const int n = A.n_rows;
    for (int r = 0; r < n; ++r) {
      for (int k = f.row_ptr[r]; k < f.row_ptr[r + 1]; ++k)
        if (f.col_idx[k] == r) diag[r] = k;
      if (diag[r] < 0) throw SolverError("ilu0: missing diagonal entry in row " + std::to_string(r));
    }
    std::vector<int> pos(n, -1); // column -> value index within the active row
    for (int i = 0; i < n; ++i) {
      for (int k = f.row_ptr[i]; k < f.row_ptr[i + 1]; ++k) pos[f.col_idx[k]] = k;
      for (int k = f.row_ptr[i]; k < f.row_ptr[i + 1]; ++k) {
        const int j = f.col_idx[k];
        if (j >= i) break;
        const double pivot = f.values[diag[j]];
        if (pivot == 0.0) throw SolverError("ilu0: zero pivot at row " + std::to_string(j));
        const double lij = f.values[k] / pivot;
        f.values[k] = lij;
        for (int kk = diag[j] + 1; kk < f.row_ptr[j + 1]; ++kk) {
          const int p = pos[f.col_idx[kk]];
          if (p >= 0) f.values[p] -= lij * f.values[kk];
        }
      }
      for (int k = f.row_ptr[i]; k < f.row_ptr[i + 1]; ++k) pos[f.col_idx[k]] = -1;
      if (f.values[diag[i]] == 0.0)
        throw SolverError("ilu0: zero pivot at row " + std::to_string(i));
    }
  }

  Vector apply(const Vector& rhs) const {
    const int n = f.n_rows;
    Vector y(rhs);
    for (int r = 0; r < n; ++r) {
      double s = y[r];
      for (int k = f.row_ptr[r]; k < diag[r]; ++k) s -= f.values[k] * y[f.col_idx[k]];
      y[r] = s;
    }
    for (int r = n - 1; r >= 0; --r) {
      double s = y[r];
      for (int k = diag[r] + 1; k < f.row_ptr[r + 1]; ++k) s -= f.values[k] * y[f.col_idx[k]];
      y[r] = s / f.values[diag[r]];
    }
    return y;
  }
};

} // namespace

std::pair<Vector, SolveReport> gmres_solve(const SparseMatrix& A, const Vector& b, double tol,
                                           int restart, int max_iter, Preconditioner precond) {
  if (A.n_rows != A.n_cols) throw SolverError("gmres_solve: matrix not square");
  if (static_cast<int>(b.size()) != A.n_rows) throw SolverError("gmres_solve: rhs size mismatch");
  if (restart < 1) throw SolverError("gmres_solve: restart must be >= 1");

  const int n = A.n_rows;
  const double bnorm = norm2(b);
  SolveReport report;
  if (bnorm == 0.0) {
    report.converged = true;
    return {Vector(static_cast<size_t>(n), 0.0), report};
  }

  std::unique_ptr<Ilu0> prec;
  if (precond == Preconditioner::ilu0) prec = std::make_unique<Ilu0>(A);
  auto apply_prec = [&](const Vector& v) { return prec ? prec->apply(v) : v; };

  Vector x(static_cast<size_t>(n), 0.0);
  int total_iters = 0;
  const int m = restart;

  // Right-preconditioned restarted GMRES with modified Gram-Schmidt and Givens
  // rotations; tracks the true residual of the original system.
  while (total_iters < max_iter) {
    Vector r = matvec(A, x);
    for (int i = 0; i < n; ++i) r[i] = b[i] - r[i];
    double beta = norm2(r);
    if (beta / bnorm <= tol) break;

    std::vector<Vector> V;
    V.reserve(m + 1);
    Vector v0(r);
    for (double& v : v0) v /= beta;
    V.push_back(std::move(v0));

    std::vector<std::vector<double>> H(m + 1, std::vector<double>(m, 0.0));
    std::vector<double> cs(m, 0.0), sn(m, 0.0), g(m + 1, 0.0);
    g[0] = beta;

    int k = 0;
    for (; k < m && total_iters < max_iter; ++k, ++total_iters) {
      Vector w = matvec(A, apply_prec(V[k]));
      for (int i = 0; i <= k; ++i) {
        H[i][k] = dot(w, V[i]);
        axpy(-H[i][k], V[i], w);
      }
      H[k + 1][k] = norm2(w);
      if (H[k + 1][k] > 0.0) {
        for (double& v : w) v /= H[k + 1][k];
      }
      V.push_back(std::move(w));

      for (int i = 0; i < k; ++i) {
        const double t = cs[i] * H[i][k] + sn[i] * H[i + 1][k];
        H[i + 1][k] = -sn[i] * H[i][k] + cs[i] * H[i + 1][k];
        H[i][k] = t;
      }
      const double denom = std::hypot(H[k][k], H[k + 1][k]);
      if (denom == 0.0) { ++k; ++total_iters; break; }
      cs[k] = H[k][k] / denom;
      sn[k] = H[k + 1][k] / denom;
      H[k][k] = denom;
      H[k + 1][k] = 0.0;
      g[k + 1] = -sn[k] * g[k];
      g[k] = cs[k] * g[k];
      if (std::abs(g[k + 1]) / bnorm <= tol) { ++k; ++total_iters; break; }
    }

    // Back-substitute for the Krylov coefficients and update x.
    std::vector<double> y(k, 0.0);
    for (int i = k - 1; i >= 0; --i) {
      double s = g[i];
      for (int j = i + 1; j < k; ++j) s -= H[i][j] * y[j];
      y[i] = s / H[i][i];
    }
    Vector z(static_cast<size_t>(n), 0.0);
    for (int j = 0; j < k; ++j) axpy(y[j], V[j], z);
    axpy(1.0, apply_prec(z), x);
    if (k == 0) break;
  }

  Vector r = matvec(A, x);
  for (int i = 0; i < n; ++i) r[i] = b[i] - r[i];
  report.residual_norm = norm2(r) / bnorm;
  report.iterations = total_iters;
  report.converged = report.residual_norm <= tol;
  return {x, report};
}

} // namespace chmhd
