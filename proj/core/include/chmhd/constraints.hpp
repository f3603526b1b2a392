#pragma once

// Reduction of the monolithic system to the free unknowns. Dirichlet rows and
// columns are eliminated (columns lift their boundary values to the right
// hand side), periodic slaves fold onto their masters with the orientation
// sign, and expand() undoes the whole thing.

#include <cstdint>
#include <vector>

#include "chmhd/linalg.hpp"
#include "chmhd/spaces.hpp"

namespace chmhd {

// Constrained entries of the per-field coefficient vectors; the stepper
// refreshes these each step from the scenario's boundary data. Unconstrained
// entries are ignored.
struct BoundaryValues {
  Vector velocity;
  Vector induction;
};

class ConstraintSet {
public:
  explicit ConstraintSet(const Spaces& spaces);

  int n_full() const { return static_cast<int>(kind_.size()); }
  int n_reduced() const { return n_reduced_; }

  // Copies the constrained entries for one field (full-length input).
  void set_values(Field f, const Vector& full_field_values);
  void set_values(const BoundaryValues& bc);

  // P^T A P as triplets plus the lifting vector P^T A g (reduced length).
  // The input order is preserved, so downstream CSR conversion stays
  // permutation-invariant. For Jacobian contributions acting on increments
  // the lift output can be ignored.
  void reduce_matrix(const TripletList& full, TripletList& reduced, Vector* lift) const;

  // P^T v.
  Vector reduce_vector(const Vector& full) const;

  // P x + g.
  Vector expand(const Vector& reduced) const;

  // Free entries of a full vector (initial Newton guess).
  Vector restrict_free(const Vector& full) const;

  bool is_free(int full_index) const { return kind_[full_index] == 0; }

private:
  FieldLayout layout_;
  std::vector<std::int8_t> kind_; // 0 free, 1 dirichlet, 2 slave
  std::vector<int> master_;       // full index, identity unless slave
  std::vector<std::int8_t> sign_;
  std::vector<double> value_;     // boundary values at dirichlet entries
  std::vector<int> reduced_;      // full -> reduced, -1 when constrained
  int n_reduced_ = 0;
};

} // namespace chmhd
