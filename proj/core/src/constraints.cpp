#include "chmhd/constraints.hpp"

#include "chmhd/error.hpp"

namespace chmhd {

ConstraintSet::ConstraintSet(const Spaces& spaces) {
  layout_ = spaces.layout();
  kind_.assign(layout_.total, 0);
  master_.resize(layout_.total);
  sign_.assign(layout_.total, 1);
  value_.assign(layout_.total, 0.0);
  for (int i = 0; i < layout_.total; ++i) master_[i] = i;

  for (int f = 0; f < kNumFields; ++f) {
    if (f == static_cast<int>(Field::multiplier)) continue;
    const DofMap& s = spaces.space(static_cast<Field>(f));
    const int off = layout_.offset[f];
    for (int i = 0; i < s.n_dofs; ++i) {
      switch (s.constraint[i]) {
        case DofConstraint::free:
          break;
        case DofConstraint::dirichlet:
          kind_[off + i] = 1;
          break;
        case DofConstraint::periodic_slave:
          kind_[off + i] = 2;
          master_[off + i] = off + s.master[i];
          sign_[off + i] = s.slave_sign[i];
          break;
      }
    }
  }
  // Masters of slaves must themselves be free; the dof map construction
  // rewrites any other case before we get here.
  for (int i = 0; i < layout_.total; ++i) {
    if (kind_[i] == 2 && kind_[master_[i]] != 0) {
      throw Error("ConstraintSet: periodic slave points at a constrained master");
    }
  }

  reduced_.assign(layout_.total, -1);
  int at = 0;
  for (int i = 0; i < layout_.total; ++i) {
    if (kind_[i] == 0) reduced_[i] = at++;
  }
  n_reduced_ = at;
}

void ConstraintSet::set_values(Field f, const Vector& full_field_values) {
  const int fi = static_cast<int>(f);
  if (static_cast<int>(full_field_values.size()) != layout_.size[fi]) {
    throw Error("ConstraintSet::set_values: field vector size mismatch");
  }
  const int off = layout_.offset[fi];
  for (int i = 0; i < layout_.size[fi]; ++i) {
    if (kind_[off + i] == 1) value_[off + i] = full_field_values[i];
  }
}

void ConstraintSet::set_values(const BoundaryValues& bc) {
  set_values(Field::velocity, bc.velocity);
  set_values(Field::induction, bc.induction);
}

void ConstraintSet::reduce_matrix(const TripletList& full, TripletList& reduced,
                                  Vector* lift) const {
  reduced.clear();
  reduced.reserve(full.size());
  if (lift != nullptr) lift->assign(static_cast<size_t>(n_reduced_), 0.0);
  for (const auto& t : full) {
    int r = t.row;
    double v = t.value;
    if (kind_[r] == 2) {
      v *= sign_[r];
      r = master_[r];
    }
    if (kind_[r] == 1) continue; // dirichlet test function: row dropped
    int c = t.col;
    if (kind_[c] == 2) {
      v *= sign_[c];
      c = master_[c];
    }
    if (kind_[c] == 1) {
      if (lift != nullptr) (*lift)[reduced_[r]] += v * value_[c];
      continue;
    }
    reduced.push_back({reduced_[r], reduced_[c], v});
  }
}

Vector ConstraintSet::reduce_vector(const Vector& full) const {
  Vector out(static_cast<size_t>(n_reduced_), 0.0);
  for (int i = 0; i < layout_.total; ++i) {
    if (kind_[i] == 0) {
      out[reduced_[i]] += full[i];
    } else if (kind_[i] == 2) {
      out[reduced_[master_[i]]] += sign_[i] * full[i];
    }
  }
  return out;
}

Vector ConstraintSet::expand(const Vector& reduced) const {
  Vector out(static_cast<size_t>(layout_.total), 0.0);
  for (int i = 0; i < layout_.total; ++i) {
    switch (kind_[i]) {
      case 0: out[i] = reduced[reduced_[i]]; break;
      case 1: out[i] = value_[i]; break;
      case 2: out[i] = sign_[i] * reduced[reduced_[master_[i]]]; break;
    }
  }
  return out;
}

Vector ConstraintSet::restrict_free(const Vector& full) const {
  Vector out(static_cast<size_t>(n_reduced_), 0.0);
  for (int i = 0; i < layout_.total; ++i) {
    if (kind_[i] == 0) out[reduced_[i]] = full[i];
  }
  return out;
}

} // namespace chmhd
