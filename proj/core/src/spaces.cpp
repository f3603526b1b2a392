#include "chmhd/spaces.hpp"

#include "chmhd/error.hpp"

#include <memory>
#include <utility>

namespace chmhd {

FieldLayout Spaces::layout() const {
  FieldLayout l;
  int at = 0;
  for (int f = 0; f < kNumFields; ++f) {
    const int size = f == static_cast<int>(Field::multiplier)
                         ? 1
                         : space(static_cast<Field>(f)).n_dofs;
    l.offset[f] = at;
    l.size[f] = size;
    at += size;
  }
  l.total = at;
  return l;
}

const DofMap& Spaces::space(Field f) const {
  switch (f) {
    case Field::phase: return phase;
    case Field::chemical_potential: return chemical_potential;
    case Field::velocity: return velocity;
    case Field::pressure: return pressure;
    case Field::induction: return induction;
    case Field::multiplier: break;
  }
  throw Error("Spaces::space: the multiplier has no finite element space");
}

Spaces build_spaces(int n, const SpaceSpec& spec) {
  Spaces s;
  s.mesh = std::make_unique<Mesh>(build_unit_square_mesh(n));
  if (spec.periodic_x) {
    s.periodic = std::make_unique<PeriodicMap>(build_periodic_map(*s.mesh));
  }
  const PeriodicMap* per = s.periodic.get();

  BoundarySpec pressure_bc;
  pressure_bc.mean_zero = true;

  s.phase = build_dof_map(*s.mesh, ElementKind::Lagrange1, 1, BoundarySpec::none(), per);
  s.chemical_potential = s.phase;
  s.velocity = build_dof_map(*s.mesh, ElementKind::Mini, 2, spec.velocity_bc, per);
  s.pressure = build_dof_map(*s.mesh, ElementKind::Lagrange1, 1, pressure_bc, per);
  s.induction = build_dof_map(*s.mesh, ElementKind::Nedelec0, 1, spec.induction_bc, per);
  return s;
}

} // namespace chmhd
