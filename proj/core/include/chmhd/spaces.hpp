#pragma once

#include <array>
#include <memory>

#include "chmhd/dofmap.hpp"
#include "chmhd/mesh.hpp"

namespace chmhd {

// Unknown blocks of the coupled system, in monolithic ordering. The trailing
// multiplier enforces the zero-mean pressure gauge.
enum class Field : int {
  phase = 0,
  chemical_potential = 1,
  velocity = 2,
  pressure = 3,
  induction = 4,
  multiplier = 5,
};

constexpr int kNumFields = 6;

struct FieldLayout {
  std::array<int, kNumFields> offset{};
  std::array<int, kNumFields> size{};
  int total = 0;

  int begin(Field f) const { return offset[static_cast<int>(f)]; }
  int extent(Field f) const { return size[static_cast<int>(f)]; }
};

// Discrete spaces for one run: P1 phase/chemical potential/pressure, MINI
// velocity, lowest-order edge elements for the induction field, all on a
// shared mesh. The mesh sits behind a unique_ptr so the DofMap back-pointers
// survive moves; copying is disabled for the same reason.
struct Spaces {
  std::unique_ptr<Mesh> mesh;
  std::unique_ptr<PeriodicMap> periodic;
  DofMap phase;
  DofMap chemical_potential;
  DofMap velocity;
  DofMap pressure;
  DofMap induction;

  Spaces() = default;
  Spaces(Spaces&&) = default;
  Spaces& operator=(Spaces&&) = default;
  Spaces(const Spaces&) = delete;
  Spaces& operator=(const Spaces&) = delete;

  FieldLayout layout() const;
  const DofMap& space(Field f) const;
};

struct SpaceSpec {
  BoundarySpec velocity_bc = BoundarySpec::all_sides(3);
  BoundarySpec induction_bc = BoundarySpec::all_sides(1);
  bool periodic_x = false;
};

Spaces build_spaces(int n, const SpaceSpec& spec);

} // namespace chmhd
