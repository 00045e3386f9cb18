#pragma once

#include "nsdarcy/fem.hpp"

namespace nsdarcy {

/// Velocity and pressure on the fluid mesh, head on the porous mesh, all at
/// one level of one coupled mesh.
struct CoupledState {
  DiscreteField velocity;
  DiscreteField pressure;
  DiscreteField head;
};

}  // namespace nsdarcy
