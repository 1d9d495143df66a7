#include "scenegt/rig.h"

#include "scenegt/errors.h"
#include "scenegt/random.h"

namespace scenegt {

void RigBounds::Validate() const {
  if (!min.allFinite() || !max.allFinite() || !(min.array() < max.array()).all()) {
    throw PreconditionError("rig bounds require min < max on every axis");
  }
}

Rig SampleRig(const RigBounds& bounds, int n_aux, std::uint64_t seed) {
  bounds.Validate();
  if (n_aux < 0) throw PreconditionError("n_aux must be non-negative");
  constexpr std::uint32_t kRigDomain = 0x52494753;  // "RIGS"
  const Philox4x32 rng(seed);
  Rig rig;
  rig.bounds = bounds;
  rig.seed = seed;
  rig.aux_mounts.reserve(static_cast<std::size_t>(n_aux));
  for (int i = 0; i < n_aux; ++i) {
    const auto block = rng({static_cast<std::uint32_t>(i), 0, 0, kRigDomain});
    Eigen::Vector3d t;
    for (int axis = 0; axis < 3; ++axis) {
      t[axis] = ToUniform(block[axis], bounds.min[axis], bounds.max[axis]);
    }
    rig.aux_mounts.push_back(Pose::Translation(t));
  }
  return rig;
}

}  // namespace scenegt
