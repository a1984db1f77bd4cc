// Partition function of a torus: closed formula, a two-face map, and the covering mass.
#include <cstdio>

#include "mhf/covering.hpp"

int main() {
  using namespace mhf;
  auto g = FiniteGroup::builtin("S3");
  auto pi = JumpMeasure::uniform_nonidentity(g, 1.0);
  HeatKernel q(pi);
  SurfaceSpec torus{true, 2, {}, 1.0};
  auto map = split_face(standard_map(torus), 0, 0, 2, std::pair{0.5, 0.5}).fine;
  std::printf("formula  %.12f\n", partition_formula(torus, q));
  std::printf("graph    %.12f (%d faces)\n", partition_graph(map, GConstraints::from_spec(torus), q), map.face_count());
  std::printf("covering %.12f\n", bb_mass_integrated(pi, torus).mass);
}
