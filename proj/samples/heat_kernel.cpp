// Heat kernel on S3 from a uniform jump measure, computed two ways.
#include <cstdio>

#include "mhf/characters.hpp"
#include "mhf/levy.hpp"

int main() {
  using namespace mhf;
  auto g = FiniteGroup::builtin("S3");
  auto pi = JumpMeasure::uniform_nonidentity(g, 1.0);
  auto table = character_table(g);
  for (double t : {0.1, 1.0, 5.0}) {
    auto series = heat_kernel_series(pi, t);
    auto chars = heat_kernel_characters(pi, t, table);
    std::printf("t=%-4g", t);
    for (int c = 0; c < g->class_count(); ++c) std::printf("  Q(class %d)=%.12f", c, series(g->classes().representative[static_cast<std::size_t>(c)]));
    std::printf("  routes differ by %.1e\n", series.max_abs_diff(chars));
  }
}
