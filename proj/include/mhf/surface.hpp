#pragma once

#include <string>
#include <vector>

#include "mhf/error.hpp"
#include "mhf/group.hpp"
#include "mhf/ribbon_map.hpp"

namespace mhf {

/// Compact surface type with boundary constraints and total area.
/// `genus` is the reduced genus: twice the handle count if orientable, the
/// cross-cap count otherwise.
struct SurfaceSpec {
  bool orientable = true;
  int genus = 0;
  std::vector<int> boundary_classes;  // one conjugacy class per boundary component
  double area = 1.0;

  int p() const noexcept { return static_cast<int>(boundary_classes.size()); }

  /// Throws InputError unless the parity/positivity rules hold and every
  /// class index is valid for `g` (when given).
  void validate(const FiniteGroup* g = nullptr) const {
    if (genus < 0) throw InputError("surface: genus must be non-negative");
    if (orientable && genus % 2 != 0) throw InputError("surface: orientable surfaces have even reduced genus");
    if (!orientable && genus < 1) throw InputError("surface: non-orientable surfaces have reduced genus at least 1");
    if (!(area > 0.0)) throw InputError("surface: area must be positive");
    if (g) {
      for (int c : boundary_classes)
        if (c < 0 || c >= g->class_count()) throw InputError("surface: boundary class " + std::to_string(c) + " out of range");
    }
  }

  std::string describe() const {
    return std::string(orientable ? "orientable" : "non-orientable") + " g=" + std::to_string(genus) +
           " p=" + std::to_string(p());
  }
};

/// One-face model of the surface with the whole area on its face.
inline RibbonMap standard_map(const SurfaceSpec& s) {
  s.validate();
  return standard_map(s.orientable, s.genus, s.p()).with_areas({s.area});
}

}  // namespace mhf
