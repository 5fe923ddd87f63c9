#include "skeinforge/library.hpp"

namespace skf {

SurfacePtr lib_S11() {
  static SurfacePtr s = make_surface({"a+", "b+", "a-", "b-"}, 0);
  return s;
}

SurfacePtr lib_S04() {
  static SurfacePtr s = make_surface({"p+", "p-", "q+", "q-", "r+", "r-"}, 0);
  return s;
}

SurfacePtr lib_S12() {
  static SurfacePtr s = make_surface({"a+", "b+", "a-", "b-", "v+", "v-"}, 0);
  return s;
}

SurfacePtr lib_S21() {
  static SurfacePtr s =
      make_surface({"a1+", "b1+", "a1-", "b1-", "a2+", "b2+", "a2-", "b2-"}, 0);
  return s;
}

SurfacePtr lib_surface(const std::string& name) {
  if (name == "S11") return lib_S11();
  if (name == "S04") return lib_S04();
  if (name == "S12") return lib_S12();
  if (name == "S21") return lib_S21();
  return nullptr;
}

}  // namespace skf
