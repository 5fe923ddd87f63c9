#pragma once

// Built-in library surfaces and their standard curves.

#include "skeinforge/surface.hpp"

namespace skf {

/// S11: torus with one hole, bands a b, order a+ b+ a- b-.
SurfacePtr lib_S11();
/// S04: sphere with four holes, bands p q r, order p+ p- q+ q- r+ r-.
SurfacePtr lib_S04();
/// S12: torus with two holes, bands a b v, order a+ b+ a- b- v+ v-.
SurfacePtr lib_S12();
/// S21: genus two with one hole, bands a1 b1 a2 b2, order
/// a1+ b1+ a1- b1- a2+ b2+ a2- b2-.
SurfacePtr lib_S21();

/// nullptr when the name is unknown.
SurfacePtr lib_surface(const std::string& name);

}  // namespace skf
