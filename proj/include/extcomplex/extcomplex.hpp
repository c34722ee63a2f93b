#pragma once

#include "extcomplex/error.hpp"
#include "extcomplex/rational.hpp"
#include "extcomplex/polyhedron.hpp"
#include "extcomplex/lp.hpp"
#include "extcomplex/vpolytope.hpp"
#include "extcomplex/hull.hpp"
#include "extcomplex/psd.hpp"
#include "extcomplex/distance.hpp"
#include "extcomplex/ellipsoid.hpp"
#include "extcomplex/extform.hpp"
#include "extcomplex/constructions.hpp"
#include "extcomplex/normalization.hpp"
#include "extcomplex/bounds.hpp"
#include "extcomplex/json_io.hpp"
