#pragma once

// Umbrella header: the full library.

#include "spinlab/core/scalar.hpp"
#include "spinlab/core/dense.hpp"
#include "spinlab/core/antilinear.hpp"
#include "spinlab/core/numeric.hpp"
#include "spinlab/core/parallel.hpp"

#include "spinlab/exterior.hpp"
#include "spinlab/clifford.hpp"
#include "spinlab/quaternion.hpp"
#include "spinlab/quat_reps.hpp"
#include "spinlab/oscillator.hpp"
#include "spinlab/grassmann.hpp"
#include "spinlab/witten.hpp"
#include "spinlab/torsor.hpp"
#include "spinlab/fda.hpp"
#include "spinlab/gerbe.hpp"
