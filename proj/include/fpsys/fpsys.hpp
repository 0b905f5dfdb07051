#pragma once

#include "fpsys/combinatorics.hpp"
#include "fpsys/errors.hpp"
#include "fpsys/field.hpp"
#include "fpsys/linear_system.hpp"
#include "fpsys/matrix.hpp"
#include "fpsys/rng.hpp"
#include "fpsys/sampling.hpp"
#include "fpsys/search.hpp"
#include "fpsys/slice_rank.hpp"
#include "fpsys/subspace.hpp"
#include "fpsys/text_io.hpp"
#include "fpsys/vector.hpp"
#include "fpsys/weight.hpp"
