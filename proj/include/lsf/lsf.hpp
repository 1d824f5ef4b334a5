#pragma once

#include "lsf/types.hpp"
#include "lsf/geometry.hpp"
#include "lsf/parallel.hpp"
#include "lsf/ifs.hpp"
#include "lsf/families.hpp"
#include "lsf/distortion.hpp"
#include "lsf/cover.hpp"
#include "lsf/dimension.hpp"
#include "lsf/measure.hpp"
#include "lsf/probes.hpp"
#include "lsf/io.hpp"
#include "lsf/suites.hpp"
