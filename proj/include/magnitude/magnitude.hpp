#pragma once

#include "magnitude/analysis.hpp"
#include "magnitude/error.hpp"
#include "magnitude/kernel.hpp"
#include "magnitude/manifest.hpp"
#include "magnitude/point_cloud.hpp"
#include "magnitude/scales.hpp"
#include "magnitude/shape_spec.hpp"
#include "magnitude/shapes.hpp"
#include "magnitude/summation.hpp"
#include "magnitude/table.hpp"
#include "magnitude/threads.hpp"
#include "magnitude/valuation.hpp"
#include "magnitude/weighting.hpp"
