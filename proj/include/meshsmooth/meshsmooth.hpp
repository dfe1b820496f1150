#pragma once

#include "meshsmooth/assembly.hpp"
#include "meshsmooth/core.hpp"
#include "meshsmooth/io.hpp"
#include "meshsmooth/meshgen.hpp"
#include "meshsmooth/planar.hpp"
#include "meshsmooth/quality.hpp"
#include "meshsmooth/smooth_result.hpp"
#include "meshsmooth/surface.hpp"
