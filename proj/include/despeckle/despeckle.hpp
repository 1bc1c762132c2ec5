#pragma once

#include "baselines.hpp"
#include "bench.hpp"
#include "diffusion.hpp"
#include "filter.hpp"
#include "image.hpp"
#include "metrics.hpp"
#include "parallel.hpp"
#include "pgm.hpp"
#include "phantom.hpp"
#include "pipeline.hpp"
#include "speckle.hpp"
#include "tensor.hpp"
