#pragma once

#include "n2d3/core.hpp"
#include "n2d3/degnce.hpp"
#include "n2d3/disentangle.hpp"
#include "n2d3/io/error.hpp"
#include "n2d3/io/image_io.hpp"
#include "n2d3/io/label_map.hpp"
#include "n2d3/io/report.hpp"
#include "n2d3/io/tensor_file.hpp"
#include "n2d3/kmeans.hpp"
#include "n2d3/km_synth.hpp"
#include "n2d3/parallel.hpp"
#include "n2d3/photometric.hpp"
#include "n2d3/rng.hpp"
#include "n2d3/scene_file.hpp"
#include "n2d3/sinkhorn.hpp"
