#pragma once

#include "r3bench/array_api.hpp"
#include "r3bench/camera_corrupt.hpp"
#include "r3bench/core/parallel.hpp"
#include "r3bench/core/rng.hpp"
#include "r3bench/core/seed.hpp"
#include "r3bench/core/types.hpp"
#include "r3bench/core/validate.hpp"
#include "r3bench/corruption.hpp"
#include "r3bench/evaluation.hpp"
#include "r3bench/experiment.hpp"
#include "r3bench/geometry.hpp"
#include "r3bench/io/cloud_io.hpp"
#include "r3bench/io/dataset.hpp"
#include "r3bench/io/image_io.hpp"
#include "r3bench/io/records.hpp"
#include "r3bench/io/report_io.hpp"
#include "r3bench/lidar_corrupt.hpp"
#include "r3bench/misalign.hpp"
#include "r3bench/synth.hpp"

namespace r3bench {
inline constexpr const char* kVersion = "0.1.0";
}
