#pragma once

#include "devpool/bench.hpp"
#include "devpool/error.hpp"
#include "devpool/evaluation.hpp"
#include "devpool/image_io.hpp"
#include "devpool/index.hpp"
#include "devpool/index_config.hpp"
#include "devpool/logistic.hpp"
#include "devpool/nelder_mead.hpp"
#include "devpool/pooling.hpp"
#include "devpool/raster.hpp"
#include "devpool/similarity.hpp"
#include "devpool/statistics.hpp"
#include "devpool/summation.hpp"
