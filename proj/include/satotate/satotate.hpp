#pragma once

#include "satotate/angles.hpp"
#include "satotate/cache.hpp"
#include "satotate/elliptic.hpp"
#include "satotate/equidist.hpp"
#include "satotate/error.hpp"
#include "satotate/modarith.hpp"
#include "satotate/parallel.hpp"
#include "satotate/prime_engine.hpp"
#include "satotate/prime_sums.hpp"
#include "satotate/report.hpp"
#include "satotate/st_measure.hpp"
