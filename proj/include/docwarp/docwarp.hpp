#pragma once

#include "docwarp/batch.hpp"
#include "docwarp/eval.hpp"
#include "docwarp/geometry.hpp"
#include "docwarp/image.hpp"
#include "docwarp/spline.hpp"
#include "docwarp/warper.hpp"
#include "docwarp/warpfield.hpp"
