#pragma once

#include "escat/medium.hpp"
#include "escat/geometry.hpp"
#include "escat/special_functions.hpp"
#include "escat/quadrature.hpp"
#include "escat/kernels.hpp"
#include "escat/forward.hpp"
#include "escat/disk_oracle.hpp"
#include "escat/inverse.hpp"
#include "escat/io.hpp"
