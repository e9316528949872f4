#pragma once

#include "error.hpp"
#include "point.hpp"
#include "rng.hpp"
#include "stats.hpp"
#include "parallel.hpp"
#include "geometry.hpp"
#include "gff.hpp"
#include "liouville.hpp"
#include "kpz.hpp"
#include "io.hpp"
#include "checks.hpp"
