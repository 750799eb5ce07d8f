#pragma once

#include "distinf/askim.hpp"
#include "distinf/cads.hpp"
#include "distinf/decay.hpp"
#include "distinf/dijkstra.hpp"
#include "distinf/errors.hpp"
#include "distinf/eval.hpp"
#include "distinf/exact.hpp"
#include "distinf/graph.hpp"
#include "distinf/io.hpp"
#include "distinf/random.hpp"
#include "distinf/ranks.hpp"
#include "distinf/sampling.hpp"
#include "distinf/threshold_sketch.hpp"
#include "distinf/tskim.hpp"
#include "distinf/types.hpp"
