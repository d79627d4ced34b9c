#pragma once

#include "kinetikos/errors.hpp"
#include "kinetikos/polynomial.hpp"
#include "kinetikos/point.hpp"
#include "kinetikos/random.hpp"
#include "kinetikos/trajectory.hpp"
#include "kinetikos/index_set.hpp"
#include "kinetikos/ranges.hpp"
#include "kinetikos/parallel.hpp"
#include "kinetikos/format.hpp"
#include "kinetikos/hypergraph.hpp"
#include "kinetikos/stats.hpp"
#include "kinetikos/envelope.hpp"
#include "kinetikos/sampling.hpp"
#include "kinetikos/voronoi.hpp"
#include "kinetikos/interference.hpp"
#include "kinetikos/range_counting.hpp"
#include "kinetikos/discrepancy.hpp"
#include "kinetikos/scenario.hpp"
#include "kinetikos/experiment.hpp"
