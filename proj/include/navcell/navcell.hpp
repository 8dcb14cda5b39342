#pragma once

#include "navcell/benchmark.hpp"
#include "navcell/cbf.hpp"
#include "navcell/cellgraph.hpp"
#include "navcell/decomp2d.hpp"
#include "navcell/decomp3d.hpp"
#include "navcell/error.hpp"
#include "navcell/eval.hpp"
#include "navcell/geom.hpp"
#include "navcell/gnn.hpp"
#include "navcell/io.hpp"
#include "navcell/pipeline.hpp"
#include "navcell/scenarios.hpp"
#include "navcell/search.hpp"
