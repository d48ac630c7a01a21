#pragma once

#include "agreement/benchmark.hpp"
#include "agreement/build.hpp"
#include "agreement/connectivity.hpp"
#include "agreement/decomposition.hpp"
#include "agreement/display_graph.hpp"
#include "agreement/error.hpp"
#include "agreement/generator.hpp"
#include "agreement/hdt.hpp"
#include "agreement/label.hpp"
#include "agreement/newick.hpp"
#include "agreement/oracle.hpp"
#include "agreement/profile.hpp"
#include "agreement/verify.hpp"
#include "agreement/xtree.hpp"
