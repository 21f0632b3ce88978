#pragma once

#include "socialscope/aggfn.hpp"
#include "socialscope/algebra.hpp"
#include "socialscope/discovery.hpp"
#include "socialscope/dsl.hpp"
#include "socialscope/error.hpp"
#include "socialscope/graph.hpp"
#include "socialscope/index_snapshot.hpp"
#include "socialscope/io.hpp"
#include "socialscope/presentation.hpp"
#include "socialscope/social_index.hpp"
