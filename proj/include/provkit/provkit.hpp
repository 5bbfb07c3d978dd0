#pragma once

#include "provkit/detector.hpp"
#include "provkit/fp_reduction.hpp"
#include "provkit/louvain.hpp"
#include "provkit/metrics.hpp"
#include "provkit/pipeline.hpp"
#include "provkit/prov_graph.hpp"
#include "provkit/trace_gen.hpp"
#include "provkit/trace_io.hpp"
#include "provkit/type_features.hpp"
#include "provkit/unknown_stats.hpp"
#include "provkit/uuid.hpp"
#include "provkit/version.hpp"
