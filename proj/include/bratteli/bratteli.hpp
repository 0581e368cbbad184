#pragma once

// Umbrella header: iterated Kantorovich metrics on graded graphs, with the
// compactness and central-measure diagnostics built on top of them.

#include "bratteli/central_measure.hpp"
#include "bratteli/compactness.hpp"
#include "bratteli/cotransition.hpp"
#include "bratteli/errors.hpp"
#include "bratteli/families.hpp"
#include "bratteli/graded_graph.hpp"
#include "bratteli/internal_metric.hpp"
#include "bratteli/io.hpp"
#include "bratteli/rational.hpp"
#include "bratteli/transport.hpp"
#include "bratteli/version.hpp"
