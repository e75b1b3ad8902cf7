#pragma once

// Umbrella header for the library: similarity graphs, the subgraph MRF,
// contrastive losses, spectral tooling, sphere-constrained optimization,
// the max-entropy programs and the multi-modal graph constructions.

#include "specnce/datasets.hpp"
#include "specnce/eig.hpp"
#include "specnce/embedding.hpp"
#include "specnce/error.hpp"
#include "specnce/graph.hpp"
#include "specnce/harness.hpp"
#include "specnce/io.hpp"
#include "specnce/kernels.hpp"
#include "specnce/losses.hpp"
#include "specnce/maxent.hpp"
#include "specnce/mrf.hpp"
#include "specnce/multimodal.hpp"
#include "specnce/optimize.hpp"
#include "specnce/rng.hpp"
#include "specnce/spectral.hpp"
#include "specnce/util.hpp"
#include "specnce/verify.hpp"
