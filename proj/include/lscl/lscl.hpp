#pragma once

// Umbrella header for the two-stage local-similarity classification toolkit.

#include "lscl/classifier.hpp"
#include "lscl/dataset.hpp"
#include "lscl/error.hpp"
#include "lscl/evaluation.hpp"
#include "lscl/neighbors.hpp"
#include "lscl/preprocess.hpp"
#include "lscl/sparse.hpp"
