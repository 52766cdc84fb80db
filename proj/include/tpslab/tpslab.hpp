#pragma once

#include "construction.hpp"
#include "experiments.hpp"
#include "invariants.hpp"
#include "io.hpp"
#include "klocal.hpp"
#include "labeling.hpp"
#include "linalg.hpp"
#include "parallel.hpp"
#include "spectra.hpp"
#include "tps.hpp"
