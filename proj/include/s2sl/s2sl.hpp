#pragma once

// Umbrella header pulling in the whole library.

#include "s2sl/dataset.hpp"
#include "s2sl/errors.hpp"
#include "s2sl/eval.hpp"
#include "s2sl/matrix.hpp"
#include "s2sl/nnet.hpp"
#include "s2sl/rng.hpp"
#include "s2sl/s2s.hpp"
