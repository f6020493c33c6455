#pragma once

#include "algorithms.hpp"
#include "core.hpp"
#include "experiment.hpp"
#include "numeric.hpp"
#include "probability.hpp"
#include "theory.hpp"
