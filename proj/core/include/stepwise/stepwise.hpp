#pragma once

// Convenience header pulling in the whole public API.

#include "stepwise/pvalues.hpp"
#include "stepwise/threshold.hpp"
#include "stepwise/procedure.hpp"
#include "stepwise/builtins.hpp"
#include "stepwise/expr.hpp"
#include "stepwise/algebra.hpp"
#include "stepwise/dsl.hpp"
#include "stepwise/verify.hpp"
