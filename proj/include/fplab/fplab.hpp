#pragma once

// Umbrella header: pulls in the whole toolkit.

#include "fplab/bounds.hpp"
#include "fplab/config.hpp"
#include "fplab/core.hpp"
#include "fplab/harness.hpp"
#include "fplab/operators.hpp"
#include "fplab/oracle.hpp"
#include "fplab/solvers.hpp"
#include "fplab/trace.hpp"
#include "fplab/trace_io.hpp"
#include "fplab/verify.hpp"
