#pragma once

#include "casp/benchmarks.hpp"
#include "casp/cardinality.hpp"
#include "casp/consistency_check.hpp"
#include "casp/csp.hpp"
#include "casp/csp_io.hpp"
#include "casp/encoder.hpp"
#include "casp/error.hpp"
#include "casp/nogoods.hpp"
#include "casp/oracle.hpp"
#include "casp/pipeline.hpp"
#include "casp/program.hpp"
#include "casp/program_io.hpp"
#include "casp/propagator.hpp"
#include "casp/random_csp.hpp"
#include "casp/semantics.hpp"
#include "casp/solver.hpp"
#include "casp/table.hpp"
