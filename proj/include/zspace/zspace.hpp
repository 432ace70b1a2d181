#pragma once

#include "core.hpp"
#include "corpus.hpp"
#include "dyadic.hpp"
#include "grid.hpp"
#include "hsf_io.hpp"
#include "interp.hpp"
#include "kernel.hpp"
#include "norms.hpp"
#include "parallel.hpp"
#include "report.hpp"
#include "verify.hpp"
#include "whitney.hpp"
