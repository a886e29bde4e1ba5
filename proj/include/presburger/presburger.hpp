// Umbrella header.
#pragma once

#include "presburger/affine.hpp"
#include "presburger/arith.hpp"
#include "presburger/cells.hpp"
#include "presburger/formula.hpp"
#include "presburger/json_io.hpp"
#include "presburger/linear_term.hpp"
#include "presburger/nonstd_int.hpp"
#include "presburger/normalize.hpp"
#include "presburger/qelim.hpp"
#include "presburger/semantics.hpp"
#include "presburger/syntax.hpp"
#include "presburger/ubd.hpp"
#include "presburger/zgroup.hpp"
