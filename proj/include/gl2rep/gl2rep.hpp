#pragma once

// Umbrella header: the full workbench.

#include "gl2rep/cind_truncation.hpp"
#include "gl2rep/dims_table.hpp"
#include "gl2rep/errors.hpp"
#include "gl2rep/fp.hpp"
#include "gl2rep/fp_matrix.hpp"
#include "gl2rep/growth.hpp"
#include "gl2rep/krep.hpp"
#include "gl2rep/p1_line.hpp"
#include "gl2rep/padic.hpp"
#include "gl2rep/pi_quotient.hpp"
#include "gl2rep/report.hpp"
#include "gl2rep/subgroups.hpp"
#include "gl2rep/tree_vertex.hpp"
#include "gl2rep/weight.hpp"
#include "gl2rep/zmat2.hpp"
