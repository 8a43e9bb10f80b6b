#pragma once

#include "chernlab/taylor.hpp"
#include "chernlab/small_matrix.hpp"
#include "chernlab/geometry.hpp"
#include "chernlab/fields.hpp"
#include "chernlab/quadrature.hpp"
#include "chernlab/manifolds.hpp"
#include "chernlab/chern.hpp"
#include "chernlab/linearization.hpp"
#include "chernlab/fd.hpp"
#include "chernlab/report.hpp"
#include "chernlab/harness.hpp"
