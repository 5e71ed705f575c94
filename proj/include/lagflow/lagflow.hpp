// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "lagflow/advect.hpp"
#include "lagflow/biot_savart.hpp"
#include "lagflow/bump.hpp"
#include "lagflow/control.hpp"
#include "lagflow/core.hpp"
#include "lagflow/diagnostics.hpp"
#include "lagflow/domain.hpp"
#include "lagflow/errors.hpp"
#include "lagflow/euler.hpp"
#include "lagflow/extension.hpp"
#include "lagflow/field.hpp"
#include "lagflow/fixed_point.hpp"
#include "lagflow/grid_oracle.hpp"
#include "lagflow/io.hpp"
#include "lagflow/isotopy.hpp"
#include "lagflow/linalg.hpp"
#include "lagflow/markers.hpp"
#include "lagflow/mesh.hpp"
#include "lagflow/neumann.hpp"
#include "lagflow/potential.hpp"
#include "lagflow/reconstruct.hpp"
#include "lagflow/surface_distance.hpp"
