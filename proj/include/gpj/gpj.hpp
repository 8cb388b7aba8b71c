// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "gpj/errors.hpp"
#include "gpj/mesh.hpp"
#include "gpj/quadrature.hpp"
#include "gpj/field.hpp"
#include "gpj/potentials.hpp"
#include "gpj/assembly.hpp"
#include "gpj/linsolve.hpp"
#include "gpj/operators.hpp"
#include "gpj/energy.hpp"
#include "gpj/linesearch.hpp"
#include "gpj/iterate.hpp"
#include "gpj/oracle.hpp"
#include "gpj/config.hpp"
#include "gpj/validate.hpp"
