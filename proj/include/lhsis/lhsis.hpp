#pragma once

#include "lhsis/algebra.hpp"
#include "lhsis/coeffs.hpp"
#include "lhsis/dynamics.hpp"
#include "lhsis/error.hpp"
#include "lhsis/expression.hpp"
#include "lhsis/ode.hpp"
#include "lhsis/quadrature.hpp"
#include "lhsis/superposition.hpp"
#include "lhsis/transform.hpp"
