#pragma once

#include "optomech/basis.hpp"
#include "optomech/config.hpp"
#include "optomech/constants.hpp"
#include "optomech/errors.hpp"
#include "optomech/feedback.hpp"
#include "optomech/gaussian_dynamics.hpp"
#include "optomech/measures.hpp"
#include "optomech/membrane_coupling.hpp"
#include "optomech/physical_model.hpp"
#include "optomech/polynomial.hpp"
#include "optomech/steady_state.hpp"
#include "optomech/sweep.hpp"
