#pragma once

#include "bafo/decimal.hpp"
#include "bafo/dist.hpp"
#include "bafo/engine.hpp"
#include "bafo/equilibrium.hpp"
#include "bafo/errors.hpp"
#include "bafo/info.hpp"
#include "bafo/model.hpp"
#include "bafo/montecarlo.hpp"
#include "bafo/signal.hpp"
