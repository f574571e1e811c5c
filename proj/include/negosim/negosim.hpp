#pragma once

#include "negosim/errors.hpp"
#include "negosim/fair_case.hpp"
#include "negosim/harness.hpp"
#include "negosim/niching.hpp"
#include "negosim/oracle.hpp"
#include "negosim/protocol.hpp"
#include "negosim/random.hpp"
#include "negosim/scenario.hpp"
#include "negosim/scenario_io.hpp"
#include "negosim/strategies.hpp"
