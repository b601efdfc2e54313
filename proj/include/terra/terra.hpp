#pragma once

#include "terra/analysis.hpp"
#include "terra/angles.hpp"
#include "terra/array.hpp"
#include "terra/baselines.hpp"
#include "terra/channel.hpp"
#include "terra/deployment.hpp"
#include "terra/mobility.hpp"
#include "terra/protocol.hpp"
#include "terra/rng.hpp"
#include "terra/scenario.hpp"
#include "terra/sweep.hpp"
#include "terra/trace.hpp"
#include "terra/version.hpp"
