#pragma once

#include "detox/ast.hpp"
#include "detox/campaign.hpp"
#include "detox/configuration.hpp"
#include "detox/digest.hpp"
#include "detox/faultspace.hpp"
#include "detox/interpreter.hpp"
#include "detox/interval.hpp"
#include "detox/oracle.hpp"
#include "detox/parser.hpp"
#include "detox/predictor.hpp"
#include "detox/render.hpp"
#include "detox/search.hpp"
