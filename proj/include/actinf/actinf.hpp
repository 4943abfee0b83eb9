#pragma once

#include "actinf/agent.hpp"
#include "actinf/config.hpp"
#include "actinf/efe.hpp"
#include "actinf/env.hpp"
#include "actinf/exp_family.hpp"
#include "actinf/model.hpp"
#include "actinf/oracle.hpp"
#include "actinf/runner.hpp"
#include "actinf/structured.hpp"
#include "actinf/vmp.hpp"
