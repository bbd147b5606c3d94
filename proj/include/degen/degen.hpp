#pragma once

#include "degen/core_model.hpp"
#include "degen/random.hpp"
#include "degen/fss.hpp"
#include "degen/arq.hpp"
#include "degen/mldi.hpp"
#include "degen/generator.hpp"
#include "degen/disruption.hpp"
#include "degen/io.hpp"
