#pragma once

#include "oprema/error.hpp"
#include "oprema/numeric.hpp"
#include "oprema/alu.hpp"
#include "oprema/timing.hpp"
#include "oprema/machine.hpp"
#include "oprema/control.hpp"
#include "oprema/twin.hpp"
#include "oprema/assembler.hpp"
#include "oprema/image_io.hpp"
#include "oprema/oracle.hpp"
#include "oprema/demos.hpp"
#include "oprema/verify.hpp"
