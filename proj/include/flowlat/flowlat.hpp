// SPDX-License-Identifier: MIT
#ifndef FLOWLAT_FLOWLAT_HPP
#define FLOWLAT_FLOWLAT_HPP

#include "flowlat/ast.hpp"
#include "flowlat/env.hpp"
#include "flowlat/error.hpp"
#include "flowlat/harness.hpp"
#include "flowlat/interp.hpp"
#include "flowlat/lattice.hpp"
#include "flowlat/parse.hpp"
#include "flowlat/principal.hpp"
#include "flowlat/transform.hpp"
#include "flowlat/typing.hpp"

#endif
