#pragma once

#include "common.hpp"
#include "symdyn.hpp"
#include "birkhoff.hpp"
#include "rotation.hpp"
#include "matgeo.hpp"
#include "cocycle.hpp"
#include "adapt.hpp"
#include "io.hpp"
#include "svg.hpp"
#include "props.hpp"
#include "app.hpp"
