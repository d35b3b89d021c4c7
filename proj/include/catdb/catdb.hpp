#pragma once

#include "catdb/dsl.hpp"
#include "catdb/render.hpp"
