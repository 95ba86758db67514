#pragma once

#include "cayley_girth/bounds.hpp"
#include "cayley_girth/bugdemo.hpp"
#include "cayley_girth/errors.hpp"
#include "cayley_girth/exposure.hpp"
#include "cayley_girth/freegroup.hpp"
#include "cayley_girth/girth.hpp"
#include "cayley_girth/parallel.hpp"
#include "cayley_girth/perm.hpp"
#include "cayley_girth/random.hpp"
#include "cayley_girth/rational.hpp"
