#include "doctest.h"
#include "freeconv/randmat.hpp"
