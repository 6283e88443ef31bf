#include "doctest.h"
#include "freeconv/transforms.hpp"
