#include <doctest.h>
#include "lobkin/layers.hpp"
