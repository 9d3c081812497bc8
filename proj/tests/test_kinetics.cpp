#include <doctest.h>
#include "lobkin/kinetics.hpp"
