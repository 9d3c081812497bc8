#include <doctest.h>
#include "lobkin/synth.hpp"
