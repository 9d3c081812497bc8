#include <doctest.h>
#include "lobkin/series.hpp"
