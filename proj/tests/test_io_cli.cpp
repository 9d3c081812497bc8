#include <doctest.h>
#include "lobkin/event_io.hpp"
