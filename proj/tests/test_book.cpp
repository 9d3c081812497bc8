#include <doctest.h>
#include "lobkin/book.hpp"
