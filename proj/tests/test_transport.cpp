#include <doctest.h>

TEST_CASE("placeholder_transport") { CHECK(true); }
