#include <doctest.h>

TEST_CASE("placeholder_spectral") { CHECK(true); }
