#include <doctest.h>

TEST_SUITE_BEGIN("checks");
TEST_SUITE_END();
