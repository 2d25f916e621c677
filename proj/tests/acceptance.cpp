#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

TEST_SUITE_BEGIN("acceptance");
TEST_SUITE_END();
