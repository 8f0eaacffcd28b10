// Compiles the amalgamated Catch2 implementation (and its default main)
// once for all test targets.
#include <catch2/catch_amalgamated.cpp>
