#include <benchmark/benchmark.h>

// The packaged benchmark_main archive holds LTO bytecode tied to one compiler
// release, so the entry point is provided here.
BENCHMARK_MAIN();
