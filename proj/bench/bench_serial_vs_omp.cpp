// Compares the sequential reference engine against the OpenMP tuple-parallel
// driver and the binary-join baseline on the generated families.

#include <cstdio>

#include "wcoj/workbench.hpp"

int main() {
    using namespace wcoj;
#ifdef WCOJ_HAVE_OPENMP
    const char* par = "generic-par";
#else
    const char* par = "generic";  // no OpenMP at configure time
#endif

    {
        BenchReport rep = bench_compare("triangle", {1u << 10, 1u << 12, 1u << 14},
                                        {"generic", par, "lw", "binary"});
        std::printf("%s", rep.toCsv().c_str());
        for (auto& [algo, slope] : rep.slopes) std::printf("# slope %s = %.3f\n", algo.c_str(), slope);
    }
    {
        BenchReport rep = bench_compare("lwbad", {10001, 20001, 40001}, {"generic", par}, 60000.0, 3);
        std::printf("%s", rep.toCsv().c_str());
        for (auto& [algo, slope] : rep.slopes) std::printf("# slope %s = %.3f\n", algo.c_str(), slope);
    }
    return 0;
}
