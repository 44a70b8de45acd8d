#pragma once

#include <array>

namespace fixtures {

// Reference (precision, recall, f1) triples, two-decimal rounded, used as
// rounding-consistency fixtures: recomputing f1 = 2pr/(p+r) must land within
// +/-0.01 of the printed value on every row.
struct PrfRow {
  double precision;
  double recall;
  double f1;
};

inline constexpr std::array<PrfRow, 18> kBenchmarkRows = {{
    // traditional arm
    {.83, .75, .79},  // app review EN, problem report
    {.68, .76, .72},  // app review EN, inquiry
    {.88, .89, .89},  // app review EN, irrelevant
    {.46, .82, .59},  // tweet EN, problem report
    {.32, .70, .43},  // tweet EN, inquiry
    {.73, .75, .74},  // tweet EN, irrelevant
    {.51, .88, .65},  // tweet IT, problem report
    {.47, .82, .60},  // tweet IT, inquiry
    {.78, .89, .83},  // tweet IT, irrelevant
    // deep arm
    {.46, .60, .52},  // app review EN, problem report
    {.69, .79, .74},  // app review EN, inquiry
    {.78, .93, .85},  // app review EN, irrelevant
    {.51, .42, .46},  // tweet EN, problem report
    {.40, .40, .40},  // tweet EN, inquiry
    {.74, .70, .72},  // tweet EN, irrelevant
    {.62, .57, .59},  // tweet IT, problem report
    {.51, .57, .54},  // tweet IT, inquiry
    {.85, .77, .81},  // tweet IT, irrelevant
}};

}  // namespace fixtures
