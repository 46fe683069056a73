#pragma once

// Bundled demo programs in .oprema text form.

#include <string>
#include <vector>

namespace oprema::demos {

/// p(x) = ((((a5 x + a4) x + a3) x + a2) x + a1) x + a0 at n arguments
/// x0, x0 + h, ... (x accumulated by repeated addition).
struct PolynomialParams {
  std::vector<std::string> coefficients{"1.25", "-2.5", "0.75", "3.125", "-1.0625", "0.5"};  // a5 .. a0
  std::string x0 = "-1.5";
  std::string h = "0.02";
  int count = 151;
};

inline std::string polynomial_source(const PolynomialParams& p = {}) {
  std::string s = "; fifth-degree polynomial in Horner form, one printed value per argument\n.const\n";
  for (std::size_t i = 0; i < p.coefficients.size(); ++i) s += "  a" + std::to_string(5 - i) + " = " + p.coefficients[i] + "\n";
  s += "  x0 = " + p.x0 + "\n";
  s += "  h = " + p.h + "\n";
  s += "  n = " + std::to_string(p.count) + "\n";
  s += "  one = 1\n";
  s += R"(.prog
        MOV x0 -> R0          ; x
        MOV n -> R1           ; arguments left
loop:   MUL a5 R0 -> R2
        ADD +R2 +a4 -> R3
        MUL R3 R0 -> R2
        ADD +R2 +a3 -> R3
        MUL R3 R0 -> R2
        ADD +R2 +a2 -> R3
        MUL R3 R0 -> R2
        ADD +R2 +a1 -> R3
        MUL R3 R0 -> R2
        ADD +R2 +a0 -> R3 [P]
        ADD +R0 +h -> R4
        MOV R4 -> R0
        ADD +R1 -one -> R5
        MOV R5 -> R1
        JGT R1, loop
        STOP
)";
  return s;
}

/// Paraxial y-u ray trace through a lens system. Y0 holds the refractive
/// indices from object to image (the spare rows behind the last index are
/// cut off by a jump), Y1 the radii, Y2 the axial distances and Y3 the
/// starting height and slope of each ray.
struct RaytraceParams {
  std::vector<std::string> indices{"1", "1.5168", "1", "1.62", "1"};  // n0 .. nS
  std::vector<std::string> radii{"50", "-45", "inf", "-80"};          // r1 .. rS
  std::vector<std::string> distances{"5", "10", "4", "60"};           // d1 .. dS
  std::vector<std::pair<std::string, std::string>> rays{{"10", "0"}, {"5", "-0.05"}, {"1", "0.1"}};
  std::vector<std::string> spare_indices{"9.99", "8.88"};
};

inline std::string raytrace_source(const RaytraceParams& p = {}) {
  std::string s = "; paraxial ray trace: per surface prints the new slope u' and height y\n.const\n";
  s += "  surfaces = " + std::to_string(p.radii.size()) + "\n";
  s += "  rays = " + std::to_string(p.rays.size()) + "\n";
  s += "  one = 1\n";
  s += ".cyclic 0\n";
  s += "first: " + p.indices.front() + "\n";
  for (std::size_t i = 1; i + 1 < p.indices.size(); ++i) s += "  " + p.indices[i] + "\n";
  s += "  " + p.indices.back() + " @jump first\n";
  for (const auto& x : p.spare_indices) s += "  " + x + "     ; not reached\n";
  s += ".cyclic 1\n";
  for (const auto& x : p.radii) s += "  " + x + "\n";
  s += ".cyclic 2\n";
  for (const auto& x : p.distances) s += "  " + x + "\n";
  s += ".cyclic 3\n";
  for (const auto& [y, u] : p.rays) s += "  " + y + "\n  " + u + "\n";
  s += R"(.prog
        MOV rays -> R11
ray:    MOV Y3 -> R0           ; y
        MOV Y3 -> R1           ; u
        MOV Y0 -> R2           ; n
        MOV surfaces -> R3
surf:   MOV Y0 -> R4           ; n'
        ADD +R4 -R2 -> R5
        MUL R0 R5 -> R6
        DIV R6 Y1 -> R7        ; y (n' - n) / r
        MUL R2 R1 -> R6
        ADD +R6 -R7 -> R8
        DIV R8 R4 -> R1 [P]    ; u'
        MUL Y2 R1 -> R6
        ADD +R0 +R6 -> R9
        MOV R9 -> R0 [P]       ; y at the next surface
        MOV R4 -> R2
        ADD +R3 -one -> R10
        MOV R10 -> R3
        JGT R3, surf
        ADD +R11 -one -> R12
        MOV R12 -> R11
        JGT R11, ray
        STOP
.start
  pc = 0
  positions = 0, 0, 0, 0
)";
  return s;
}

/// One addition, multiplication, division and square root.
inline std::string timing_source() {
  return R"(; one of each timed arithmetic operation
.const
  a = 1225
  b = 0.5
.prog
        ADD +a +b -> R0
        MUL a b -> R1
        DIV a b -> R2
        SQR+ a -> R3 [P]
        STOP
)";
}

/// Special values, conditional flow and the pc wrap from row 299 to row 0.
inline std::string specials_source() {
  return R"(; division by zero, infinity tests and pc wrap-around
.const
  x = 3
  y = -4
  z = 0
.prog
        JZE R4, main            ; R4 is still zero on the first pass
        STOP R4 [P]
main:   ADD +|x| -|y| -> R2 [P]
        DIV x z -> R0 [P]
        JINF R0, big
        STOP
big:    ADD +R0 -R0 -> R1 [P]   ; indeterminate
        SQR- x -> R3 [P]
        JZE z, tail
        STOP
        .org 299
tail:   MUL x y -> R4 [P]       ; followed by row 0
)";
}

inline std::string stop_source() { return ".prog\n        STOP\n"; }

struct Demo {
  std::string name;
  std::string source;
};

inline std::vector<Demo> corpus() {
  return {
      {"polynomial", polynomial_source()},
      {"raytrace", raytrace_source()},
      {"timing", timing_source()},
      {"specials", specials_source()},
      {"stop", stop_source()},
  };
}

}  // namespace oprema::demos
