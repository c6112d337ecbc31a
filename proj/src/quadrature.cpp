#include "mbfem/quadrature.hpp"

#include "mbfem/error.hpp"

namespace mbfem {
namespace {

constexpr std::array<double, 1> p1{0.0};
constexpr std::array<double, 1> w1{2.0};

constexpr std::array<double, 2> p2{-0.57735026918962576451, 0.57735026918962576451};
constexpr std::array<double, 2> w2{1.0, 1.0};

constexpr std::array<double, 3> p3{-0.77459666924148337704, 0.0, 0.77459666924148337704};
constexpr std::array<double, 3> w3{0.55555555555555555556, 0.88888888888888888889,
                                   0.55555555555555555556};

constexpr std::array<double, 4> p4{-0.86113631159405257522, -0.33998104358485626480,
                                   0.33998104358485626480, 0.86113631159405257522};
constexpr std::array<double, 4> w4{0.34785484513745385737, 0.65214515486254614263,
                                   0.65214515486254614263, 0.34785484513745385737};

constexpr std::array<double, 5> p5{-0.90617984593866399280, -0.53846931010568309104, 0.0,
                                   0.53846931010568309104, 0.90617984593866399280};
constexpr std::array<double, 5> w5{0.23692688505618908751, 0.47862867049936646804,
                                   0.56888888888888888889, 0.47862867049936646804,
                                   0.23692688505618908751};

}  // namespace

GaussRule gauss_legendre(std::size_t n_points) {
  switch (n_points) {
    case 1: return {p1, w1};
    case 2: return {p2, w2};
    case 3: return {p3, w3};
    case 4: return {p4, w4};
    case 5: return {p5, w5};
    default: throw ConfigError("gauss_legendre: supported point counts are 1..5");
  }
}

}  // namespace mbfem
