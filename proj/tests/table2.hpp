#pragma once

#include <vector>

// Source-similarity columns of the published Table 2 (20 individuals each).
namespace mage::test::table2 {

inline const std::vector<double> kAlphaInitial{
    0.9844155844, 0.9717948718, 0.9973684211, 0.9844155844, 0.981865285,  0.9717948718, 0.9947506562,
    0.9844155844, 0.961928934,  1,            0.9844155844, 1,            0.981865285,  0.981865285,
    1,            0.9895561358, 0.9643765903, 0.9768041237, 0.9693094629, 0.9844155844};

inline const std::vector<double> kAlphaFinal{
    0.9973684211, 0.9793281654, 0.9921465969, 0.9973684211, 0.9844155844, 0.9973684211, 0.9973684211,
    0.9768041237, 0.9717948718, 0.9973684211, 0.9895561358, 0.981865285,  0.981865285,  0.9844155844,
    0.9947506562, 0.9973684211, 0.9768041237, 0.9793281654, 0.9947506562, 0.9895561358};

inline const std::vector<double> kBetaInitial{
    0.981865285,  0.981865285,  0.9742930591, 0.9973684211, 0.961928934,  0.9793281654, 0.9947506562,
    1,            0.9869791667, 0.9793281654, 0.9768041237, 0.981865285,  0.9895561358, 0.981865285,
    0.981865285,  0.961928934,  0.9594936709, 0.9844155844, 0.9869791667, 0.9844155844};

inline const std::vector<double> kBetaFinal{
    0.4834183673, 0.4922077922, 0.500660502,  0.4947780679, 0.4884020619, 0.4896640827, 0.5060080107,
    0.4834183673, 0.5039893617, 0.506684492,  0.4973753281, 0.4980289093, 0.49672346,   0.5013227513,
    0.4947780679, 0.4947780679, 0.4922077922, 0.5039893617, 0.5039893617, 0.506684492};

} // namespace mage::test::table2
