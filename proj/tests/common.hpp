#pragma once

#include <random>

#include "lorentz/medium.hpp"

namespace testing_media {

using lorentz::LorentzMedium;

// Strongly damped, one oscillator per family.
inline LorentzMedium reference() { return LorentzMedium(1, 1, {{1, 1, 0.1}}, {{1, 2, 0.2}}); }

// Undamped magnetic family, undamped electric resonance at 1 absent from
// the magnetic family: critical, condition 1. Also has simple real zeros.
inline LorentzMedium critical_m2() { return LorentzMedium(1, 1, {{1, 1, 0}, {1, 3, 0.3}}, {{1, 2, 0}}); }

// Shared undamped resonance at 1: double real poles at +-1.
inline LorentzMedium double_pole_m4() { return LorentzMedium(1, 1, {{1, 1, 0}, {1, 3, 0.3}}, {{1, 1, 0}}); }

inline LorentzMedium lossless() { return LorentzMedium(1, 1, {{1, 1, 0}}, {{1, 2, 0}}); }

// Random medium satisfying the standing assumptions with probability one.
inline LorentzMedium random_medium(std::mt19937_64& g, bool allow_undamped = false) {
    std::uniform_real_distribution<double> U(0.3, 3.0), A(0.05, 1.0), coin(0.0, 1.0);
    std::uniform_int_distribution<int> n(0, 2);
    for (;;) {
        int ne = n(g), nm = n(g);
        if (ne + nm == 0) continue;
        std::vector<lorentz::Oscillator> e, m;
        for (int i = 0; i < ne; ++i) e.push_back({U(g), U(g), allow_undamped && coin(g) < 0.3 ? 0.0 : A(g)});
        for (int i = 0; i < nm; ++i) m.push_back({U(g), U(g), allow_undamped && coin(g) < 0.3 ? 0.0 : A(g)});
        try {
            LorentzMedium med(std::uniform_real_distribution<double>(0.5, 2.0)(g),
                              std::uniform_real_distribution<double>(0.5, 2.0)(g), e, m);
            if (lorentz::check_assumptions(med).h1_satisfied && lorentz::check_assumptions(med).h2_satisfied)
                return med;
        } catch (const std::exception&) {
        }
    }
}

}  // namespace testing_media
