#include <stdexcept>
#include "doctest.h"
#include "repqec/pauli.hpp"

using namespace repqec;

TEST_CASE("pauli multiplication and phases") {
    auto X = PauliString::from_letter('X', 0, 1);
    auto Y = PauliString::from_letter('Y', 0, 1);
    auto Z = PauliString::from_letter('Z', 0, 1);

    // XY = iZ, YZ = iX, ZX = iY
    CHECK((X * Y).same_letters(Z));
    CHECK((X * Y).phase == 1);
    CHECK((Y * Z).same_letters(X));
    CHECK((Y * Z).phase == 1);
    CHECK((Z * X).same_letters(Y));
    // ZX = iY: phase of canonical form of Y is 1, so ZX carries i * i^1
    CHECK((Z * X).phase == 2);

    CHECK(!X.commutes_with(Y));
    CHECK(!X.commutes_with(Z));
    CHECK(X.commutes_with(X));
    CHECK((X * X).weight() == 0);

    CHECK(X.is_hermitian());
    CHECK(Y.is_hermitian());
    CHECK((X * Y).is_hermitian() == false);  // iZ
    CHECK(X.sign() == 1);
}

TEST_CASE("jordan-wigner majoranas anticommute") {
    const int n = 4;
    for (int mu = 0; mu < 2 * n; ++mu) {
        auto cm = majorana_pauli(mu, n);
        CHECK(cm.is_hermitian());
        CHECK(cm.sign() == 1);
        auto sq = cm * cm;
        CHECK(sq.weight() == 0);
        CHECK(sq.phase == 0);
        for (int nu = mu + 1; nu < 2 * n; ++nu)
            CHECK(!cm.commutes_with(majorana_pauli(nu, n)));
    }
}

TEST_CASE("pauli_to_bilinear recovers X and ZZ") {
    const int n = 3;
    // X_q = -(-i c_{2q} c_{2q+1})
    auto bx = pauli_to_bilinear(PauliString::from_letter('X', 1, n));
    CHECK(bx.a == 2);
    CHECK(bx.b == 3);
    CHECK(bx.sigma == -1);

    // Z_0 Z_1 = -i c_2 c_1 = sigma (-i c_1 c_2) with sigma = -1
    auto zz = PauliString::from_letter('Z', 0, n) * PauliString::from_letter('Z', 1, n);
    auto bz = pauli_to_bilinear(zz);
    CHECK(bz.a == 1);
    CHECK(bz.b == 2);
    CHECK(bz.sigma == -1);

    // Y_0 X_1 Z_2 spans the chain with Y/Z endpoints
    auto s = PauliString::from_letter('Y', 0, n) * PauliString::from_letter('X', 1, n) *
             PauliString::from_letter('Z', 2, n);
    auto bs = pauli_to_bilinear(s);
    CHECK(bs.a == 0);
    CHECK(bs.b == 4);

    CHECK_THROWS_AS(pauli_to_bilinear(PauliString::from_letter('Z', 0, n)),
                    std::invalid_argument);
}

TEST_CASE("evenness tracks the Y/Z letter count") {
    const int n = 3;
    CHECK(PauliString::from_letter('X', 0, n).is_even());
    CHECK(!PauliString::from_letter('Z', 0, n).is_even());
    auto zz = PauliString::from_letter('Z', 0, n) * PauliString::from_letter('Z', 2, n);
    CHECK(zz.is_even());
}
