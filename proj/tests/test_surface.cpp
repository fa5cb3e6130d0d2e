#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "repqec/dense_oracle.hpp"
#include "repqec/rng.hpp"
#include "repqec/surface.hpp"

using namespace repqec;

namespace {

PauliString extend(const PauliString& p, int n_total) {
    PauliString q = PauliString::identity(n_total);
    q.x = p.x;
    q.z = p.z;
    q.phase = p.phase;
    return q;
}

// |phi_init> through the literal statevector: project the (n+1)-qubit GHZ
// state onto every stabilizer and the two logical-pair conditions.
DenseState dense_logical_bell(const StabilizerSet& s, const LogicalFrame& frame) {
    const int m = s.n + 1;
    DenseState st = DenseState::ghz_plus(m);
    for (const auto& group : {&s.blue, &s.tilde, &s.green})
        for (const auto& f : *group)
            apply_projector_dense(st, extend(f.pauli, m), 0, 0.0, 1.0);
    PauliString lz = extend(frame.l_z, m) * PauliString::from_letter('Z', m - 1, m);
    apply_projector_dense(st, lz, 0, 0.0, 1.0);
    PauliString ly = extend(frame.l_y, m) * PauliString::from_letter('Y', m - 1, m);
    ly.phase = (ly.phase + 2) & 3;  // project onto -L_Y Y_{n+1} = +1
    apply_projector_dense(st, ly, 0, 0.0, 1.0);
    double g = gamma_dense(st);
    REQUIRE(g > 1e-12);
    double scale = 1.0 / std::sqrt(g);
    for (auto& a : st.amp) a *= scale;
    return st;
}

}  // namespace

TEST_CASE("build_stabilizers structure at d = 3") {
    StabilizerSet s = build_stabilizers(3);
    CHECK(s.blue.size() == 2);
    CHECK(s.green.size() == 2);
    CHECK(s.red.size() == 4);
    CHECK(s.tilde.size() == 4);
    CHECK(s.face_count() == 8);
    CHECK(s.measured.size() == 8);

    // every tilde stabilizer has exactly two non-X letters
    for (const auto& f : s.tilde) {
        int non_x = 0;
        for (char l : f.letters)
            if (l != 'X') ++non_x;
        CHECK(non_x == 2);
    }
    CHECK_THROWS_AS(build_stabilizers(4), std::invalid_argument);
    CHECK_THROWS_AS(build_stabilizers(1), std::invalid_argument);

    // d = 5 passes all build-time group checks
    StabilizerSet s5 = build_stabilizers(5);
    CHECK(s5.face_count() == 24);
}

TEST_CASE("convert_syndromes") {
    CHECK(convert_syndromes({0, 0}, 0) == std::vector<uint8_t>{0, 0});
    // d = 3: tilde = (1, 0), green = 0 -> (1 xor 0, 0 xor 0) = (1, 0)
    CHECK(convert_syndromes({1, 0}, 0) == std::vector<uint8_t>{1, 0});

    // round trip: from red+green bits, tilde_i = xor_{j>=i} red_j xor green
    std::mt19937_64 rng(3);
    for (int rep = 0; rep < 100; ++rep) {
        int d = (rep % 2) ? 3 : 5;
        std::vector<uint8_t> red(d - 1);
        for (auto& b : red) b = static_cast<uint8_t>(uniform01(rng) < 0.5);
        uint8_t green = static_cast<uint8_t>(uniform01(rng) < 0.5);
        std::vector<uint8_t> tilde(d - 1);
        for (int i = 0; i < d - 1; ++i) {
            uint8_t acc = green;
            for (int j = i; j < d - 1; ++j) acc ^= red[j];
            tilde[i] = acc;
        }
        CHECK(convert_syndromes(tilde, green) == red);
    }
}

TEST_CASE("init_logical_bell satisfies every stabilizer and logical condition") {
    StabilizerSet s = build_stabilizers(3);
    auto [state, frame] = init_logical_bell(s);
    const int m = s.n + 1;

    for (const auto& mop : s.measured)
        CHECK(mop.bilinear.sigma * state.M(mop.bilinear.a, mop.bilinear.b) ==
              doctest::Approx(1.0).epsilon(1e-9));

    PauliString lz = extend(frame.l_z, m) * PauliString::from_letter('Z', m - 1, m);
    CHECK(pauli_expectation(state, lz) == doctest::Approx(1.0).epsilon(1e-9));
    PauliString ly = extend(frame.l_y, m) * PauliString::from_letter('Y', m - 1, m);
    CHECK(pauli_expectation(state, ly) == doctest::Approx(-1.0).epsilon(1e-9));
    PauliString lx = extend(frame.l_x, m) * PauliString::from_letter('X', m - 1, m);
    CHECK(pauli_expectation(state, lx) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("init_logical_bell matches the dense statevector at d = 3") {
    StabilizerSet s = build_stabilizers(3);
    auto [state, frame] = init_logical_bell(s);
    DenseState dense = dense_logical_bell(s, frame);
    CHECK((state.M - covariance_dense(dense)).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("apply_pauli_error tracks the frame parity") {
    StabilizerSet s = build_stabilizers(3);
    auto [state, frame] = init_logical_bell(s);
    std::mt19937_64 rng(5);

    GaussianState before = state;
    apply_pauli_error(state, frame, 4, SurfaceErrorKind::Z, 0, 0, rng);
    apply_pauli_error(state, frame, 4, SurfaceErrorKind::Z, 0, 0, rng);
    CHECK(frame.w == 2);
    CHECK((state.M - before.M).cwiseAbs().maxCoeff() < 1e-12);

    // a Y error flips exactly the stabilizers that anticommute with Y_q
    apply_pauli_error(state, frame, 2, SurfaceErrorKind::Y, 0, 0, rng);
    PauliString y2 = PauliString::from_letter('Y', 2, s.n);
    for (const auto& mop : s.measured) {
        const PauliString* p = nullptr;
        if (mop.kind == StabilizerSet::Measured::Kind::Blue) p = &s.blue[mop.index].pauli;
        else if (mop.kind == StabilizerSet::Measured::Kind::Green) p = &s.green[mop.column_pair].pauli;
        else p = &s.tilde[mop.column_pair * (s.d - 1) + mop.index].pauli;
        double expected = p->commutes_with(y2) ? 1.0 : -1.0;
        CHECK(mop.bilinear.sigma * state.M(mop.bilinear.a, mop.bilinear.b) ==
              doctest::Approx(expected).epsilon(1e-9));
    }

    // X-coherent with theta = 0 is a no-op
    GaussianState snap = state;
    apply_pauli_error(state, frame, 1, SurfaceErrorKind::XCoherent, 0.0, 0.3, rng);
    CHECK((state.M - snap.M).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("measure_stabilizer on the code state and after an error") {
    StabilizerSet s = build_stabilizers(3);
    auto [state, frame] = init_logical_bell(s);
    std::mt19937_64 rng(7);

    for (const auto& mop : s.measured)
        CHECK(measure_stabilizer(state, mop.bilinear, 0.0, rng) == 0);

    // branch probabilities sum to 1 after an arbitrary coherent kick
    apply_pauli_error(state, frame, 3, SurfaceErrorKind::XCoherent, 0.35, 0.5, rng);
    for (const auto& mop : s.measured) {
        GaussianOp op0 = bilinear_projector_fgo(mop.bilinear.a, mop.bilinear.b,
                                                mop.bilinear.sigma, 0, 0.0, 1.0, s.n + 1);
        GaussianOp op1 = bilinear_projector_fgo(mop.bilinear.a, mop.bilinear.b,
                                                mop.bilinear.sigma, 1, 0.0, 1.0, s.n + 1);
        double p0 = std::exp(branch_log_weight(state, op0));
        double p1 = std::exp(branch_log_weight(state, op1));
        CHECK(p0 + p1 == doctest::Approx(1.0).epsilon(1e-10));
    }

    // a fresh Y error flips deterministically the anticommuting syndromes,
    // matching the dense oracle state
    auto [st2, fr2] = init_logical_bell(s);
    DenseState dn2 = dense_logical_bell(s, fr2);
    apply_pauli_error(st2, fr2, 4, SurfaceErrorKind::Y, 0, 0, rng);
    PauliString err = PauliString::from_letter('Y', 4, s.n + 1) *
                      PauliString::from_letter('Z', s.n, s.n + 1);
    apply_pauli_dense(dn2, err);
    for (const auto& mop : s.measured) {
        int bit = measure_stabilizer(st2, mop.bilinear, 0.0, rng);
        DenseState branch = dn2;
        std::vector<const PauliString*> src;
        const PauliString* p = nullptr;
        if (mop.kind == StabilizerSet::Measured::Kind::Blue) p = &s.blue[mop.index].pauli;
        else if (mop.kind == StabilizerSet::Measured::Kind::Green) p = &s.green[mop.column_pair].pauli;
        else p = &s.tilde[mop.column_pair * (s.d - 1) + mop.index].pauli;
        apply_projector_dense(branch, extend(*p, s.n + 1), bit, 0.0, 1.0);
        CHECK(gamma_dense(branch) / gamma_dense(dn2) == doctest::Approx(1.0).epsilon(1e-9));
        dn2 = branch;
        double scale = 1.0 / std::sqrt(gamma_dense(dn2));
        for (auto& a : dn2.amp) a *= scale;
    }
}

TEST_CASE("noiseless channel reconstructs the logical Bell state") {
    SurfaceRunConfig cfg;
    cfg.d = 3;
    cfg.T = 2;
    SurfaceRunResult r = run_and_reconstruct(cfg, 50, 123, 1);
    CHECK(r.fidelity == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(r.a_xx_min == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(r.degenerate == 0);

    // rho = Bell projector 1/4 (II + XX - YY + ZZ)
    Eigen::Matrix4cd bell = Eigen::Matrix4cd::Zero();
    bell(0, 0) = bell(3, 3) = bell(0, 3) = bell(3, 0) = 0.5;
    CHECK((r.rho - bell).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(std::abs(r.rho.trace().real() - 1.0) < 1e-9);

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(r.rho);
    CHECK(es.eigenvalues().minCoeff() > -1e-8);
}

TEST_CASE("single deterministic errors are corrected to F = 1") {
    StabilizerSet s = build_stabilizers(3);
    const int T = 1;
    for (int q = 0; q < s.n; ++q) {
        for (auto kind : {SurfaceErrorKind::Y, SurfaceErrorKind::Z}) {
            auto [state, frame] = init_logical_bell(s);
            std::mt19937_64 rng(40 + q);
            apply_pauli_error(state, frame, q, kind, 0, 0, rng);

            // one noisy-content cycle plus the error-free final round; the
            // state is a stabilizer eigenstate so outcomes are deterministic
            std::vector<std::pair<int, int>> defects;
            const int d = s.d, F = s.face_count();
            std::vector<uint8_t> prev(F, 0), cur(F, 0);
            for (int y = 0; y <= T; ++y) {
                std::vector<uint8_t> tilde_bits(4), green_bits(2);
                for (const auto& mop : s.measured) {
                    int bit = measure_stabilizer(state, mop.bilinear, 0.0, rng);
                    if (mop.kind == StabilizerSet::Measured::Kind::Blue)
                        cur[mop.index] = static_cast<uint8_t>(bit);
                    else if (mop.kind == StabilizerSet::Measured::Kind::Green)
                        green_bits[mop.column_pair] = static_cast<uint8_t>(bit);
                    else
                        tilde_bits[mop.column_pair * (d - 1) + mop.index] =
                            static_cast<uint8_t>(bit);
                }
                for (int c = 0; c < d - 1; ++c) {
                    std::vector<uint8_t> col(tilde_bits.begin() + c * (d - 1),
                                             tilde_bits.begin() + (c + 1) * (d - 1));
                    std::vector<uint8_t> red = convert_syndromes(col, green_bits[c]);
                    for (int j = 0; j < d - 1; ++j)
                        cur[(d - 1) + c * (d - 1) + j] = red[j];
                    cur[(d - 1) + (d - 1) * (d - 1) + c] = green_bits[c];
                }
                for (int f = 0; f < F; ++f)
                    if (cur[f] ^ prev[f]) defects.push_back({f, y});
                prev = cur;
            }
            auto [yrec, zrec] = decode_surface_defects(s, defects);
            for (int qq = 0; qq < s.n; ++qq) {
                if (yrec[qq]) apply_pauli_error(state, frame, qq, SurfaceErrorKind::Y, 0, 0, rng);
                if (zrec[qq]) apply_pauli_error(state, frame, qq, SurfaceErrorKind::Z, 0, 0, rng);
            }
            // fidelity contribution of this deterministic trajectory
            const int m = s.n + 1;
            PauliString yy = extend(frame.l_y, m) * PauliString::from_letter('Y', m - 1, m);
            PauliString zz = extend(frame.l_z, m) * PauliString::from_letter('Z', m - 1, m);
            double sgn = (frame.w % 2) ? -1.0 : 1.0;
            double f = 0.25 * (1.0 + sgn * (1.0 - pauli_expectation(state, yy)) +
                               pauli_expectation(state, zz));
            CHECK(f == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
}

TEST_CASE("fidelity decreases with the error rate") {
    double prev_f = 1.1;
    double prev_err = 0.0;
    for (double p : {0.0, 0.03, 0.08}) {
        SurfaceRunConfig cfg;
        cfg.d = 3;
        cfg.T = 2;
        cfg.p_y = p;
        cfg.p_z = p;
        cfg.p_x = p;
        cfg.c = 0.5;
        SurfaceRunResult r = run_and_reconstruct(cfg, 1500, 77, 1);
        CHECK(r.fidelity < prev_f + 3 * (r.fidelity_stderr + prev_err));
        CHECK(r.a_xx_min > 1.0 - 1e-8);
        prev_f = r.fidelity;
        prev_err = r.fidelity_stderr;
    }
}

TEST_CASE("measurement-qubit errors degrade fidelity but keep the invariants") {
    SurfaceRunConfig cfg;
    cfg.d = 3;
    cfg.T = 2;
    cfg.p_m = 0.1;
    cfg.p_m_coherent = 0.05;
    cfg.c_m = 0.7;
    SurfaceRunResult r = run_and_reconstruct(cfg, 400, 13, 1);
    CHECK(r.fidelity < 1.0);
    CHECK(r.fidelity > 0.4);
    CHECK(std::abs(r.rho.trace().real() - 1.0) < 1e-9);
    CHECK(r.a_xx_min > 1.0 - 1e-8);
}

TEST_CASE("layout dump is audit-friendly") {
    StabilizerSet s = build_stabilizers(3);
    std::string layout = format_layout(s);
    CHECK(layout.find("blue") != std::string::npos);
    CHECK(layout.find("tilde") != std::string::npos);
    CHECK(layout.find("pair=1") != std::string::npos);
}
