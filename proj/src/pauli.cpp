#include "repqec/pauli.hpp"

#include <bit>
#include <stdexcept>

namespace repqec {

static void check_qubits(int n) {
    if (n < 1 || n > 64) throw std::invalid_argument("PauliString supports 1..64 qubits");
}

PauliString PauliString::identity(int n_qubits) {
    check_qubits(n_qubits);
    return PauliString{n_qubits, 0, 0, 0};
}

PauliString PauliString::from_letter(char letter, int qubit, int n_qubits) {
    check_qubits(n_qubits);
    if (qubit < 0 || qubit >= n_qubits) throw std::invalid_argument("qubit out of range");
    PauliString p = identity(n_qubits);
    uint64_t bit = uint64_t{1} << qubit;
    switch (letter) {
        case 'I': break;
        case 'X': p.x = bit; break;
        case 'Z': p.z = bit; break;
        case 'Y': p.x = bit; p.z = bit; p.phase = 1; break;
        default: throw std::invalid_argument("letter must be one of I X Y Z");
    }
    return p;
}

PauliString PauliString::operator*(const PauliString& other) const {
    if (n != other.n) throw std::invalid_argument("qubit count mismatch");
    PauliString r;
    r.n = n;
    r.x = x ^ other.x;
    r.z = z ^ other.z;
    // Z^z1 X^x2 = (-1)^{|z1 & x2|} X^x2 Z^z1
    int anti = std::popcount(z & other.x) & 1;
    r.phase = (phase + other.phase + 2 * anti) & 3;
    return r;
}

bool PauliString::commutes_with(const PauliString& other) const {
    int s = (std::popcount(x & other.z) + std::popcount(z & other.x)) & 1;
    return s == 0;
}

bool PauliString::is_hermitian() const {
    return ((phase + std::popcount(x & z)) & 1) == 0;
}

int PauliString::sign() const {
    // Actual scalar in front of the letter string is i^{phase - n_Y}.
    int k = (phase - std::popcount(x & z)) & 3;
    if (k == 0) return 1;
    if (k == 2) return -1;
    throw std::logic_error("non-Hermitian Pauli string has no sign");
}

char PauliString::letter(int qubit) const {
    uint64_t bit = uint64_t{1} << qubit;
    bool bx = x & bit, bz = z & bit;
    if (bx && bz) return 'Y';
    if (bx) return 'X';
    if (bz) return 'Z';
    return 'I';
}

int PauliString::weight() const { return std::popcount(x | z); }

bool PauliString::is_even() const { return (std::popcount(z) & 1) == 0; }

bool PauliString::same_letters(const PauliString& other) const {
    return n == other.n && x == other.x && z == other.z;
}

std::string PauliString::str() const {
    int k = (phase - std::popcount(x & z)) & 3;
    static const char* pre[4] = {"+", "+i", "-", "-i"};
    std::string s = pre[k];
    for (int q = 0; q < n; ++q) s += letter(q);
    return s;
}

PauliString majorana_pauli(int mu, int n_qubits) {
    if (mu < 0 || mu >= 2 * n_qubits) throw std::invalid_argument("Majorana index out of range");
    int q = mu / 2;
    PauliString p = PauliString::identity(n_qubits);
    for (int j = 0; j < q; ++j) p = p * PauliString::from_letter('X', j, n_qubits);
    p = p * PauliString::from_letter((mu & 1) ? 'Y' : 'Z', q, n_qubits);
    return p;
}

BilinearForm pauli_to_bilinear(const PauliString& p) {
    if (!p.is_hermitian()) throw std::invalid_argument("expected a Hermitian Pauli string");
    uint64_t supp = p.x | p.z;
    if (supp == 0) throw std::invalid_argument("identity string is not a bilinear");
    int qlo = std::countr_zero(supp);
    int qhi = 63 - std::countl_zero(supp);

    int a, b;
    if (qlo == qhi) {
        if (p.letter(qlo) != 'X') throw std::invalid_argument("single-qubit Y/Z is odd, not a bilinear");
        a = 2 * qlo;
        b = 2 * qlo + 1;
    } else {
        char wl = p.letter(qlo), wh = p.letter(qhi);
        if ((wl != 'Y' && wl != 'Z') || (wh != 'Y' && wh != 'Z'))
            throw std::invalid_argument("endpoints must be Y or Z");
        for (int q = qlo + 1; q < qhi; ++q)
            if (p.letter(q) != 'X') throw std::invalid_argument("interior letters must all be X");
        // The X tail of c_b crosses qlo, so the low endpoint letter is the
        // X-conjugate of c_a's own letter: Z letter <-> Y-type Majorana.
        a = 2 * qlo + (wl == 'Z' ? 1 : 0);
        b = 2 * qhi + (wh == 'Y' ? 1 : 0);
    }

    PauliString t = majorana_pauli(a, p.n) * majorana_pauli(b, p.n);
    if (!t.same_letters(p)) throw std::invalid_argument("string is not c_a c_b shaped");
    // p = sigma * (-i) * t  =>  sigma = i^{p.phase - t.phase + 1}
    int k = (p.phase - t.phase + 1) & 3;
    if (k == 0) return {a, b, 1};
    if (k == 2) return {a, b, -1};
    throw std::invalid_argument("string differs from -i c_a c_b by a non-real factor");
}

}  // namespace repqec
