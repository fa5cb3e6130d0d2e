#pragma once

#include <cstdint>
#include <string>

namespace repqec {

// Pauli string on up to 64 qubits in the canonical form i^phase * X^x Z^z,
// with per-qubit letters I/X/Z/Y encoded by the (x, z) bit pair (Y = i X Z).
// Qubits are 0-based.
struct PauliString {
    int n = 0;
    uint64_t x = 0;
    uint64_t z = 0;
    int phase = 0;  // exponent of i, mod 4

    static PauliString identity(int n_qubits);
    static PauliString from_letter(char letter, int qubit, int n_qubits);

    PauliString operator*(const PauliString& other) const;
    bool commutes_with(const PauliString& other) const;
    bool is_hermitian() const;
    // +1 or -1 for a Hermitian string; throws otherwise.
    int sign() const;
    char letter(int qubit) const;
    int weight() const;
    // Parity of the Majorana expansion: even iff the number of Y/Z letters
    // is even. Only even strings act within the Gaussian formalism.
    bool is_even() const;
    bool same_letters(const PauliString& other) const;
    std::string str() const;
};

// Jordan-Wigner Majorana operator as a Pauli string, 0-based index mu:
//   c_{2q}   = (prod_{j<q} X_j) Z_q
//   c_{2q+1} = (prod_{j<q} X_j) Y_q
PauliString majorana_pauli(int mu, int n_qubits);

// Decomposition of a Hermitian Pauli string as sigma * (-i c_a c_b), a < b.
struct BilinearForm {
    int a = 0;
    int b = 0;
    int sigma = 1;
};

// Expands P through the Jordan-Wigner table. P must be a contiguous string
// W X ... X W (W in {Y, Z}) or a single X; throws std::invalid_argument
// otherwise.
BilinearForm pauli_to_bilinear(const PauliString& p);

}  // namespace repqec
