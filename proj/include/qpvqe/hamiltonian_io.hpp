// Copyright 2026 The QP-VQE Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Text format for Hamiltonians and observables:
//
//   # comment
//   qubits <n>
//   <real coefficient> <word>
//
// where <word> is whitespace-separated factors such as "X0 Z3 Y5" or the
// literal "I". Repeated words are summed.

#include "qpvqe/pauli.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qpvqe {

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

inline std::string_view strip_comment(std::string_view s) {
  auto p = s.find('#');
  return p == std::string_view::npos ? s : s.substr(0, p);
}

inline bool parse_double(std::string_view tok, double& out) {
  // std::from_chars for double is available in libstdc++ 11+.
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc() && ptr == tok.data() + tok.size() && std::isfinite(out);
}

inline bool parse_int(std::string_view tok, int& out) {
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc() && ptr == tok.data() + tok.size();
}

}  // namespace detail

inline PauliSum parse_hamiltonian(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0, n = -1;
  PauliSum h;
  while (std::getline(in, raw)) {
    ++line_no;
    auto toks = detail::split_ws(detail::strip_comment(raw));
    if (toks.empty()) continue;
    if (n < 0) {
      if (toks.size() != 2 || toks[0] != "qubits" || !detail::parse_int(toks[1], n) || n < 1 || n > kMaxQubits) {
        throw ParseError(line_no, "expected header 'qubits <n>'");
      }
      h = PauliSum(n);
      continue;
    }
    double c = 0.0;
    if (!detail::parse_double(toks[0], c)) {
      throw ParseError(line_no, "coefficient '" + std::string(toks[0]) + "' is not a real number");
    }
    if (toks.size() < 2) throw ParseError(line_no, "missing Pauli word");
    PauliString s(n);
    if (toks.size() == 2 && toks[1] == "I") {
      h.add_term(s, c);
      continue;
    }
    for (std::size_t t = 1; t < toks.size(); ++t) {
      auto f = toks[t];
      PauliLetter l{};
      switch (f.empty() ? '?' : f[0]) {
        case 'X': l = PauliLetter::X; break;
        case 'Y': l = PauliLetter::Y; break;
        case 'Z': l = PauliLetter::Z; break;
        default: throw ParseError(line_no, "unknown Pauli factor '" + std::string(f) + "'");
      }
      int q = -1;
      if (!detail::parse_int(f.substr(1), q)) throw ParseError(line_no, "bad qubit index in '" + std::string(f) + "'");
      if (q < 0 || q >= n) {
        throw ParseError(line_no, "qubit index " + std::to_string(q) + " out of range for " + std::to_string(n) + " qubits");
      }
      if (s.letter(q) != PauliLetter::I) throw ParseError(line_no, "qubit " + std::to_string(q) + " repeated");
      s.set(q, l);
    }
    h.add_term(s, c);
  }
  if (n < 0) throw ParseError(line_no, "missing 'qubits <n>' header");
  if (!h.is_hermitian(1e-12)) throw ParseError(line_no, "imaginary residue after collection");
  return h;
}

/// Writes the canonical text form; round-trips through parse_hamiltonian.
inline std::string serialize_hamiltonian(const PauliSum& h) {
  if (!h.is_hermitian(1e-12)) throw std::invalid_argument("serialize_hamiltonian: non-Hermitian sum");
  std::string out = "qubits " + std::to_string(h.n_qubits()) + "\n";
  char buf[64];
  for (const auto& [s, c] : h.terms()) {
    std::snprintf(buf, sizeof buf, "%.17g ", c.real());
    out += buf;
    out += s.to_string();
    out += '\n';
  }
  return out;
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

inline PauliSum load_hamiltonian(const std::string& path) {
  try {
    return parse_hamiltonian(read_text_file(path));
  } catch (const ParseError& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

}  // namespace qpvqe
