#pragma once

#include <string>
#include <utility>
#include <vector>

#include "dfsqec/pauli.hpp"

namespace dfsqec {

struct CodeSpec {
  std::string name;
  int n = 0;
  int k = 1;
  int d = 0;
  std::vector<PauliString> stabilizers;
  std::vector<std::string> labels;
  PauliString logical_x;
  PauliString logical_y;
  PauliString logical_z;
};

CodeSpec build_dfs();
CodeSpec build_513();
// generator order r0..r4, s0..s3
CodeSpec build_1014();
CodeSpec build_code(const std::string& name);  // "211", "513" or "1014"

// s_p = s0 s1 s2 s3
PauliString redundant_check_1014();

struct ConcatenationMap {
  CodeSpec outer;
  CodeSpec inner;
  std::vector<std::pair<int, int>> pairing;

  PauliString map(const PauliString& outer_op) const;
  CodeSpec concatenate() const;
};

ConcatenationMap dfs_in_513();

class VerificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct VerificationReport {
  std::string code;
  bool commutation_ok = true;
  bool logical_ok = true;
  int distance = 0;
  bool distance_ok = false;
  bool concatenation_checked = false;
  bool concatenation_ok = true;
  bool group_ok = true;
  std::vector<std::string> failures;
  bool ok() const { return commutation_ok && logical_ok && distance_ok && concatenation_ok && group_ok; }
};

VerificationReport verify_code(const CodeSpec& code);
// throws VerificationError naming the first failure
void require_valid(const CodeSpec& code);

int code_distance(const CodeSpec& code);

// Every element of the stabilizer group, with signs.
std::vector<PauliString> stabilizer_group(const CodeSpec& code);

// True when p equals a stabilizer up to sign.
bool in_stabilizer_group(const PauliString& p, const CodeSpec& code);
// True when p commutes with all generators and acts nontrivially on the logical qubit.
bool is_nontrivial_logical(const PauliString& p, const CodeSpec& code);
// Logical class of p: bit 0 = anticommutes with logical Z, bit 1 = with logical X.
int logical_class(const PauliString& p, const CodeSpec& code);
// Minimum weight of p*g over the stabilizer group.
int reduced_weight(const PauliString& p, const CodeSpec& code);

std::vector<PauliString> minimal_even_distance_logicals(const CodeSpec& code);

std::string code_document(const CodeSpec& code, const VerificationReport& report);

}  // namespace dfsqec
