#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace trajmine {

/// Three-valued verdict. OutOfWindow marks evaluations that index a trace
/// outside its window; it is strict: any OutOfWindow subresult makes the
/// whole result OutOfWindow.
enum class MtlValue { False, True, OutOfWindow };

const char* to_string(MtlValue v);

/// A named boolean signal over a contiguous step range starting at
/// `offset`.
struct BoolTrace {
  std::string name;
  std::vector<bool> values;
  std::int64_t offset = 0;

  bool covers(std::int64_t step) const {
    return step >= offset &&
           step < offset + static_cast<std::int64_t>(values.size());
  }
  bool at(std::int64_t step) const {
    return values[static_cast<std::size_t>(step - offset)];
  }
};

enum class MtlOp {
  atom,
  negation,
  conjunction,
  disjunction,
  implication,
  equivalence,
  always,      // G[lo,hi]
  eventually,  // F[lo,hi]
};

struct MtlNode {
  MtlOp op = MtlOp::atom;
  std::string atom;                   // op == atom
  std::int64_t lo = 0;                // temporal ops, inclusive step offsets
  std::int64_t hi = 0;
  std::shared_ptr<const MtlNode> lhs; // unary: the operand
  std::shared_ptr<const MtlNode> rhs; // binary only
};

/// Discrete-step bounded temporal formula.
///
/// Grammar: atoms are identifiers; `!` binds tightest, then `&`, `|`, `->`
/// (right-associative), `<->`. `G[lo,hi](p)` and `F[lo,hi](p)` bind like
/// `!`; offsets are relative to the evaluation step, may be negative, and
/// require lo <= hi. A bare G or F without a bracket is an ordinary atom.
class MtlFormula {
 public:
  /// Throws SyntaxError on malformed input, BadInterval when lo > hi.
  static MtlFormula parse(const std::string& text);

  /// Canonical text; parse(str()) reproduces the formula and str() is a
  /// fixed point of parse-then-print.
  std::string str() const;

  const MtlNode& root() const { return *root_; }

  /// Sorted unique atom names referenced by the formula.
  std::vector<std::string> atoms() const;

 private:
  explicit MtlFormula(std::shared_ptr<const MtlNode> root)
      : root_(std::move(root)) {}
  std::shared_ptr<const MtlNode> root_;
};

/// Evaluates at one step against the named traces. Throws UnknownAtom when
/// the formula references a name no trace carries.
MtlValue eval_at(const MtlFormula& formula,
                 const std::vector<BoolTrace>& traces, std::int64_t step);

/// Evaluates at every step where the result is defined (not OutOfWindow);
/// those steps always form one contiguous run. The result is named after
/// the formula text and its offset is the first defined step.
BoolTrace eval_all(const MtlFormula& formula,
                   const std::vector<BoolTrace>& traces);

}  // namespace trajmine
