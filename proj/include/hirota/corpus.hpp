#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hirota/integrability.hpp"
#include "hirota/symplectic.hpp"

namespace hirota {

// One named equation with its expected properties.  Evolutionary entries give
// u_tt = f(a, b, c, p, q) directly; implicit entries give F(u_11, ..., u_33) = 0
// together with a base point on (or near) the hypersurface.  Entries whose
// equation does not involve u_33 carry a fixed invertible chart matrix L that
// mixes it in before the implicit solve.
struct CorpusEntry {
    std::string name;
    std::string note;
    bool evolutionary = true;
    std::string expr_text;

    // evolutionary form: sampling box in (a, b, c, p, q)
    Box5 box{};

    // implicit form: base point in (u11, u12, u13, u22, u23, u33) and the
    // halfwidth of the sampling box around it
    std::array<double, 6> base{};
    double halfwidth = 0.05;
    std::optional<Mat3> chart;  // x = L x~ preprocessing

    int expected_integrable = -1;  // 1 integrable, 0 not, -1 unchecked
    int expected_symmetry = -1;    // -1 unchecked
    Box6 symmetry_box{{-1, -1, -1, -1, -1, -1}, {1, 1, 1, 1, 1, 1}};
};

// Parses the key/value table format (see data/corpus.txt); throws
// std::invalid_argument with a line number on malformed input.
std::vector<CorpusEntry> parse_corpus(const std::string& text);
std::vector<CorpusEntry> load_corpus_file(const std::string& path);

// The built-in corpus (same content as the shipped data/corpus.txt).
const std::string& default_corpus_text();
std::vector<CorpusEntry> default_corpus();

// The equation as an expression: evolutionary entries parse in (a,b,c,p,q),
// implicit ones in (u11,...,u33).
Expr entry_expr(const CorpusEntry& e);

// Implicit 6-variable form for every entry (u33 - f for evolutionary ones),
// with the chart change applied when present.
Expr entry_implicit(const CorpusEntry& e);

// Jet source for the integrability engine: order-3 jets of the evolutionary
// density at requested (a,b,c,p,q) points, via the implicit solve when the
// entry is not given in evolutionary form.  Also returns the sampling box.
std::pair<JetSource, Box5> entry_jet_source(const CorpusEntry& e);

struct EntryAnalysis {
    std::string name;
    bool checked_verdict = false;
    Verdict verdict;
    bool verdict_ok = true;
    bool checked_symmetry = false;
    SymmetryResult symmetry;
    bool symmetry_ok = true;
    bool pass = true;
    std::string message;
};

// Runs every analysis the entry declares expectations for and compares.
EntryAnalysis analyze_entry(const CorpusEntry& e, std::uint64_t seed,
                            const VerdictConfig& cfg = {});

}  // namespace hirota
