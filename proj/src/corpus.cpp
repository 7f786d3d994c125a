#include "hirota/corpus.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "corpus_text.hpp"

namespace hirota {

namespace {

const std::vector<std::string> kVars5 = {"a", "b", "c", "p", "q"};
const std::vector<std::string> kVars6 = {"u11", "u12", "u13", "u22", "u23", "u33"};

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<double> parse_numbers(const std::string& s, size_t expect, int line) {
    std::istringstream in(s);
    std::vector<double> out;
    double v;
    while (in >> v) out.push_back(v);
    if (out.size() != expect)
        throw std::invalid_argument("corpus line " + std::to_string(line) + ": expected " +
                                    std::to_string(expect) + " numbers, got " +
                                    std::to_string(out.size()));
    return out;
}

// Newton refinement of u33 onto F = 0 (shared by loading and the jet source).
void refine_u33(const Expr& F, std::array<double, 6>& b6) {
    Expr Fz = F.diff(5);
    for (int it = 0; it < 80; ++it) {
        double r = F.eval(std::span<const double>(b6.data(), 6));
        if (std::abs(r) < 1e-13) return;
        double g = Fz.eval(std::span<const double>(b6.data(), 6));
        if (std::abs(g) < 1e-10)
            throw NumericError("corpus: u33 gradient vanishes while projecting onto the surface");
        b6[5] -= r / g;
    }
    throw NumericError("corpus: could not project the base point onto the hypersurface");
}

}  // namespace

std::vector<CorpusEntry> parse_corpus(const std::string& text) {
    std::vector<CorpusEntry> out;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    CorpusEntry* cur = nullptr;
    while (std::getline(in, raw)) {
        ++line;
        std::string s = trim(raw);
        if (s.empty() || s[0] == '#') continue;
        if (s.front() == '[') {
            if (s.back() != ']')
                throw std::invalid_argument("corpus line " + std::to_string(line) +
                                            ": unterminated [name]");
            out.emplace_back();
            cur = &out.back();
            cur->name = trim(s.substr(1, s.size() - 2));
            if (cur->name.empty())
                throw std::invalid_argument("corpus line " + std::to_string(line) +
                                            ": empty entry name");
            continue;
        }
        size_t eq = s.find('=');
        if (!cur || eq == std::string::npos)
            throw std::invalid_argument("corpus line " + std::to_string(line) +
                                        ": expected 'key = value' inside an entry");
        std::string key = trim(s.substr(0, eq));
        std::string val = trim(s.substr(eq + 1));
        if (key == "kind") {
            if (val == "evolutionary")
                cur->evolutionary = true;
            else if (val == "implicit")
                cur->evolutionary = false;
            else
                throw std::invalid_argument("corpus line " + std::to_string(line) +
                                            ": unknown kind '" + val + "'");
        } else if (key == "expr") {
            cur->expr_text = val;
        } else if (key == "box_lo") {
            auto v = parse_numbers(val, 5, line);
            std::copy(v.begin(), v.end(), cur->box.lo.begin());
        } else if (key == "box_hi") {
            auto v = parse_numbers(val, 5, line);
            std::copy(v.begin(), v.end(), cur->box.hi.begin());
        } else if (key == "base") {
            auto v = parse_numbers(val, 6, line);
            std::copy(v.begin(), v.end(), cur->base.begin());
        } else if (key == "halfwidth") {
            cur->halfwidth = parse_numbers(val, 1, line)[0];
        } else if (key == "chart") {
            auto v = parse_numbers(val, 9, line);
            Mat3 L{};
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    L[static_cast<size_t>(i)][static_cast<size_t>(j)] =
                        v[static_cast<size_t>(3 * i + j)];
            cur->chart = L;
        } else if (key == "integrable") {
            if (val == "yes")
                cur->expected_integrable = 1;
            else if (val == "no")
                cur->expected_integrable = 0;
            else
                throw std::invalid_argument("corpus line " + std::to_string(line) +
                                            ": integrable must be yes or no");
        } else if (key == "symmetry") {
            cur->expected_symmetry = static_cast<int>(parse_numbers(val, 1, line)[0]);
        } else if (key == "symbox_lo") {
            auto v = parse_numbers(val, 6, line);
            std::copy(v.begin(), v.end(), cur->symmetry_box.lo.begin());
        } else if (key == "symbox_hi") {
            auto v = parse_numbers(val, 6, line);
            std::copy(v.begin(), v.end(), cur->symmetry_box.hi.begin());
        } else if (key == "note") {
            cur->note = val;
        } else {
            throw std::invalid_argument("corpus line " + std::to_string(line) +
                                        ": unknown key '" + key + "'");
        }
    }
    for (const auto& e : out) {
        if (e.expr_text.empty())
            throw std::invalid_argument("corpus entry '" + e.name + "' has no expr");
        (void)entry_expr(e);  // parse errors surface at load, not first use
    }
    return out;
}

std::vector<CorpusEntry> load_corpus_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open corpus file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_corpus(ss.str());
}

const std::string& default_corpus_text() {
    static const std::string text = detail::kCorpusText;
    return text;
}

std::vector<CorpusEntry> default_corpus() { return parse_corpus(default_corpus_text()); }

Expr entry_expr(const CorpusEntry& e) {
    return Expr::parse(e.expr_text, e.evolutionary ? kVars5 : kVars6);
}

Expr entry_implicit(const CorpusEntry& e) {
    if (!e.evolutionary) return entry_expr(e);
    Expr f = entry_expr(e);
    // u33 - f(a,b,c,p,q) with (a,b,c,p,q) = (u11,u12,u22,u13,u23)
    std::array<Expr, 5> repl = {Expr::var(0, kVars6), Expr::var(1, kVars6), Expr::var(3, kVars6),
                                Expr::var(2, kVars6), Expr::var(4, kVars6)};
    return Expr::var(5, kVars6) - f.substitute(std::span<const Expr>(repl.data(), 5));
}

std::pair<JetSource, Box5> entry_jet_source(const CorpusEntry& e) {
    if (e.evolutionary) {
        Expr f = entry_expr(e);
        JetSource src = [f](const std::array<double, 5>& ab) {
            return f.eval_jet(std::span<const double>(ab.data(), 5), 3);
        };
        return {src, e.box};
    }
    Expr F = entry_expr(e);
    std::array<double, 6> base = e.base;
    if (e.chart) {
        F = change_variables(F, *e.chart);
        base = map_point_changed_vars(base, *e.chart);
    }
    refine_u33(F, base);
    JetSource src = [F, base](const std::array<double, 5>& ab) {
        std::array<double, 6> b6 = {ab[0], ab[1], ab[3], ab[2], ab[4], base[5]};
        refine_u33(F, b6);
        return implicit_jet_abcpq(F, b6);
    };
    std::array<double, 5> mid = {base[0], base[1], base[3], base[2], base[4]};
    Box5 box;
    for (int i = 0; i < 5; ++i) {
        box.lo[static_cast<size_t>(i)] = mid[static_cast<size_t>(i)] - e.halfwidth;
        box.hi[static_cast<size_t>(i)] = mid[static_cast<size_t>(i)] + e.halfwidth;
    }
    return {src, box};
}

EntryAnalysis analyze_entry(const CorpusEntry& e, std::uint64_t seed, const VerdictConfig& cfg) {
    EntryAnalysis out;
    out.name = e.name;
    if (e.expected_integrable >= 0) {
        out.checked_verdict = true;
        try {
            auto [src, box] = entry_jet_source(e);
            out.verdict = test_integrability(src, box, seed, cfg);
        } catch (const std::exception& ex) {
            out.verdict.status = Status::inconclusive;
            out.verdict.note = ex.what();
        }
        Status want = e.expected_integrable ? Status::integrable : Status::not_integrable;
        out.verdict_ok = out.verdict.status == want;
        if (!out.verdict_ok) {
            out.message += "verdict " + std::string(to_string(out.verdict.status)) +
                           ", expected " + to_string(want);
            if (!out.verdict.note.empty()) out.message += " (" + out.verdict.note + ")";
        }
    }
    if (e.expected_symmetry >= 0) {
        out.checked_symmetry = true;
        try {
            out.symmetry = symmetry_dimension(entry_implicit(e), 80, seed, e.symmetry_box);
            out.symmetry_ok =
                out.symmetry.dimension == e.expected_symmetry && out.symmetry.threshold_stable;
        } catch (const std::exception& ex) {
            out.symmetry_ok = false;
            out.message += std::string(out.message.empty() ? "" : "; ") + ex.what();
        }
        if (!out.symmetry_ok && out.symmetry.dimension != e.expected_symmetry) {
            out.message += std::string(out.message.empty() ? "" : "; ") + "symmetry dimension " +
                           std::to_string(out.symmetry.dimension) + ", expected " +
                           std::to_string(e.expected_symmetry);
        }
    }
    out.pass = out.verdict_ok && out.symmetry_ok;
    return out;
}

}  // namespace hirota
