#include "crforge/io.hpp"

#include <cctype>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace crforge {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw series_error(msg); }

Json parse_json(const std::string& text, const std::string& what) {
    Json j = Json::parse(text, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded()) fail(what + ": not valid JSON");
    return j;
}

const Json& member(const Json& j, const char* key, const std::string& what) {
    if (!j.is_object()) fail(what + ": expected a JSON object");
    auto it = j.find(key);
    if (it == j.end()) fail(what + ": missing key \"" + std::string(key) + "\"");
    return *it;
}

int int_member(const Json& j, const char* key, const std::string& what) {
    const Json& v = member(j, key, what);
    if (!v.is_number_integer())
        fail(what + ": key \"" + std::string(key) + "\" must be an integer");
    return v.get<int>();
}

std::string string_member(const Json& j, const char* key, const std::string& what) {
    const Json& v = member(j, key, what);
    if (!v.is_string()) fail(what + ": key \"" + std::string(key) + "\" must be a string");
    return v.get<std::string>();
}

void check_keys(const Json& j, std::initializer_list<const char*> allowed,
                const std::string& what) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k) known = true;
        if (!known) fail(what + ": unrecognized key \"" + it.key() + "\"");
    }
}

/* strict shape: optional sign, digits, optional "/" + optional sign + digits */
bool rational_shape(const std::string& s) {
    size_t i = 0;
    const size_t n = s.size();
    auto digits = [&]() {
        size_t start = i;
        while (i < n && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
        return i > start;
    };
    if (i < n && s[i] == '-') ++i;
    if (!digits()) return false;
    if (i < n) {
        if (s[i] != '/') return false;
        ++i;
        if (i < n && s[i] == '-') ++i;
        if (!digits()) return false;
    }
    return i == n;
}

std::string exponent_text(const MultiIndex& m) {
    std::ostringstream o;
    o << '[';
    for (int i = 0; i < m.size(); ++i) {
        if (i) o << ", ";
        o << m[i];
    }
    o << ']';
    return o.str();
}

std::string complex_text(const ComplexRational& c) {
    return "(" + rational_to_string(c.re) + ", " + rational_to_string(c.im) + ")";
}

std::string term_text(const MultiIndex& m, const ComplexRational& c) {
    std::ostringstream o;
    o << '[';
    for (int i = 0; i < m.size(); ++i) o << m[i] << ", ";
    o << '"' << rational_to_string(c.re) << "\", \"" << rational_to_string(c.im) << "\"]";
    return o.str();
}

std::string series_line(const TruncatedSeries& f) {
    std::ostringstream o;
    o << '[';
    bool first = true;
    for (const auto& [m, c] : f.terms) {
        if (!first) o << ", ";
        o << term_text(m, c);
        first = false;
    }
    o << ']';
    return o.str();
}

void emit_series_block(std::ostringstream& o, const char* key, const SeriesTuple& tuple,
                       int truncation, bool last) {
    o << "  \"" << key << "\": [\n";
    for (size_t i = 0; i < tuple.size(); ++i) {
        o << "    " << series_line(truncate_to(tuple[i], truncation));
        o << (i + 1 < tuple.size() ? ",\n" : "\n");
    }
    o << "  ]" << (last ? "\n" : ",\n");
}

SeriesTuple tuple_from_json(const Json& arr, int count, int nvars, int prec, const char* key,
                            const std::string& what) {
    if (!arr.is_array() || static_cast<int>(arr.size()) != count)
        fail(what + ": key \"" + std::string(key) + "\" must be an array of " +
             std::to_string(count) + " series");
    SeriesTuple out;
    for (int i = 0; i < count; ++i)
        out.push_back(series_from_terms(arr[i], nvars, prec,
                                        what + ": " + key + "[" + std::to_string(i) + "]"));
    return out;
}

}  // namespace

mpq_class rational_from_text(const std::string& s, const std::string& where) {
    if (!rational_shape(s)) fail(where + ": malformed rational \"" + s + "\"");
    mpq_class q;
    if (q.set_str(s, 10) != 0) fail(where + ": malformed rational \"" + s + "\"");
    if (sgn(mpz_class(q.get_den())) == 0) fail(where + ": zero denominator in \"" + s + "\"");
    q.canonicalize();
    return q;
}

Json series_terms(const TruncatedSeries& f) {
    Json terms = Json::array();
    for (const auto& [m, c] : f.terms) {
        Json t = Json::array();
        for (int i = 0; i < m.size(); ++i) t.push_back(m[i]);
        t.push_back(rational_to_string(c.re));
        t.push_back(rational_to_string(c.im));
        terms.push_back(std::move(t));
    }
    return terms;
}

TruncatedSeries series_from_terms(const Json& terms, int nvars, int prec,
                                  const std::string& where) {
    if (!terms.is_array()) fail(where + ": expected an array of terms");
    TruncatedSeries f(nvars, prec);
    for (size_t t = 0; t < terms.size(); ++t) {
        const std::string here = where + ", term " + std::to_string(t);
        const Json& term = terms[t];
        if (!term.is_array() || static_cast<int>(term.size()) != nvars + 2)
            fail(here + ": expected [" + std::to_string(nvars) +
                 " exponents, \"re\", \"im\"]");
        MultiIndex m(nvars);
        for (int i = 0; i < nvars; ++i) {
            if (!term[i].is_number_integer())
                fail(here + ": exponent " + std::to_string(i) + " must be an integer");
            m[i] = term[i].get<int>();
            if (m[i] < 0) fail(here + ": negative exponent");
        }
        if (m.degree() > prec)
            fail(here + ": term degree " + std::to_string(m.degree()) +
                 " exceeds the truncation " + std::to_string(prec));
        if (!term[nvars].is_string() || !term[nvars + 1].is_string())
            fail(here + ": coefficient parts must be strings");
        ComplexRational c(rational_from_text(term[nvars].get<std::string>(), here),
                          rational_from_text(term[nvars + 1].get<std::string>(), here));
        f.add_term(m, c);
    }
    return f;
}

Json series_payload(const TruncatedSeries& f) {
    return Json{{"nvars", f.nvars}, {"prec", f.prec}, {"terms", series_terms(f)}};
}

GenericSubmanifoldNF ParsedManifold::to_normal_form() const {
    if (is_normal_form()) return nf();
    return normalize(defining()).m;
}

ParsedManifold parse_manifold_text(const std::string& text) {
    const std::string what = "manifold file";
    Json j = parse_json(text, what);
    check_keys(j, {"format", "mode", "n", "d", "truncation", "q", "rho"}, what);
    if (string_member(j, "format", what) != manifold_format_tag)
        fail(what + ": unrecognized format tag (expected \"" +
             std::string(manifold_format_tag) + "\")");
    const std::string mode = string_member(j, "mode", what);
    const int n = int_member(j, "n", what);
    const int d = int_member(j, "d", what);
    const int truncation = int_member(j, "truncation", what);
    if (n < 1 || d < 1) fail(what + ": dimensions must be positive");
    if (truncation < 1) fail(what + ": truncation must be positive");

    if (mode == "normal_form") {
        if (j.contains("rho")) fail(what + ": normal_form files carry \"q\", not \"rho\"");
        SeriesTuple Q =
            tuple_from_json(member(j, "q", what), d, 2 * n + d, truncation, "q", what);
        try {
            return ParsedManifold{make_manifold(n, d, std::move(Q))};
        } catch (const series_error& e) {
            fail(what + ": " + e.what());
        }
    }
    if (mode == "defining") {
        if (j.contains("q")) fail(what + ": defining files carry \"rho\", not \"q\"");
        const int N = n + d;
        SeriesTuple rho =
            tuple_from_json(member(j, "rho", what), d, 2 * N, truncation, "rho", what);
        /* coefficient-level reality diagnostic before the constructor: the
         * series must be fixed by conjugation combined with the exchange of
         * the two variable blocks */
        std::vector<int> swap(2 * N);
        for (int i = 0; i < 2 * N; ++i) swap[i] = (i + N) % (2 * N);
        for (int l = 0; l < d; ++l) {
            TruncatedSeries diff = sub(rho[l], bar_conjugate(rho[l], &swap));
            if (diff.is_zero()) continue;
            const MultiIndex& bad = diff.terms.begin()->first;
            MultiIndex swapped(2 * N);
            for (int i = 0; i < 2 * N; ++i) swapped[swap[i]] = bad[i];
            fail(what + ": reality violated in rho[" + std::to_string(l) + "] at exponent " +
                 exponent_text(bad) + ": coefficient " + complex_text(rho[l].coeff(bad)) +
                 " but the swapped conjugate requires " +
                 complex_text(rho[l].coeff(swapped).conj()));
        }
        try {
            return ParsedManifold{make_defining(N, d, std::move(rho))};
        } catch (const series_error& e) {
            fail(what + ": " + e.what());
        }
    }
    fail(what + ": unknown mode \"" + mode +
         "\" (expected \"normal_form\" or \"defining\")");
}

FormalMapNF parse_map_text(const std::string& text) {
    const std::string what = "map file";
    Json j = parse_json(text, what);
    check_keys(j, {"format", "n", "d", "np", "dp", "truncation", "f", "g"}, what);
    if (string_member(j, "format", what) != map_format_tag)
        fail(what + ": unrecognized format tag (expected \"" + std::string(map_format_tag) +
             "\")");
    const int n = int_member(j, "n", what);
    const int d = int_member(j, "d", what);
    const int np = int_member(j, "np", what);
    const int dp = int_member(j, "dp", what);
    const int truncation = int_member(j, "truncation", what);
    if (n < 1 || d < 1 || np < 1 || dp < 1) fail(what + ": dimensions must be positive");
    if (truncation < 1) fail(what + ": truncation must be positive");
    SeriesTuple F = tuple_from_json(member(j, "f", what), np, n + d, truncation, "f", what);
    SeriesTuple G = tuple_from_json(member(j, "g", what), dp, n + d, truncation, "g", what);
    for (int p = 0; p < np; ++p)
        if (!F[p].constant_term().is_zero())
            fail(what + ": component f[" + std::to_string(p) +
                 "] has a nonzero constant term (maps must fix the origin)");
    for (int l = 0; l < dp; ++l)
        if (!G[l].constant_term().is_zero())
            fail(what + ": component g[" + std::to_string(l) +
                 "] has a nonzero constant term (maps must fix the origin)");
    try {
        return make_map(n, d, np, dp, std::move(F), std::move(G));
    } catch (const series_error& e) {
        fail(what + ": " + e.what());
    }
}

ParsedManifold load_manifold(const std::string& path) {
    return parse_manifold_text(read_text_file(path));
}

FormalMapNF load_map(const std::string& path) { return parse_map_text(read_text_file(path)); }

std::string emit_manifold(const GenericSubmanifoldNF& m) {
    std::ostringstream o;
    o << "{\n";
    o << "  \"format\": \"" << manifold_format_tag << "\",\n";
    o << "  \"mode\": \"normal_form\",\n";
    o << "  \"n\": " << m.n << ",\n";
    o << "  \"d\": " << m.d << ",\n";
    o << "  \"truncation\": " << m.prec() << ",\n";
    emit_series_block(o, "q", m.Q, m.prec(), true);
    o << "}\n";
    return o.str();
}

std::string emit_manifold(const DefiningData& def) {
    std::ostringstream o;
    o << "{\n";
    o << "  \"format\": \"" << manifold_format_tag << "\",\n";
    o << "  \"mode\": \"defining\",\n";
    o << "  \"n\": " << def.N - def.d << ",\n";
    o << "  \"d\": " << def.d << ",\n";
    o << "  \"truncation\": " << def.prec() << ",\n";
    emit_series_block(o, "rho", def.rho, def.prec(), true);
    o << "}\n";
    return o.str();
}

std::string emit_map(const FormalMapNF& h) {
    std::ostringstream o;
    o << "{\n";
    o << "  \"format\": \"" << map_format_tag << "\",\n";
    o << "  \"n\": " << h.n << ",\n";
    o << "  \"d\": " << h.d << ",\n";
    o << "  \"np\": " << h.np << ",\n";
    o << "  \"dp\": " << h.dp << ",\n";
    o << "  \"truncation\": " << h.prec() << ",\n";
    emit_series_block(o, "f", h.F, h.prec(), false);
    emit_series_block(o, "g", h.G, h.prec(), true);
    o << "}\n";
    return o.str();
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail("cannot open file for writing: " + path);
    out << content;
    if (!out.good()) fail("failed writing file: " + path);
}

std::string content_digest(const std::string& content) {
    uint64_t h = 14695981039346656037ull;
    for (unsigned char c : content) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::ostringstream o;
    o << std::hex << std::setw(16) << std::setfill('0') << h;
    return o.str();
}

std::string dump_report(const Json& report) { return report.dump(2) + "\n"; }

Json multi_index_json(const MultiIndex& m) {
    Json j = Json::array();
    for (int i = 0; i < m.size(); ++i) j.push_back(m[i]);
    return j;
}

Json complex_json(const ComplexRational& c) {
    return Json::array({rational_to_string(c.re), rational_to_string(c.im)});
}

}  // namespace crforge
