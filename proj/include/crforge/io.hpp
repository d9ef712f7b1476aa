#pragma once

#include <json.hpp>
#include <string>
#include <variant>

#include "manifold.hpp"
#include "mapping.hpp"

namespace crforge {

using Json = nlohmann::ordered_json;

/* File format tags.  A manifold file carries either normal-form graph data
 * (mode "normal_form": d series Q_j in the 2n+d Q-space variables) or raw
 * defining series (mode "defining": d series rho_j in the 2N doubled
 * variables); a map file carries the n'+d' components of a formal map in the
 * n+d source variables.  Series terms are flat arrays
 * [e_0, ..., e_{v-1}, "re", "im"] with exponents as nonnegative integers and
 * the two rational parts as lowest-term strings with positive denominator. */
inline constexpr const char* manifold_format_tag = "crforge-manifold-v1";
inline constexpr const char* map_format_tag = "crforge-map-v1";

/* ---- rational and series payloads ---- */

/* strict file-facing parser: accepts "p" or "p/q" only, canonicalizes, and
 * rejects zero denominators and malformed strings with a message naming
 * `where` */
mpq_class rational_from_text(const std::string& s, const std::string& where);

/* canonical term list: graded-lex ascending, no zero coefficients */
Json series_terms(const TruncatedSeries& f);
/* inverse: accepts any term order, accumulates duplicate exponents, drops
 * terms that cancel to zero; rejects wrong exponent counts, negative
 * exponents, and term degrees beyond `prec` */
TruncatedSeries series_from_terms(const Json& terms, int nvars, int prec,
                                  const std::string& where);
/* series with its shape, for report payloads:
 * {"nvars": v, "prec": p, "terms": [...]} */
Json series_payload(const TruncatedSeries& f);

/* ---- manifold and map files ---- */

struct ParsedManifold {
    std::variant<GenericSubmanifoldNF, DefiningData> data;

    bool is_normal_form() const {
        return std::holds_alternative<GenericSubmanifoldNF>(data);
    }
    const GenericSubmanifoldNF& nf() const { return std::get<GenericSubmanifoldNF>(data); }
    const DefiningData& defining() const { return std::get<DefiningData>(data); }
    /* the normal form itself, or the verified normalization of the defining
     * data */
    GenericSubmanifoldNF to_normal_form() const;
};

/* Parsers validate structure (tags, modes, dimensions, term shapes) and the
 * geometric invariants (reality coefficient by coefficient, vanishing at the
 * origin, genericity, normality, zero constant terms for maps), throwing
 * series_error with a named diagnostic on the first violation. */
ParsedManifold parse_manifold_text(const std::string& text);
FormalMapNF parse_map_text(const std::string& text);
ParsedManifold load_manifold(const std::string& path);
FormalMapNF load_map(const std::string& path);

/* Canonical emission: fixed key order, graded-lex terms, lowest-term
 * rationals, one series per line, trailing newline.  parse then emit is the
 * identity on canonical files. */
std::string emit_manifold(const GenericSubmanifoldNF& m);
std::string emit_manifold(const DefiningData& def);
std::string emit_map(const FormalMapNF& h);

/* ---- files, digests, reports ---- */

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

/* FNV-1a 64-bit content digest as 16 lowercase hex digits; used to tie
 * reports to their exact input bytes */
std::string content_digest(const std::string& content);

/* canonical report rendering: two-space indent, trailing newline */
std::string dump_report(const Json& report);

/* shared report helpers */
Json multi_index_json(const MultiIndex& m);
Json complex_json(const ComplexRational& c);

}  // namespace crforge
