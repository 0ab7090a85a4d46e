#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "impactrank/corpus.hpp"
#include "impactrank/csv.hpp"
#include "impactrank/error.hpp"

namespace impactrank {

// JSONL corpus schema, one scholar per line:
//   {"scholar_id": str, "interests": [str], "tenured": bool,
//    "publications": [{"pub_id": str, "year": int, "citations": {"<year>": int}}]}
// A publication listed under several scholars with an identical payload is a
// co-authored work and is merged into one record; the same pub_id with a
// conflicting payload is rejected.
//
// An optional first line {"impact_rank_corpus": 1, "end_year": N} carries the
// end year for self-describing corpus files.

namespace detail {

struct PendingPub {
    Publication pub;
    std::size_t line = 0;
};

inline void merge_publication(std::vector<PendingPub>& pubs,
                              std::unordered_map<std::string, std::size_t>& index,
                              Publication incoming, std::size_t line) {
    auto it = index.find(incoming.pub_id);
    if (it == index.end()) {
        index[incoming.pub_id] = pubs.size();
        pubs.push_back({std::move(incoming), line});
        return;
    }
    Publication& existing = pubs[it->second].pub;
    if (existing.pub_year != incoming.pub_year || existing.history != incoming.history)
        throw ValidationError("duplicate pub_id with conflicting data: " + incoming.pub_id);
    for (const auto& sid : incoming.scholar_ids) {
        if (std::find(existing.scholar_ids.begin(), existing.scholar_ids.end(), sid) !=
            existing.scholar_ids.end())
            throw ValidationError("duplicate pub_id: " + incoming.pub_id);
        existing.scholar_ids.push_back(sid);
    }
}

inline CitationHistory parse_citations(const nlohmann::json& j, std::size_t line) {
    CitationHistory h;
    if (!j.is_object()) throw ParseError("citations must be an object keyed by year", line);
    for (auto it = j.begin(); it != j.end(); ++it) {
        int year = 0;
        try {
            year = std::stoi(it.key());
        } catch (const std::exception&) {
            throw ParseError("citation year is not an integer: " + it.key(), line);
        }
        if (!it.value().is_number_integer())
            throw ParseError("citation count is not an integer", line);
        h.counts[year] = it.value().get<std::int64_t>();
    }
    return h;
}

}  // namespace detail

/// Parse the JSONL corpus stream. end_year, when not supplied by the caller
/// or a meta line, defaults to the latest year seen in the data.
inline Corpus ingest_jsonl(std::istream& in, std::optional<int> end_year = std::nullopt) {
    std::vector<Scholar> scholars;
    std::vector<detail::PendingPub> pubs;
    std::unordered_map<std::string, std::size_t> pub_index;
    std::optional<int> meta_end_year;
    int max_year_seen = 0;

    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError(std::string("invalid JSON: ") + e.what(), lineno);
        }
        if (!j.is_object()) throw ParseError("record is not a JSON object", lineno);
        if (j.contains("impact_rank_corpus")) {
            if (j.contains("end_year")) meta_end_year = j["end_year"].get<int>();
            continue;
        }
        if (!j.contains("scholar_id") || !j["scholar_id"].is_string())
            throw ParseError("missing scholar_id", lineno);
        Scholar s;
        s.scholar_id = j["scholar_id"].get<std::string>();
        if (j.contains("interests")) {
            if (!j["interests"].is_array()) throw ParseError("interests must be an array", lineno);
            for (const auto& kw : j["interests"]) {
                if (!kw.is_string()) throw ParseError("interest is not a string", lineno);
                s.interests.push_back(detail::to_lower(kw.get<std::string>()));
            }
        }
        s.tenured = j.value("tenured", false);
        if (!j.contains("publications") || !j["publications"].is_array())
            throw ParseError("missing publications array", lineno);
        for (const auto& pj : j["publications"]) {
            if (!pj.contains("pub_id") || !pj["pub_id"].is_string())
                throw ParseError("publication missing pub_id", lineno);
            if (!pj.contains("year") || !pj["year"].is_number_integer())
                throw ParseError("publication missing year", lineno);
            Publication p;
            p.pub_id = pj["pub_id"].get<std::string>();
            p.pub_year = pj["year"].get<int>();
            p.scholar_ids = {s.scholar_id};
            if (pj.contains("citations")) p.history = detail::parse_citations(pj["citations"], lineno);
            max_year_seen = std::max(max_year_seen, p.pub_year);
            if (!p.history.counts.empty())
                max_year_seen = std::max(max_year_seen, p.history.counts.rbegin()->first);
            detail::merge_publication(pubs, pub_index, std::move(p), lineno);
        }
        scholars.push_back(std::move(s));
    }

    int ey = end_year.value_or(meta_end_year.value_or(max_year_seen));
    std::vector<Publication> plain;
    plain.reserve(pubs.size());
    for (auto& pp : pubs) plain.push_back(std::move(pp.pub));
    return Corpus::build(std::move(scholars), std::move(plain), ey);
}

inline Corpus ingest_jsonl_file(const std::string& path, std::optional<int> end_year = std::nullopt) {
    std::ifstream in(path, std::ios::binary);
    if (!in.good()) throw Error("cannot open for reading: " + path);
    return ingest_jsonl(in, end_year);
}

// CSV triple schema: scholars.csv (scholar_id, tenured, interests joined by
// ';'), publications.csv (pub_id, scholar_id, pub_year) with one row per
// (publication, author) pair, citations.csv (pub_id, year, count).

inline Corpus ingest_csv_dir(const std::string& dir, std::optional<int> end_year = std::nullopt) {
    auto parse_int = [](const std::string& s, const char* what, std::size_t line) -> long {
        try {
            std::size_t pos = 0;
            long v = std::stol(s, &pos);
            if (pos != s.size()) throw std::invalid_argument(s);
            return v;
        } catch (const std::exception&) {
            throw ParseError(std::string("invalid ") + what + ": '" + s + "'", line);
        }
    };

    std::vector<Scholar> scholars;
    {
        auto rows = read_csv_file(dir + "/scholars.csv");
        for (std::size_t i = 1; i < rows.size(); ++i) {  // row 0 is the header
            const auto& r = rows[i];
            if (r.size() < 3) throw ParseError("scholars.csv: expected 3 columns", i + 1);
            Scholar s;
            s.scholar_id = r[0];
            s.tenured = r[1] == "1" || r[1] == "true";
            std::stringstream ss(r[2]);
            std::string kw;
            while (std::getline(ss, kw, ';'))
                if (!kw.empty()) s.interests.push_back(detail::to_lower(kw));
            scholars.push_back(std::move(s));
        }
    }

    std::vector<detail::PendingPub> pubs;
    std::unordered_map<std::string, std::size_t> pub_index;
    int max_year_seen = 0;
    {
        auto rows = read_csv_file(dir + "/publications.csv");
        for (std::size_t i = 1; i < rows.size(); ++i) {
            const auto& r = rows[i];
            if (r.size() < 3) throw ParseError("publications.csv: expected 3 columns", i + 1);
            Publication p;
            p.pub_id = r[0];
            p.scholar_ids = {r[1]};
            p.pub_year = static_cast<int>(parse_int(r[2], "pub_year", i + 1));
            max_year_seen = std::max(max_year_seen, p.pub_year);
            detail::merge_publication(pubs, pub_index, std::move(p), i + 1);
        }
    }
    {
        auto rows = read_csv_file(dir + "/citations.csv");
        for (std::size_t i = 1; i < rows.size(); ++i) {
            const auto& r = rows[i];
            if (r.size() < 3) throw ParseError("citations.csv: expected 3 columns", i + 1);
            auto it = pub_index.find(r[0]);
            if (it == pub_index.end())
                throw ValidationError("citations.csv references unknown publication: " + r[0]);
            const int year = static_cast<int>(parse_int(r[1], "year", i + 1));
            const long count = parse_int(r[2], "count", i + 1);
            pubs[it->second].pub.history.counts[year] += count;
            max_year_seen = std::max(max_year_seen, year);
        }
    }

    std::vector<Publication> plain;
    plain.reserve(pubs.size());
    for (auto& pp : pubs) plain.push_back(std::move(pp.pub));
    return Corpus::build(std::move(scholars), std::move(plain), end_year.value_or(max_year_seen));
}

/// Canonical JSONL serialization: meta line first, scholars in id order,
/// publications nested per owner in id order. Co-authored publications repeat
/// under each owner with identical payloads, which ingest merges back.
inline void serialize_jsonl(const Corpus& corpus, std::ostream& out, bool with_meta = true) {
    if (with_meta) {
        nlohmann::json meta;
        meta["impact_rank_corpus"] = 1;
        meta["end_year"] = corpus.end_year();
        out << meta.dump() << '\n';
    }
    for (std::size_t si = 0; si < corpus.scholars().size(); ++si) {
        const Scholar& s = corpus.scholars()[si];
        nlohmann::json j;
        j["scholar_id"] = s.scholar_id;
        j["interests"] = s.interests;
        j["tenured"] = s.tenured;
        nlohmann::json pubs = nlohmann::json::array();
        for (std::size_t pi : corpus.pubs_of(si)) {
            const Publication& p = corpus.publications()[pi];
            nlohmann::json pj;
            pj["pub_id"] = p.pub_id;
            pj["year"] = p.pub_year;
            nlohmann::json cit = nlohmann::json::object();
            for (const auto& [year, n] : p.history.counts) cit[std::to_string(year)] = n;
            pj["citations"] = cit;
            pubs.push_back(std::move(pj));
        }
        j["publications"] = std::move(pubs);
        out << j.dump() << '\n';
    }
}

inline std::string serialize_jsonl_string(const Corpus& corpus, bool with_meta = true) {
    std::ostringstream ss;
    serialize_jsonl(corpus, ss, with_meta);
    return ss.str();
}

inline void save_corpus(const Corpus& corpus, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out.good()) throw Error("cannot open for writing: " + path);
    serialize_jsonl(corpus, out);
}

inline Corpus load_corpus(const std::string& path, std::optional<int> end_year = std::nullopt) {
    return ingest_jsonl_file(path, end_year);
}

}  // namespace impactrank
