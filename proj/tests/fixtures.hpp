#pragma once

#include <map>
#include <string>
#include <vector>

#include "impactrank/corpus.hpp"

namespace impactrank::testing {

inline Publication make_pub(std::string id, std::vector<std::string> scholars, int year,
                            std::map<int, std::int64_t> counts) {
    Publication p;
    p.pub_id = std::move(id);
    p.scholar_ids = std::move(scholars);
    p.pub_year = year;
    for (const auto& [y, n] : counts) p.history.counts[y] = n;
    return p;
}

inline Scholar make_scholar(std::string id, std::vector<std::string> interests = {},
                            bool tenured = false) {
    Scholar s;
    s.scholar_id = std::move(id);
    s.interests = std::move(interests);
    s.tenured = tenured;
    return s;
}

/// Three scholars, four publications, observed through 2016.
inline Corpus small_corpus() {
    std::vector<Scholar> scholars = {
        make_scholar("s1", {"cell biology"}, true),
        make_scholar("s2", {"physics"}, false),
        make_scholar("s3", {"genetics", "neuroscience"}, true),
    };
    std::vector<Publication> pubs = {
        make_pub("p1", {"s1"}, 2000, {{2000, 3}, {2001, 2}, {2003, 4}}),
        make_pub("p2", {"s1", "s2"}, 2005, {{2005, 1}, {2006, 5}}),
        make_pub("p3", {"s2"}, 2001, {{2002, 7}}),
        make_pub("p4", {"s3"}, 2010, {}),
    };
    return Corpus::build(std::move(scholars), std::move(pubs), 2016);
}

}  // namespace impactrank::testing
