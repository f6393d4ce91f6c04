#pragma once

#include "qsp/kmatrix.hpp"

#include <memory>

namespace qsp {

/// Shipped Satake data with parameter choices that keep gamma inside
/// K(q^{1/d}) (Choice-2 style where a split choice does not exist).
struct CatalogEntry {
    std::string name;
    std::string type;
    int rank = 1;
    std::vector<int> X;                    // 0-based nodes
    std::vector<int> tau;                  // 0-based permutation
    std::map<int, std::string> c, s;       // scalar grammar, keyed by 0-based node
    std::vector<std::string> modules;      // module descriptors "V(w1)"
    std::vector<std::pair<std::string, std::string>> pairs;
};

const std::vector<CatalogEntry>& catalog();
const CatalogEntry& catalog_entry(const std::string& name);

/// One fully-assembled working context: datum, Satake validation, parameters.
/// The datum and context live behind stable pointers so Session can move.
struct Session {
    std::unique_ptr<RootDatum> rd;
    std::unique_ptr<AlgebraCtx> ctx;
    std::unique_ptr<SatakeDatum> sd;
    QspParams params;
    std::string name;
};

Session make_session(const CatalogEntry& e, bool reverse_lex = false);

/// default quasi K-matrix cutoff: 8 for rank <= 2, 6 above
int default_cutoff(int rank);

/// "V(w1)", "V(w1+w3)", "V(2w1)" -> dominant weight
PWeight parse_module_descriptor(const RootDatum& rd, const std::string& text);

} // namespace qsp
