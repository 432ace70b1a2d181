#pragma once

#include <algorithm>
#include <ostream>
#include <string>
#include <vector>

#include "core.hpp"

namespace zspace {

struct ReportRow {
    std::string field_id;
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
};

// Ratio lhs/rhs over a corpus; rows with both sides zero are counted, not stored.
struct EquivalenceReport {
    std::string check;
    std::string params;
    std::string manifest_version;
    std::vector<ReportRow> rows;
    std::size_t degenerate = 0;

    void add(const std::string& id, double lhs, double rhs) {
        if (lhs == 0.0 && rhs == 0.0) {
            ++degenerate;
            return;
        }
        rows.push_back({id, lhs, rhs, rhs == 0.0 ? kInf : lhs / rhs});
    }

    std::vector<double> ratios() const {
        std::vector<double> out;
        for (const auto& r : rows) out.push_back(r.ratio);
        return out;
    }
    double min_ratio() const {
        double m = kInf;
        for (const auto& r : rows) m = std::min(m, r.ratio);
        return m;
    }
    double max_ratio() const {
        double m = 0.0;
        for (const auto& r : rows) m = std::max(m, r.ratio);
        return m;
    }
    double median_ratio() const { return median_of(ratios()); }
    // max/min of the ratios.
    double width() const { return rows.empty() ? 1.0 : max_ratio() / min_ratio(); }
    // Smallest C with every ratio in [1/C, C].
    double symmetric_bound() const { return rows.empty() ? 1.0 : std::max(max_ratio(), 1.0 / min_ratio()); }
};

inline void write_csv_header(std::ostream& os) { os << "check,params,field_id,lhs,rhs,ratio\n"; }

inline void write_csv_rows(std::ostream& os, const EquivalenceReport& rep) {
    for (const auto& r : rep.rows)
        os << rep.check << ",\"" << rep.params << "\"," << r.field_id << "," << format_real(r.lhs) << "," << format_real(r.rhs)
           << "," << format_real(r.ratio) << "\n";
}

}  // namespace zspace
