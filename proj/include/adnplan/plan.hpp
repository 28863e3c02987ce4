// Siting-and-sizing decision shared by the cost model, the dispatcher, and
// the planner.
#pragma once

#include <vector>

namespace adnplan {

struct SiteAllocation {
    int bus = 0;
    double wt_kw = 0.0;
    double pv_kw = 0.0;
    double storage_kwh = 0.0;
    double storage_kw = 0.0;
};

struct Plan {
    std::vector<SiteAllocation> sites;

    double total_wt_kw() const {
        double s = 0.0;
        for (const auto& a : sites) s += a.wt_kw;
        return s;
    }
    double total_pv_kw() const {
        double s = 0.0;
        for (const auto& a : sites) s += a.pv_kw;
        return s;
    }
    double total_storage_kwh() const {
        double s = 0.0;
        for (const auto& a : sites) s += a.storage_kwh;
        return s;
    }
    double total_storage_kw() const {
        double s = 0.0;
        for (const auto& a : sites) s += a.storage_kw;
        return s;
    }
    bool empty() const {
        for (const auto& a : sites)
            if (a.wt_kw > 0.0 || a.pv_kw > 0.0 || a.storage_kwh > 0.0 || a.storage_kw > 0.0)
                return false;
        return true;
    }
};

}  // namespace adnplan
