#include "sra/vc/vcgen.hpp"

#include "json.hpp"

#include <iomanip>
#include <sstream>

namespace sra {

const char* to_string(Overall o)
{
    switch (o) {
    case Overall::Proven: return "Proven";
    case Overall::RefutedObligation: return "Refuted-obligation";
    case Overall::Inconclusive: return "Inconclusive";
    }
    return "Inconclusive";
}

VcReport make_report(const std::vector<VerificationTask>& tasks, std::vector<VcResult> results)
{
    VcReport r;
    r.tasks = tasks;
    r.results = std::move(results);
    bool refuted = false;
    bool open = false;
    for (const auto& res : r.results) {
        r.total_seconds += res.seconds;
        if (res.rlimit)
            r.total_rlimit = r.total_rlimit.value_or(0) + *res.rlimit;
        refuted = refuted || res.verdict == Verdict::Invalid;
        open = open || res.verdict == Verdict::Unknown || res.verdict == Verdict::Timeout;
    }
    if (r.results.size() != r.tasks.size())
        open = true;
    r.overall = refuted ? Overall::RefutedObligation : open ? Overall::Inconclusive : Overall::Proven;
    return r;
}

int VcReport::exit_code() const
{
    switch (overall) {
    case Overall::Proven: return 0;
    case Overall::RefutedObligation: return 1;
    case Overall::Inconclusive: return 3;
    }
    return 3;
}

std::string VcReport::text() const
{
    std::ostringstream out;
    out << std::fixed << std::setprecision(3);
    for (const auto& res : results) {
        out << std::left << std::setw(9) << to_string(res.verdict) << " " << res.task << "  " << res.seconds << " s";
        if (res.rlimit)
            out << "  rlimit " << *res.rlimit;
        if (!res.model_summary.empty())
            out << "  counter-model: " << res.model_summary;
        if (!res.detail.empty())
            out << "  (" << res.detail << ")";
        out << "\n";
    }
    out << to_string(overall) << ": " << results.size() << " tasks in " << total_seconds << " s";
    if (total_rlimit)
        out << ", rlimit " << *total_rlimit;
    out << "\n";
    return out.str();
}

std::string VcReport::json() const
{
    nlohmann::ordered_json j;
    j["overall"] = to_string(overall);
    j["total_seconds"] = total_seconds;
    if (total_rlimit)
        j["total_rlimit"] = *total_rlimit;
    auto& arr = j["tasks"] = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < results.size(); ++i) {
        const auto& res = results[i];
        nlohmann::ordered_json t;
        t["id"] = res.task;
        if (i < tasks.size())
            t["kind"] = to_string(tasks[i].kind);
        t["verdict"] = to_string(res.verdict);
        t["seconds"] = res.seconds;
        if (res.rlimit)
            t["rlimit"] = *res.rlimit;
        if (!res.model_summary.empty())
            t["counter_model"] = res.model_summary;
        if (!res.detail.empty())
            t["detail"] = res.detail;
        arr.push_back(std::move(t));
    }
    return j.dump(2);
}

} // namespace sra
