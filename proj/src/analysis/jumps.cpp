#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "ringcav/analysis.hpp"

namespace ringcav::analysis {

double pearson_correlation(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size() || a.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    const double n = double(a.size());
    const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
    const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    if (saa == 0 || sbb == 0) return std::numeric_limits<double>::quiet_NaN();
    return sab / std::sqrt(saa * sbb);
}

double JumpStats::mean_dwell(int level) const {
    if (level < 0 || level >= int(dwell_times.size()) || dwell_times[std::size_t(level)].empty())
        return std::numeric_limits<double>::quiet_NaN();
    const auto& d = dwell_times[std::size_t(level)];
    return std::accumulate(d.begin(), d.end(), 0.0) / double(d.size());
}

JumpStats jump_statistics(const std::vector<double>& times, const std::vector<double>& n_at,
                          const std::vector<double>& n_sine, const JumpOptions& opt) {
    if (times.size() != n_at.size() || times.size() != n_sine.size())
        throw std::invalid_argument("jump_statistics: series lengths differ");
    if (opt.min_dwell_samples < 1) throw std::invalid_argument("jump_statistics: min_dwell_samples must be >= 1");
    JumpStats s;
    s.correlation = pearson_correlation(n_at, n_sine);
    const std::size_t n = times.size();
    if (n == 0) {
        s.dwell_times.resize(2);
        s.transition_counts.assign(2, std::vector<int>(2, 0));
        return s;
    }

    std::vector<int> raw(n);
    int top = 1;
    for (std::size_t i = 0; i < n; ++i) {
        const double v = n_at[i];
        raw[i] = std::isfinite(v) ? std::max(0, int(std::floor(v - opt.threshold)) + 1) : 0;
        top = std::max(top, raw[i]);
    }
    s.dwell_times.resize(std::size_t(top) + 1);
    s.transition_counts.assign(std::size_t(top) + 1, std::vector<int>(std::size_t(top) + 1, 0));

    // debounce: a new level is accepted once it persists for min_dwell_samples samples
    s.levels.resize(n);
    int current = raw[0];
    for (std::size_t i = 0; i < n;) {
        if (raw[i] == current) {
            s.levels[i] = current;
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < n && raw[j] == raw[i]) ++j;
        if (int(j - i) >= opt.min_dwell_samples) {
            const double t = i > 0 ? 0.5 * (times[i - 1] + times[i]) : times[i];
            s.transitions.push_back({t, current, raw[i]});
            ++s.transition_counts[std::size_t(current)][std::size_t(raw[i])];
            current = raw[i];
        }
        for (std::size_t k = i; k < j; ++k) s.levels[k] = current;
        i = j;
    }

    // dwell times from segments bounded by two transitions
    for (std::size_t k = 1; k < s.transitions.size(); ++k) {
        const auto& enter = s.transitions[k - 1];
        const auto& leave = s.transitions[k];
        s.dwell_times[std::size_t(enter.to)].push_back(leave.time - enter.time);
    }
    s.low_confidence = int(s.transitions.size()) < opt.min_transitions;
    return s;
}

JumpStats jump_statistics(const quantum::TrajectoryRecord& rec, const JumpOptions& opt) {
    return jump_statistics(rec.times, rec.column("n_at"), rec.column("n_sine"), opt);
}

}  // namespace ringcav::analysis
