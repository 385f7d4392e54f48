#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace diffprobe::stats {

struct DegenerateInput : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct JoinTooSmall : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Sample Pearson correlation coefficient, centered two-pass computation.
inline double pearson_r(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DegenerateInput("pearson_r: length mismatch");
    const size_t n = x.size();
    if (n < 3) throw DegenerateInput("pearson_r: need at least 3 samples");
    double mx = 0.0, my = 0.0;
    for (size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) throw DegenerateInput("pearson_r: zero variance");
    double r = sxy / std::sqrt(sxx * syy);
    return std::clamp(r, -1.0, 1.0);
}

namespace detail_beta {

// Continued fraction for the incomplete beta function, modified Lentz method.
inline double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 1e-15;
    constexpr double kFpMin = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) return h;
    }
    throw std::runtime_error("betacf: continued fraction did not converge");
}

}  // namespace detail_beta

/// Regularized incomplete beta function I_x(a, b).
inline double incomplete_beta(double a, double b, double x) {
    if (a <= 0.0 || b <= 0.0) throw DegenerateInput("incomplete_beta: a, b must be positive");
    if (x < 0.0 || x > 1.0) throw DegenerateInput("incomplete_beta: x outside [0, 1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double ln_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                         a * std::log(x) + b * std::log1p(-x);
    const double bt = std::exp(ln_bt);
    if (x < (a + 1.0) / (a + b + 2.0)) return bt * detail_beta::betacf(a, b, x) / a;
    return 1.0 - bt * detail_beta::betacf(b, a, 1.0 - x) / b;
}

/// Two-tailed p-value for a Pearson coefficient under the null r = 0:
/// t = r sqrt((n-2)/(1-r^2)) against Student's t with n-2 degrees of freedom,
/// evaluated as P(|T| > t) = I_{df/(df+t^2)}(df/2, 1/2).
inline double p_value(double r, long n) {
    if (n < 3) throw DegenerateInput("p_value: need n >= 3");
    if (std::fabs(r) > 1.0) throw DegenerateInput("p_value: |r| > 1");
    if (std::fabs(r) == 1.0) return 0.0;
    if (r == 0.0) return 1.0;
    const double df = static_cast<double>(n - 2);
    const double t2 = r * r * df / (1.0 - r * r);
    return incomplete_beta(df / 2.0, 0.5, df / (df + t2));
}

enum class Bucket { VeryWeak, Weak, Moderate, Strong };

inline const char* bucket_name(Bucket b) {
    switch (b) {
        case Bucket::VeryWeak: return "very_weak";
        case Bucket::Weak: return "weak";
        case Bucket::Moderate: return "moderate";
        default: return "strong";
    }
}

/// Correlation strength by |r|. Intervals are closed on the left:
/// [0, 0.2) very weak, [0.2, 0.4) weak, [0.4, 0.6) moderate, [0.6, 1] strong.
inline Bucket bucket(double r) {
    const double a = std::fabs(r);
    if (a > 1.0) throw DegenerateInput("bucket: |r| > 1");
    if (a < 0.2) return Bucket::VeryWeak;
    if (a < 0.4) return Bucket::Weak;
    if (a < 0.6) return Bucket::Moderate;
    return Bucket::Strong;
}

struct CorrelationResult {
    double r = 0.0;
    double p = 1.0;
    long n = 0;
    Bucket strength = Bucket::VeryWeak;
};

inline CorrelationResult correlate(std::span<const double> x, std::span<const double> y) {
    CorrelationResult res;
    res.r = pearson_r(x, y);
    res.n = static_cast<long>(x.size());
    res.p = p_value(res.r, res.n);
    res.strength = bucket(res.r);
    return res;
}

/// One named metric series keyed by challenge id (an agent's aggregates or a
/// human stat column), ready to be joined against another.
struct MetricSeries {
    std::string label;                     // e.g. "gpt4-cot/avg_guesses"
    std::map<std::string, double> values;  // challenge id -> metric value
};

struct JoinedCorrelation {
    std::string agent_label;
    std::string human_label;
    CorrelationResult result;
    std::vector<std::string> unmatched_agent_ids;
    std::vector<std::string> unmatched_human_ids;
};

/// Joins an agent series with a human series on challenge id and correlates
/// the matched pairs. Ids missing on either side are reported, not dropped
/// silently.
inline JoinedCorrelation correlate_series(const MetricSeries& agent, const MetricSeries& human) {
    JoinedCorrelation out;
    out.agent_label = agent.label;
    out.human_label = human.label;
    std::vector<double> x, y;
    for (const auto& [id, v] : agent.values) {
        auto it = human.values.find(id);
        if (it == human.values.end()) {
            out.unmatched_agent_ids.push_back(id);
            continue;
        }
        x.push_back(v);
        y.push_back(it->second);
    }
    for (const auto& [id, v] : human.values)
        if (!agent.values.count(id)) out.unmatched_human_ids.push_back(id);
    if (x.size() < 3)
        throw JoinTooSmall("join of '" + agent.label + "' with '" + human.label + "' has " +
                           std::to_string(x.size()) + " matched pairs; need at least 3");
    out.result = correlate(x, y);
    return out;
}

}  // namespace diffprobe::stats
