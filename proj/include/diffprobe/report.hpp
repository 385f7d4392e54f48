#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "diffprobe/harness.hpp"
#include "diffprobe/stats.hpp"

namespace diffprobe::report {

using nlohmann::json;

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SchemaError : std::runtime_error {
    int row;  // 1-based line number in the file, header = 1
    SchemaError(const std::string& what, int row_)
        : std::runtime_error(what + " (row " + std::to_string(row_) + ")"), row(row_) {}
};
struct RangeError : std::runtime_error {
    int row;
    RangeError(const std::string& what, int row_)
        : std::runtime_error(what + " (row " + std::to_string(row_) + ")"), row(row_) {}
};

// ---- human statistics ingest ---------------------------------------------------

struct HumanStatRecord {
    std::string challenge_id;
    std::string date;    // ISO date when present, else empty
    std::string answer;  // original answer text when present, else empty
    double avg_metric = 0.0;
    double win_rate = 0.0;
    long sample_size = 0;
};

/// Column mapping for the human-stats CSV. Defaults match the documented
/// export layout; any name can be remapped for other datasets. When the id
/// column is absent the id is derived from the answer column, uppercased.
struct CsvSchema {
    std::string challenge_id = "challenge_id";
    std::string date = "date";
    std::string answer = "answer";
    std::string avg_metric = "avg_guesses";
    std::string win_rate = "win_rate";
    std::string sample_size = "sample_size";
};

namespace detail_report {

/// Splits one CSV line honoring double-quote quoting and doubled quotes.
inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

inline std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        out += c;
    }
    out += '"';
    return out;
}

inline std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

inline std::string upper(std::string s) {
    for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
}

/// Full-precision rendering that survives a parse round trip.
inline std::string fmt_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace detail_report

inline std::vector<HumanStatRecord> load_human_csv(const std::string& path,
                                                   const CsvSchema& schema = {}) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open human stats CSV: " + path);

    std::string line;
    int row = 0;
    // Header: locate each mapped column by name.
    std::map<std::string, int> col;
    while (std::getline(in, line)) {
        ++row;
        if (detail_report::trim(line).empty() || line[0] == '#') continue;
        auto header = detail_report::split_csv_line(line);
        for (size_t i = 0; i < header.size(); ++i)
            col[detail_report::trim(header[i])] = static_cast<int>(i);
        break;
    }
    if (col.empty()) throw SchemaError("missing CSV header", row == 0 ? 1 : row);

    auto find = [&](const std::string& name) -> int {
        auto it = col.find(name);
        return it == col.end() ? -1 : it->second;
    };
    int c_id = find(schema.challenge_id);
    int c_date = find(schema.date);
    int c_answer = find(schema.answer);
    int c_metric = find(schema.avg_metric);
    int c_rate = find(schema.win_rate);
    int c_size = find(schema.sample_size);
    if (c_metric < 0) throw SchemaError("missing column '" + schema.avg_metric + "'", row);
    if (c_rate < 0) throw SchemaError("missing column '" + schema.win_rate + "'", row);
    if (c_size < 0) throw SchemaError("missing column '" + schema.sample_size + "'", row);
    if (c_id < 0 && c_answer < 0)
        throw SchemaError("need column '" + schema.challenge_id + "' or '" + schema.answer + "'",
                          row);

    auto parse_double = [&](const std::string& text, const std::string& what,
                            int at_row) -> double {
        try {
            size_t used = 0;
            double v = std::stod(text, &used);
            if (used != text.size()) throw std::invalid_argument("trailing text");
            return v;
        } catch (const std::exception&) {
            throw SchemaError("unparseable " + what + " '" + text + "'", at_row);
        }
    };

    std::vector<HumanStatRecord> records;
    std::set<std::string> seen;
    while (std::getline(in, line)) {
        ++row;
        if (detail_report::trim(line).empty() || line[0] == '#') continue;
        auto f = detail_report::split_csv_line(line);
        auto field = [&](int idx) -> std::string {
            return idx >= 0 && idx < static_cast<int>(f.size()) ? detail_report::trim(f[idx])
                                                                : std::string();
        };
        HumanStatRecord rec;
        rec.date = field(c_date);
        rec.answer = field(c_answer);
        rec.challenge_id = field(c_id);
        if (rec.challenge_id.empty()) {
            if (rec.answer.empty()) throw SchemaError("empty challenge id", row);
            rec.challenge_id = detail_report::upper(rec.answer);
        }
        rec.avg_metric = parse_double(field(c_metric), "metric", row);
        rec.win_rate = parse_double(field(c_rate), "win rate", row);
        if (rec.win_rate < 0.0 || rec.win_rate > 1.0)
            throw RangeError("win rate " + field(c_rate) + " outside [0,1]", row);
        try {
            rec.sample_size = std::stol(field(c_size));
        } catch (const std::exception&) {
            throw SchemaError("unparseable sample size '" + field(c_size) + "'", row);
        }
        if (rec.sample_size <= 0)
            throw RangeError("sample size must be positive, got " + field(c_size), row);
        if (!seen.insert(rec.challenge_id).second)
            throw SchemaError("duplicate challenge id '" + rec.challenge_id + "'", row);
        records.push_back(std::move(rec));
    }
    return records;
}

// ---- ranking -----------------------------------------------------------------------

struct MissingMetric : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class RankDirection {
    Ascending,   // lower metric value = rank 1 (e.g. avg guesses: fewer = easier)
    Descending,  // higher metric value = rank 1 (e.g. HP remaining: more = easier)
};

struct RankedChallenge {
    std::string challenge_id;
    double value = 0.0;
    int rank = 0;  // dense: ties share a rank, next distinct value increments by 1
};

inline std::optional<double> aggregate_metric(const harness::ChallengeAggregate& a,
                                              const std::string& metric) {
    if (metric == "avg_guesses") return a.avg_guesses;
    if (metric == "avg_hp_remaining") return a.avg_hp_remaining;
    if (metric == "avg_turns") return a.avg_turns;
    if (metric == "win_rate") return a.win_rate;
    return std::nullopt;
}

inline std::vector<RankedChallenge> rank_challenges(
    const std::vector<harness::ChallengeAggregate>& aggregates, const std::string& metric,
    RankDirection direction) {
    std::vector<RankedChallenge> out;
    for (const auto& a : aggregates) {
        auto v = aggregate_metric(a, metric);
        if (!v)
            throw MissingMetric("challenge '" + a.challenge_id + "' has no metric '" + metric +
                                "'");
        out.push_back({a.challenge_id, *v, 0});
    }
    std::sort(out.begin(), out.end(), [&](const RankedChallenge& a, const RankedChallenge& b) {
        if (a.value != b.value)
            return direction == RankDirection::Ascending ? a.value < b.value : a.value > b.value;
        return a.challenge_id < b.challenge_id;
    });
    int rank = 0;
    std::optional<double> prev;
    for (auto& r : out) {
        if (!prev || *prev != r.value) ++rank;
        r.rank = rank;
        prev = r.value;
    }
    // Deterministic presentation order: rank, then id.
    std::sort(out.begin(), out.end(), [](const RankedChallenge& a, const RankedChallenge& b) {
        return std::tie(a.rank, a.challenge_id) < std::tie(b.rank, b.challenge_id);
    });
    return out;
}

// ---- report rendering ----------------------------------------------------------------

/// Human-facing p rendering: tiny values collapse to "<.001"; the exact value
/// always travels in the machine-readable outputs.
inline std::string format_p(double p) {
    if (p < 0.001) return "<.001";
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%.3f", p);
    return buf;
}

struct ReportOptions {
    std::string out_dir = ".";
    bool write_markdown = true;
    bool write_svg = true;
    std::string manifest_hash;  // ties every number back to the run config
    RankDirection rank_direction = RankDirection::Ascending;  // applied to the human metric
    std::string human_metric_label = "avg_guesses";
};

namespace detail_report {

inline void atomic_write(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp);
        out << content;
        if (!out.flush()) throw IoError("short write to " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot rename " + tmp + " to " + path + ": " + ec.message());
}

struct ScatterPoint {
    double x, y;
};

/// Minimal self-contained SVG scatter plot with a least-squares line.
inline std::string render_scatter_svg(const std::vector<ScatterPoint>& pts,
                                      const std::string& x_label, const std::string& y_label,
                                      const std::string& title) {
    const double W = 640, H = 480, ML = 70, MR = 20, MT = 40, MB = 55;
    double xmin = pts[0].x, xmax = pts[0].x, ymin = pts[0].y, ymax = pts[0].y;
    for (const auto& p : pts) {
        xmin = std::min(xmin, p.x);
        xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y);
        ymax = std::max(ymax, p.y);
    }
    auto pad = [](double& lo, double& hi) {
        double span = hi - lo;
        if (span <= 0) span = std::max(1.0, std::abs(hi));
        lo -= 0.05 * span;
        hi += 0.05 * span;
    };
    pad(xmin, xmax);
    pad(ymin, ymax);
    auto px = [&](double x) { return ML + (x - xmin) / (xmax - xmin) * (W - ML - MR); };
    auto py = [&](double y) { return H - MB - (y - ymin) / (ymax - ymin) * (H - MT - MB); };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" viewBox=\"0 0 " << W << " " << H << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\""
        << " font-size=\"16\">" << title << "</text>\n";
    // Axes.
    svg << "<line x1=\"" << ML << "\" y1=\"" << H - MB << "\" x2=\"" << W - MR << "\" y2=\""
        << H - MB << "\" stroke=\"black\"/>\n"
        << "<line x1=\"" << ML << "\" y1=\"" << MT << "\" x2=\"" << ML << "\" y2=\"" << H - MB
        << "\" stroke=\"black\"/>\n";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3g", xmin);
    svg << "<text x=\"" << px(xmin) << "\" y=\"" << H - MB + 18
        << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">" << buf
        << "</text>\n";
    std::snprintf(buf, sizeof(buf), "%.3g", xmax);
    svg << "<text x=\"" << px(xmax) << "\" y=\"" << H - MB + 18
        << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">" << buf
        << "</text>\n";
    std::snprintf(buf, sizeof(buf), "%.3g", ymin);
    svg << "<text x=\"" << ML - 8 << "\" y=\"" << py(ymin) + 4
        << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">" << buf
        << "</text>\n";
    std::snprintf(buf, sizeof(buf), "%.3g", ymax);
    svg << "<text x=\"" << ML - 8 << "\" y=\"" << py(ymax) + 4
        << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">" << buf
        << "</text>\n";
    svg << "<text x=\"" << (ML + W - MR) / 2 << "\" y=\"" << H - 14
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << x_label
        << "</text>\n"
        << "<text x=\"18\" y=\"" << (MT + H - MB) / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\""
        << " transform=\"rotate(-90 18 " << (MT + H - MB) / 2 << ")\">" << y_label
        << "</text>\n";
    // Least-squares line (skip when x is degenerate).
    double n = static_cast<double>(pts.size());
    double sx = 0, sy = 0;
    for (const auto& p : pts) {
        sx += p.x;
        sy += p.y;
    }
    double mx = sx / n, my = sy / n, sxx = 0, sxy = 0;
    for (const auto& p : pts) {
        sxx += (p.x - mx) * (p.x - mx);
        sxy += (p.x - mx) * (p.y - my);
    }
    if (sxx > 0) {
        double slope = sxy / sxx, icept = my - slope * mx;
        double x0 = xmin, x1 = xmax;
        double y0 = icept + slope * x0, y1 = icept + slope * x1;
        auto clampy = [&](double& xa, double& ya, double xb, double yb) {
            // Clip the line to the plot's y range so it never escapes the frame.
            if (ya < ymin || ya > ymax) {
                double target = ya < ymin ? ymin : ymax;
                if (yb != ya) {
                    double t = (target - ya) / (yb - ya);
                    xa = xa + t * (xb - xa);
                    ya = target;
                }
            }
        };
        clampy(x0, y0, x1, y1);
        clampy(x1, y1, x0, y0);
        svg << "<line x1=\"" << px(x0) << "\" y1=\"" << py(y0) << "\" x2=\"" << px(x1)
            << "\" y2=\"" << py(y1) << "\" stroke=\"#c0392b\" stroke-width=\"1.5\"/>\n";
    }
    for (const auto& p : pts)
        svg << "<circle cx=\"" << px(p.x) << "\" cy=\"" << py(p.y)
            << "\" r=\"3.5\" fill=\"#2c6fb5\" fill-opacity=\"0.75\"/>\n";
    svg << "</svg>\n";
    return svg.str();
}

inline std::string primary_metric_name(const harness::ChallengeAggregate& a) {
    if (a.avg_guesses) return "avg_guesses";
    if (a.avg_hp_remaining) return "avg_hp_remaining";
    return "win_rate";
}

inline double primary_metric_value(const harness::ChallengeAggregate& a) {
    if (a.avg_guesses) return *a.avg_guesses;
    if (a.avg_hp_remaining) return *a.avg_hp_remaining;
    return a.win_rate;
}

}  // namespace detail_report

struct ReportFiles {
    std::string csv_path;
    std::string json_path;
    std::string md_path;                 // empty when markdown disabled
    std::vector<std::string> svg_paths;  // one per agent when enabled
};

/// Joins agent aggregates with human records and writes report.csv +
/// report.json (always), report.md and scatter_<agent>.svg (optional).
/// All writes are atomic; an empty join produces an error and no files.
inline ReportFiles render_report(const std::vector<harness::ChallengeAggregate>& aggregates,
                                 const std::vector<HumanStatRecord>& human,
                                 const std::vector<stats::JoinedCorrelation>& correlations,
                                 const ReportOptions& opts = {}) {
    // agent id -> challenge id -> aggregate
    std::map<std::string, std::map<std::string, const harness::ChallengeAggregate*>> by_agent;
    for (const auto& a : aggregates) by_agent[a.agent_id][a.challenge_id] = &a;
    std::map<std::string, const HumanStatRecord*> by_id;
    for (const auto& h : human) by_id[h.challenge_id] = &h;

    // The report covers challenges present on both sides for at least one agent.
    std::set<std::string> joined_ids;
    for (const auto& [agent_id, rows] : by_agent)
        for (const auto& [cid, agg] : rows)
            if (by_id.count(cid)) joined_ids.insert(cid);
    if (joined_ids.empty())
        throw IoError("report join is empty: no challenge id appears in both agent aggregates "
                      "and human stats");

    std::filesystem::create_directories(opts.out_dir);

    // Difficulty rank from the human metric over joined challenges.
    std::map<std::string, int> rank_of;
    {
        std::vector<std::pair<std::string, double>> vals;
        for (const auto& id : joined_ids) vals.push_back({id, by_id.at(id)->avg_metric});
        std::sort(vals.begin(), vals.end(), [&](const auto& a, const auto& b) {
            if (a.second != b.second)
                return opts.rank_direction == RankDirection::Ascending ? a.second < b.second
                                                                       : a.second > b.second;
            return a.first < b.first;
        });
        int rank = 0;
        std::optional<double> prev;
        for (const auto& [id, v] : vals) {
            if (!prev || *prev != v) ++rank;
            rank_of[id] = rank;
            prev = v;
        }
    }

    std::vector<std::string> agent_ids;
    for (const auto& [agent_id, rows] : by_agent) agent_ids.push_back(agent_id);

    // ---- report.csv -------------------------------------------------------
    std::ostringstream csv;
    csv << "challenge_id,date,answer,human_" << opts.human_metric_label
        << ",human_win_rate,sample_size,rank";
    for (const auto& aid : agent_ids) {
        std::string base = detail_report::csv_quote(aid);
        csv << "," << base << "_metric," << base << "_win_rate," << base << "_n," << base
            << "_protocol_failures";
    }
    csv << "\n";
    for (const auto& cid : joined_ids) {
        const auto* h = by_id.at(cid);
        csv << detail_report::csv_quote(cid) << "," << detail_report::csv_quote(h->date) << ","
            << detail_report::csv_quote(h->answer) << ","
            << detail_report::fmt_full(h->avg_metric) << ","
            << detail_report::fmt_full(h->win_rate) << "," << h->sample_size << ","
            << rank_of.at(cid);
        for (const auto& aid : agent_ids) {
            auto it = by_agent.at(aid).find(cid);
            if (it == by_agent.at(aid).end()) {
                csv << ",,,,";
                continue;
            }
            const auto* a = it->second;
            csv << "," << detail_report::fmt_full(detail_report::primary_metric_value(*a)) << ","
                << detail_report::fmt_full(a->win_rate) << "," << a->n_trials << ","
                << a->protocol_failure_count;
        }
        csv << "\n";
    }

    // ---- report.json ------------------------------------------------------
    json j;
    j["manifest_hash"] = opts.manifest_hash;
    j["human_metric"] = opts.human_metric_label;
    j["rows"] = json::array();
    for (const auto& cid : joined_ids) {
        const auto* h = by_id.at(cid);
        json row = {{"challenge_id", cid},
                    {"rank", rank_of.at(cid)},
                    {"human",
                     {{"avg_metric", h->avg_metric},
                      {"win_rate", h->win_rate},
                      {"sample_size", h->sample_size}}}};
        if (!h->date.empty()) row["date"] = h->date;
        if (!h->answer.empty()) row["answer"] = h->answer;
        row["agents"] = json::object();
        for (const auto& aid : agent_ids) {
            auto it = by_agent.at(aid).find(cid);
            if (it == by_agent.at(aid).end()) continue;
            const auto* a = it->second;
            json cell = {{"win_rate", a->win_rate},
                         {"n_trials", a->n_trials},
                         {"protocol_failures", a->protocol_failure_count}};
            if (a->avg_guesses) cell["avg_guesses"] = *a->avg_guesses;
            if (a->avg_hp_remaining) cell["avg_hp_remaining"] = *a->avg_hp_remaining;
            if (a->avg_turns) cell["avg_turns"] = *a->avg_turns;
            row["agents"][aid] = cell;
        }
        j["rows"].push_back(row);
    }
    j["correlations"] = json::array();
    for (const auto& c : correlations) {
        j["correlations"].push_back({{"agent", c.agent_label},
                                     {"human", c.human_label},
                                     {"r", c.result.r},
                                     {"p", c.result.p},
                                     {"p_display", format_p(c.result.p)},
                                     {"n", c.result.n},
                                     {"strength", stats::bucket_name(c.result.strength)},
                                     {"unmatched_agent_ids", c.unmatched_agent_ids},
                                     {"unmatched_human_ids", c.unmatched_human_ids}});
    }

    ReportFiles files;
    files.csv_path = opts.out_dir + "/report.csv";
    files.json_path = opts.out_dir + "/report.json";
    detail_report::atomic_write(files.csv_path, csv.str());
    detail_report::atomic_write(files.json_path, j.dump(2) + "\n");

    // ---- report.md --------------------------------------------------------
    if (opts.write_markdown) {
        std::ostringstream md;
        md << "# Difficulty report\n\n";
        if (!opts.manifest_hash.empty()) md << "Run manifest hash: `" << opts.manifest_hash
                                            << "`\n\n";
        md << "## Agent vs. human correlation\n\n"
           << "| agent | metric | n | r | p | strength |\n"
           << "|---|---|---:|---:|---:|---|\n";
        for (const auto& c : correlations) {
            char rbuf[16];
            std::snprintf(rbuf, sizeof(rbuf), "%.3f", c.result.r);
            md << "| " << c.agent_label << " | " << c.human_label << " | " << c.result.n << " | "
               << rbuf << " | " << format_p(c.result.p) << " | "
               << stats::bucket_name(c.result.strength) << " |\n";
        }
        md << "\n## Per-challenge difficulty\n\n| challenge | rank | human";
        for (const auto& aid : agent_ids) md << " | " << aid;
        md << " |\n|---|---:|---:";
        for (size_t i = 0; i < agent_ids.size(); ++i) md << "|---:";
        md << "|\n";
        for (const auto& cid : joined_ids) {
            char hbuf[32];
            std::snprintf(hbuf, sizeof(hbuf), "%.3f", by_id.at(cid)->avg_metric);
            md << "| " << cid << " | " << rank_of.at(cid) << " | " << hbuf;
            for (const auto& aid : agent_ids) {
                auto it = by_agent.at(aid).find(cid);
                if (it == by_agent.at(aid).end()) {
                    md << " | ";
                    continue;
                }
                char abuf[32];
                std::snprintf(abuf, sizeof(abuf), "%.3f",
                              detail_report::primary_metric_value(*it->second));
                md << " | " << abuf;
            }
            md << " |\n";
        }
        files.md_path = opts.out_dir + "/report.md";
        detail_report::atomic_write(files.md_path, md.str());
    }

    // ---- scatter_<agent>.svg ----------------------------------------------
    if (opts.write_svg) {
        for (const auto& aid : agent_ids) {
            std::vector<detail_report::ScatterPoint> pts;
            std::string metric_name;
            for (const auto& cid : joined_ids) {
                auto it = by_agent.at(aid).find(cid);
                if (it == by_agent.at(aid).end()) continue;
                metric_name = detail_report::primary_metric_name(*it->second);
                pts.push_back({by_id.at(cid)->avg_metric,
                               detail_report::primary_metric_value(*it->second)});
            }
            if (pts.empty()) continue;
            std::string fname =
                "scatter_" + harness::detail_harness::sanitize_for_filename(aid) + ".svg";
            std::string path = opts.out_dir + "/" + fname;
            detail_report::atomic_write(
                path, detail_report::render_scatter_svg(
                          pts, "human " + opts.human_metric_label, aid + " " + metric_name,
                          aid + " vs. human difficulty"));
            files.svg_paths.push_back(path);
        }
    }
    return files;
}

}  // namespace diffprobe::report
