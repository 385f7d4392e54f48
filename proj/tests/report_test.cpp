#include "diffprobe/report.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

using namespace diffprobe;
using namespace diffprobe::report;

namespace {

namespace fs = std::filesystem;

struct TempDir {
    fs::path path;
    TempDir() {
        static int counter = 0;
        path = fs::temp_directory_path() /
               ("diffprobe_report_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    std::string str() const { return path.string(); }
    std::string file(const std::string& name, const std::string& content) const {
        std::string p = (path / name).string();
        std::ofstream out(p, std::ios::binary);
        out << content;
        return p;
    }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    EXPECT_TRUE(in.good()) << path;
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

harness::ChallengeAggregate wordle_agg(const std::string& agent, const std::string& challenge,
                                       double avg_guesses, double win_rate = 1.0,
                                       int n = 10) {
    harness::ChallengeAggregate a;
    a.agent_id = agent;
    a.challenge_id = challenge;
    a.n_trials = n;
    a.wins = static_cast<int>(win_rate * n);
    a.win_rate = win_rate;
    a.avg_guesses = avg_guesses;
    return a;
}

HumanStatRecord human_rec(const std::string& id, double metric, double win_rate = 0.9,
                          long n = 1000) {
    HumanStatRecord h;
    h.challenge_id = id;
    h.avg_metric = metric;
    h.win_rate = win_rate;
    h.sample_size = n;
    return h;
}

}  // namespace

TEST(CsvSplit, HonorsQuotesAndEscapes) {
    using detail_report::split_csv_line;
    EXPECT_EQ(split_csv_line("a,b,c"), (std::vector<std::string>{"a", "b", "c"}));
    EXPECT_EQ(split_csv_line("\"a,b\",c"), (std::vector<std::string>{"a,b", "c"}));
    EXPECT_EQ(split_csv_line("\"he said \"\"hi\"\"\",x"),
              (std::vector<std::string>{"he said \"hi\"", "x"}));
    EXPECT_EQ(split_csv_line("a,,c"), (std::vector<std::string>{"a", "", "c"}));
    EXPECT_EQ(split_csv_line("a,b\r"), (std::vector<std::string>{"a", "b"}));
    EXPECT_EQ(split_csv_line(""), (std::vector<std::string>{""}));
}

TEST(CsvSplit, QuoteIsTheInverseOfSplit) {
    using detail_report::csv_quote;
    using detail_report::split_csv_line;
    EXPECT_EQ(csv_quote("plain"), "plain");
    for (const std::string s : {"with,comma", "with \"quote\"", "multi\nline", "both,\"x\""}) {
        auto fields = split_csv_line(csv_quote(s) + ",tail");
        ASSERT_EQ(fields.size(), (s.find('\n') == std::string::npos) ? 2u : 2u);
        EXPECT_EQ(fields[0], s);
        EXPECT_EQ(fields.back(), "tail");
    }
}

TEST(CsvSplit, FullPrecisionFormattingRoundTrips) {
    using detail_report::fmt_full;
    for (double v : {1.0 / 3.0, 0.1, 3.4473798181031615, 1e300, 5e-324, -2.5, 0.0}) {
        double back = std::strtod(fmt_full(v).c_str(), nullptr);
        EXPECT_EQ(back, v) << fmt_full(v);
    }
}

TEST(LoadHumanCsv, LoadsTheDocumentedLayout) {
    TempDir dir;
    std::string path = dir.file("human.csv",
                                "# synthetic sample, not real telemetry\n"
                                "challenge_id,date,answer,avg_guesses,win_rate,sample_size\n"
                                "SIEGE,2022-07-01,siege,4.32,0.97,51234\n"
                                "\n"
                                "# mid-file comment\n"
                                "KAZOO,2022-07-02,kazoo,5.01,0.89,49881\n");
    auto recs = load_human_csv(path);
    ASSERT_EQ(recs.size(), 2u);
    EXPECT_EQ(recs[0].challenge_id, "SIEGE");
    EXPECT_EQ(recs[0].date, "2022-07-01");
    EXPECT_EQ(recs[0].answer, "siege");
    EXPECT_DOUBLE_EQ(recs[0].avg_metric, 4.32);
    EXPECT_DOUBLE_EQ(recs[0].win_rate, 0.97);
    EXPECT_EQ(recs[0].sample_size, 51234);
    EXPECT_EQ(recs[1].challenge_id, "KAZOO");
}

TEST(LoadHumanCsv, DerivesUppercaseIdFromAnswer) {
    TempDir dir;
    std::string path = dir.file("h.csv",
                                "date,answer,avg_guesses,win_rate,sample_size\n"
                                "2022-07-01,siege,4.3,0.9,100\n");
    auto recs = load_human_csv(path);
    ASSERT_EQ(recs.size(), 1u);
    EXPECT_EQ(recs[0].challenge_id, "SIEGE");
    EXPECT_EQ(recs[0].answer, "siege");
}

TEST(LoadHumanCsv, QuotedFieldsSurvive) {
    TempDir dir;
    std::string path = dir.file("h.csv",
                                "challenge_id,date,answer,avg_guesses,win_rate,sample_size\n"
                                "\"ID,1\",\"2022-07-01\",\"a \"\"b\"\"\",4.0,0.5,10\n");
    auto recs = load_human_csv(path);
    ASSERT_EQ(recs.size(), 1u);
    EXPECT_EQ(recs[0].challenge_id, "ID,1");
    EXPECT_EQ(recs[0].answer, "a \"b\"");
}

TEST(LoadHumanCsv, SchemaErrorsNameTheOneBasedRow) {
    TempDir dir;
    // Header is row 1; the bad value sits on row 3.
    std::string path = dir.file("h.csv",
                                "challenge_id,avg_guesses,win_rate,sample_size\n"
                                "A,4.0,0.5,10\n"
                                "B,not-a-number,0.5,10\n");
    try {
        load_human_csv(path);
        FAIL() << "expected SchemaError";
    } catch (const SchemaError& e) {
        EXPECT_EQ(e.row, 3);
        EXPECT_NE(std::string(e.what()).find("(row 3)"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("not-a-number"), std::string::npos);
    }

    std::string missing = dir.file("m.csv",
                                   "challenge_id,win_rate,sample_size\n"
                                   "A,0.5,10\n");
    try {
        load_human_csv(missing);
        FAIL() << "expected SchemaError";
    } catch (const SchemaError& e) {
        EXPECT_EQ(e.row, 1);
        EXPECT_NE(std::string(e.what()).find("avg_guesses"), std::string::npos);
    }

    EXPECT_THROW(load_human_csv(dir.file("empty.csv", "")), SchemaError);
    EXPECT_THROW(load_human_csv(dir.str() + "/nonexistent.csv"), IoError);
}

TEST(LoadHumanCsv, RangeErrorsForOutOfRangeValues) {
    TempDir dir;
    try {
        load_human_csv(dir.file("wr.csv",
                                "challenge_id,avg_guesses,win_rate,sample_size\n"
                                "A,4.0,1.2,10\n"));
        FAIL() << "expected RangeError";
    } catch (const RangeError& e) {
        EXPECT_EQ(e.row, 2);
        EXPECT_NE(std::string(e.what()).find("win rate"), std::string::npos);
    }
    EXPECT_THROW(load_human_csv(dir.file("n0.csv",
                                         "challenge_id,avg_guesses,win_rate,sample_size\n"
                                         "A,4.0,0.5,0\n")),
                 RangeError);
    EXPECT_THROW(load_human_csv(dir.file("nneg.csv",
                                         "challenge_id,avg_guesses,win_rate,sample_size\n"
                                         "A,4.0,0.5,-3\n")),
                 RangeError);
}

TEST(LoadHumanCsv, RejectsDuplicateChallengeIds) {
    TempDir dir;
    std::string path = dir.file("dup.csv",
                                "challenge_id,avg_guesses,win_rate,sample_size\n"
                                "A,4.0,0.5,10\n"
                                "A,4.1,0.6,12\n");
    try {
        load_human_csv(path);
        FAIL() << "expected SchemaError";
    } catch (const SchemaError& e) {
        EXPECT_EQ(e.row, 3);
        EXPECT_NE(std::string(e.what()).find("duplicate"), std::string::npos);
    }
}

TEST(LoadHumanCsv, CustomSchemaRemapsColumns) {
    TempDir dir;
    std::string path = dir.file("battle.csv",
                                "boss,avg_hp,clear_rate,players\n"
                                "Clay Golem,41.5,0.83,3200\n");
    CsvSchema schema;
    schema.challenge_id = "boss";
    schema.avg_metric = "avg_hp";
    schema.win_rate = "clear_rate";
    schema.sample_size = "players";
    auto recs = load_human_csv(path, schema);
    ASSERT_EQ(recs.size(), 1u);
    EXPECT_EQ(recs[0].challenge_id, "Clay Golem");
    EXPECT_DOUBLE_EQ(recs[0].avg_metric, 41.5);
    EXPECT_EQ(recs[0].sample_size, 3200);
}

TEST(LoadHumanCsv, HeaderOnlyMeansNoRecords) {
    TempDir dir;
    auto recs = load_human_csv(
        dir.file("h.csv", "challenge_id,avg_guesses,win_rate,sample_size\n"));
    EXPECT_TRUE(recs.empty());
}

TEST(Ranking, AscendingWithDenseRanks) {
    std::vector<harness::ChallengeAggregate> aggs = {
        wordle_agg("a", "X", 3.0),
        wordle_agg("a", "Y", 5.0),
        wordle_agg("a", "Z", 4.0),
    };
    auto ranked = rank_challenges(aggs, "avg_guesses", RankDirection::Ascending);
    ASSERT_EQ(ranked.size(), 3u);
    EXPECT_EQ(ranked[0].challenge_id, "X");
    EXPECT_EQ(ranked[0].rank, 1);
    EXPECT_EQ(ranked[1].challenge_id, "Z");
    EXPECT_EQ(ranked[1].rank, 2);
    EXPECT_EQ(ranked[2].challenge_id, "Y");
    EXPECT_EQ(ranked[2].rank, 3);
}

TEST(Ranking, TiesShareARankAndTheNextDistinctValueIncrementsByOne) {
    std::vector<harness::ChallengeAggregate> aggs = {
        wordle_agg("a", "B", 3.0),
        wordle_agg("a", "A", 3.0),
        wordle_agg("a", "C", 4.0),
    };
    auto ranked = rank_challenges(aggs, "avg_guesses", RankDirection::Ascending);
    ASSERT_EQ(ranked.size(), 3u);
    EXPECT_EQ(ranked[0].challenge_id, "A");  // alphabetical among ties
    EXPECT_EQ(ranked[0].rank, 1);
    EXPECT_EQ(ranked[1].challenge_id, "B");
    EXPECT_EQ(ranked[1].rank, 1);
    EXPECT_EQ(ranked[2].challenge_id, "C");
    EXPECT_EQ(ranked[2].rank, 2);
}

TEST(Ranking, DescendingPutsTheLargestFirst) {
    harness::ChallengeAggregate x;
    x.agent_id = "a";
    x.challenge_id = "X";
    x.avg_hp_remaining = 50.0;
    harness::ChallengeAggregate y = x;
    y.challenge_id = "Y";
    y.avg_hp_remaining = 10.0;
    auto ranked = rank_challenges({x, y}, "avg_hp_remaining", RankDirection::Descending);
    EXPECT_EQ(ranked[0].challenge_id, "X");
    EXPECT_EQ(ranked[0].rank, 1);
    EXPECT_EQ(ranked[1].challenge_id, "Y");
    EXPECT_EQ(ranked[1].rank, 2);
}

TEST(Ranking, MissingMetricIsAHardError) {
    std::vector<harness::ChallengeAggregate> aggs = {wordle_agg("a", "X", 3.0)};
    EXPECT_THROW(rank_challenges(aggs, "avg_hp_remaining", RankDirection::Ascending),
                 MissingMetric);
    EXPECT_THROW(rank_challenges(aggs, "no_such_metric", RankDirection::Ascending),
                 MissingMetric);
    EXPECT_NO_THROW(rank_challenges(aggs, "win_rate", RankDirection::Descending));
}

TEST(FormatP, CollapsesTinyValuesOnlyForDisplay) {
    EXPECT_EQ(format_p(0.0001), "<.001");
    EXPECT_EQ(format_p(0.00099), "<.001");
    EXPECT_EQ(format_p(0.001), "0.001");
    EXPECT_EQ(format_p(0.0234), "0.023");
    EXPECT_EQ(format_p(0.5), "0.500");
    EXPECT_EQ(format_p(1.0), "1.000");
}

TEST(RenderReport, WritesAllFourArtifactKinds) {
    TempDir dir;
    std::vector<harness::ChallengeAggregate> aggs = {
        wordle_agg("solver", "AAA", 3.1), wordle_agg("solver", "BBB", 3.9),
        wordle_agg("solver", "CCC", 3.4), wordle_agg("zs-model", "AAA", 5.2, 0.8),
        wordle_agg("zs-model", "BBB", 6.8, 0.6), wordle_agg("zs-model", "CCC", 5.9, 0.7),
    };
    std::vector<HumanStatRecord> human = {human_rec("AAA", 3.9), human_rec("BBB", 4.8),
                                          human_rec("CCC", 4.2),
                                          human_rec("DDD", 5.0)};  // human-only: dropped

    stats::MetricSeries agent_series{"solver/avg_guesses",
                                     {{"AAA", 3.1}, {"BBB", 3.9}, {"CCC", 3.4}}};
    stats::MetricSeries human_series{"human/avg_guesses",
                                     {{"AAA", 3.9}, {"BBB", 4.8}, {"CCC", 4.2}}};
    auto corr = stats::correlate_series(agent_series, human_series);

    ReportOptions opts;
    opts.out_dir = dir.str();
    opts.manifest_hash = "abc123";
    auto files = render_report(aggs, human, {corr}, opts);

    // CSV: header + one row per joined challenge, numbers at full precision.
    std::string csv = slurp(files.csv_path);
    auto header_end = csv.find('\n');
    std::string header = csv.substr(0, header_end);
    EXPECT_NE(header.find("challenge_id"), std::string::npos);
    EXPECT_NE(header.find("human_avg_guesses"), std::string::npos);
    EXPECT_NE(header.find("solver_metric"), std::string::npos);
    EXPECT_NE(header.find("zs-model_win_rate"), std::string::npos);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 3);
    EXPECT_EQ(csv.find("DDD"), std::string::npos);

    auto first_row = csv.substr(header_end + 1, csv.find('\n', header_end + 1) - header_end - 1);
    auto fields = detail_report::split_csv_line(first_row);
    EXPECT_EQ(fields[0], "AAA");
    EXPECT_EQ(std::strtod(fields[3].c_str(), nullptr), 3.9);  // round-trip exact

    // JSON: rows with ranks and per-agent cells, correlations with exact p.
    auto j = nlohmann::json::parse(slurp(files.json_path));
    EXPECT_EQ(j.at("manifest_hash"), "abc123");
    ASSERT_EQ(j.at("rows").size(), 3u);
    EXPECT_EQ(j["rows"][0].at("challenge_id"), "AAA");
    EXPECT_EQ(j["rows"][0].at("rank").get<int>(), 1);  // lowest human avg
    EXPECT_EQ(j["rows"][0]["agents"].at("solver").at("avg_guesses").get<double>(), 3.1);
    ASSERT_EQ(j.at("correlations").size(), 1u);
    const auto& c = j["correlations"][0];
    EXPECT_EQ(c.at("agent"), "solver/avg_guesses");
    EXPECT_EQ(c.at("n").get<long>(), 3);
    EXPECT_EQ(c.at("r").get<double>(), corr.result.r);
    EXPECT_EQ(c.at("p").get<double>(), corr.result.p);
    EXPECT_EQ(c.at("strength"), stats::bucket_name(corr.result.strength));

    // Markdown: both tables present.
    std::string md = slurp(files.md_path);
    EXPECT_NE(md.find("# Difficulty report"), std::string::npos);
    EXPECT_NE(md.find("| agent | metric | n | r | p | strength |"), std::string::npos);
    EXPECT_NE(md.find("## Per-challenge difficulty"), std::string::npos);
    EXPECT_NE(md.find("| AAA | 1 |"), std::string::npos);

    // SVG: one per agent, plausible plot content.
    ASSERT_EQ(files.svg_paths.size(), 2u);
    for (const auto& p : files.svg_paths) {
        std::string svg = slurp(p);
        EXPECT_EQ(svg.rfind("<svg", 0), 0u);
        EXPECT_NE(svg.find("<circle"), std::string::npos);
        EXPECT_NE(svg.find("</svg>"), std::string::npos);
    }

    // Atomic writes leave no temp droppings behind.
    for (const auto& entry : fs::directory_iterator(dir.path))
        EXPECT_NE(entry.path().extension(), ".tmp") << entry.path();
}

TEST(RenderReport, EmptyJoinWritesNothing) {
    TempDir dir;
    std::vector<harness::ChallengeAggregate> aggs = {wordle_agg("solver", "AAA", 3.1)};
    std::vector<HumanStatRecord> human = {human_rec("ZZZ", 4.0)};
    ReportOptions opts;
    opts.out_dir = dir.str();
    EXPECT_THROW(render_report(aggs, human, {}, opts), IoError);
    EXPECT_FALSE(fs::exists(dir.path / "report.csv"));
    EXPECT_FALSE(fs::exists(dir.path / "report.json"));
    EXPECT_FALSE(fs::exists(dir.path / "report.md"));
}

TEST(RenderReport, AgentsMissingAChallengeGetBlankCells) {
    TempDir dir;
    std::vector<harness::ChallengeAggregate> aggs = {
        wordle_agg("full", "AAA", 3.0), wordle_agg("full", "BBB", 4.0),
        wordle_agg("partial", "AAA", 5.0),  // nothing for BBB
    };
    std::vector<HumanStatRecord> human = {human_rec("AAA", 3.5), human_rec("BBB", 4.5)};
    ReportOptions opts;
    opts.out_dir = dir.str();
    auto files = render_report(aggs, human, {}, opts);

    std::string csv = slurp(files.csv_path);
    std::istringstream lines(csv);
    std::string header, row_a, row_b;
    std::getline(lines, header);
    std::getline(lines, row_a);
    std::getline(lines, row_b);
    auto fa = detail_report::split_csv_line(row_a);
    auto fb = detail_report::split_csv_line(row_b);
    ASSERT_EQ(fa.size(), fb.size());  // blank cells keep the column count aligned
    EXPECT_EQ(fb[0], "BBB");
    EXPECT_EQ(fb[fb.size() - 1], "");  // partial agent's trailing cells are empty
    EXPECT_EQ(fb[fb.size() - 4], "");

    auto j = nlohmann::json::parse(slurp(files.json_path));
    EXPECT_TRUE(j["rows"][0]["agents"].contains("partial"));
    EXPECT_FALSE(j["rows"][1]["agents"].contains("partial"));

    // Only the agent with data for at least one joined challenge gets a plot;
    // 'partial' still plots its single point.
    EXPECT_EQ(files.svg_paths.size(), 2u);
}

TEST(RenderReport, SvgFilenamesAreSanitized) {
    TempDir dir;
    std::vector<harness::ChallengeAggregate> aggs = {wordle_agg("zs:model/v1", "AAA", 3.0),
                                                     wordle_agg("zs:model/v1", "BBB", 4.0)};
    std::vector<HumanStatRecord> human = {human_rec("AAA", 3.5), human_rec("BBB", 4.5)};
    ReportOptions opts;
    opts.out_dir = dir.str();
    auto files = render_report(aggs, human, {}, opts);
    ASSERT_EQ(files.svg_paths.size(), 1u);
    EXPECT_NE(files.svg_paths[0].find("scatter_zs_model_v1.svg"), std::string::npos);
    EXPECT_TRUE(fs::exists(files.svg_paths[0]));
}

TEST(RenderReport, MarkdownAndSvgCanBeDisabled) {
    TempDir dir;
    std::vector<harness::ChallengeAggregate> aggs = {wordle_agg("a", "AAA", 3.0)};
    std::vector<HumanStatRecord> human = {human_rec("AAA", 3.5)};
    ReportOptions opts;
    opts.out_dir = dir.str();
    opts.write_markdown = false;
    opts.write_svg = false;
    auto files = render_report(aggs, human, {}, opts);
    EXPECT_TRUE(files.md_path.empty());
    EXPECT_TRUE(files.svg_paths.empty());
    EXPECT_FALSE(fs::exists(dir.path / "report.md"));
    EXPECT_TRUE(fs::exists(files.csv_path));
    EXPECT_TRUE(fs::exists(files.json_path));
}

TEST(RenderReport, HumanRankingRespectsDirection) {
    TempDir dir;
    // Battle-style reading: HIGHER human avg hp = easier = rank 1 when descending.
    harness::ChallengeAggregate a;
    a.agent_id = "expert";
    a.challenge_id = "Easy Boss";
    a.avg_hp_remaining = 60.0;
    a.win_rate = 1.0;
    a.n_trials = 5;
    harness::ChallengeAggregate b = a;
    b.challenge_id = "Hard Boss";
    b.avg_hp_remaining = 5.0;
    std::vector<HumanStatRecord> human = {human_rec("Easy Boss", 55.0),
                                          human_rec("Hard Boss", 8.0)};
    ReportOptions opts;
    opts.out_dir = dir.str();
    opts.rank_direction = RankDirection::Descending;
    opts.human_metric_label = "avg_hp";
    auto files = render_report({a, b}, human, {}, opts);
    auto j = nlohmann::json::parse(slurp(files.json_path));
    for (const auto& row : j["rows"]) {
        if (row["challenge_id"] == "Easy Boss") {
            EXPECT_EQ(row["rank"].get<int>(), 1);
        }
        if (row["challenge_id"] == "Hard Boss") {
            EXPECT_EQ(row["rank"].get<int>(), 2);
        }
    }
    EXPECT_NE(slurp(files.csv_path).find("human_avg_hp"), std::string::npos);
}
