#include "relent/report_io.hpp"

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "json.hpp"

namespace relent {

using nlohmann::json;  // std::map-backed: keys serialize sorted, deterministically

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

std::string fmt17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << content;
    if (!out) throw Error("write failed for " + path.string());
}

std::string plot_script(const Figure& fig) {
    std::string s;
    s += "#!/usr/bin/env python3\n";
    s += "import csv\nimport math\nimport matplotlib\nmatplotlib.use(\"Agg\")\n";
    s += "import matplotlib.pyplot as plt\n\n";
    s += "rows = list(csv.DictReader(open(\"" + fig.series + ".csv\")))\n";
    s += "def col(name, rs):\n    return [float(r[name]) for r in rs]\n\n";
    if (!fig.groupby.empty()) {
        s += "groups = sorted({r[\"" + fig.groupby + "\"] for r in rows}, key=float)\n";
        s += "for g in groups:\n";
        s += "    rs = [r for r in rows if r[\"" + fig.groupby + "\"] == g]\n";
        for (const auto& y : fig.ycols)
            s += "    plt.plot(col(\"" + fig.xcol + "\", rs), col(\"" + y + "\", rs), label=\"" +
                 fig.groupby + "=\" + g)\n";
    } else {
        const std::string style = fig.scatter ? "linestyle=\"none\", marker=\".\", markersize=2"
                                              : "marker=\"o\"";
        for (const auto& y : fig.ycols)
            s += "plt.plot(col(\"" + fig.xcol + "\", rows), col(\"" + y + "\", rows), " + style +
                 ", label=\"" + y + "\")\n";
    }
    if (fig.loglog) s += "plt.xscale(\"log\")\nplt.yscale(\"log\")\n";
    s += "plt.xlabel(\"" + fig.xcol + "\")\nplt.legend()\nplt.grid(True, which=\"both\", alpha=0.3)\n";
    s += "plt.title(\"" + fig.name + "\")\n";
    s += "plt.savefig(\"" + fig.name + ".png\", dpi=140, bbox_inches=\"tight\")\n";
    return s;
}

}  // namespace

std::string to_csv(const Series& series) {
    std::string out;
    for (std::size_t c = 0; c < series.columns.size(); ++c) {
        if (c) out += ",";
        out += series.columns[c];
    }
    out += "\n";
    for (const auto& row : series.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out += ",";
            out += fmt17(row[c]);
        }
        out += "\n";
    }
    return out;
}

std::string report_body_json(const ExperimentReport& report, const std::string& config_echo_json) {
    json body;
    body["kind"] = report.kind;
    body["verdict"] = report.verdict;
    body["config"] = config_echo_json.empty() ? json::object() : json::parse(config_echo_json);
    body["metrics"] = json::object();
    for (const auto& [k, v] : report.metrics) body["metrics"][k] = v;
    body["notes"] = report.notes;

    json series = json::array();
    for (const auto& s : report.series) {
        series.push_back({{"name", s.name},
                          {"columns", s.columns},
                          {"rows", s.rows.size()},
                          {"csv", s.name + ".csv"}});
    }
    body["series"] = series;

    json figs = json::array();
    for (const auto& f : report.figures) figs.push_back({{"name", f.name}, {"script", "plot_" + f.name + ".py"}});
    body["figures"] = figs;

    if (!report.hypothesis_records.empty()) {
        json recs = json::array();
        for (const auto& r : report.hypothesis_records) {
            recs.push_back({{"id", r.id},
                            {"verdict", to_string(r.verdict)},
                            {"constant", r.constant},
                            {"spread", r.spread},
                            {"witness", r.witness}});
        }
        body["hypotheses"] = recs;
    }
    return body.dump(2);
}

Manifest emit_outputs(const ExperimentReport& report, const std::string& config_echo_json,
                      const std::string& outdir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(outdir, ec);
    if (ec) throw Error("cannot create output directory " + outdir + ": " + ec.message());

    Manifest manifest;
    auto emit = [&](const std::string& name, const std::string& content) {
        write_file(fs::path(outdir) / name, content);
        manifest.entries.push_back({name, fnv1a_hex(content)});
    };

    const std::string body = report_body_json(report, config_echo_json);
    {
        const auto now = std::chrono::system_clock::now();
        const std::time_t tt = std::chrono::system_clock::to_time_t(now);
        char stamp[64];
        std::strftime(stamp, sizeof(stamp), "%FT%TZ", std::gmtime(&tt));
        json full;
        full["meta"] = {{"timestamp", stamp}, {"tool", "relent-lab"}, {"format", "1"}};
        full["body"] = json::parse(body);
        emit("report.json", full.dump(2) + "\n");
        // the body hash is the determinism anchor; meta carries the timestamp
        manifest.entries.back().hash = fnv1a_hex(body);
    }

    for (const auto& s : report.series) emit(s.name + ".csv", to_csv(s));
    for (const auto& f : report.figures) emit("plot_" + f.name + ".py", plot_script(f));

    json m = json::array();
    for (const auto& e : manifest.entries) m.push_back({{"path", e.path}, {"hash", e.hash}});
    write_file(fs::path(outdir) / "manifest.json", json{{"files", m}}.dump(2) + "\n");
    return manifest;
}

}  // namespace relent
